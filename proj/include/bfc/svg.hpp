#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bfc/jsi_matrix.hpp"

namespace bfc {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
};

struct PlotStyle {
    std::string title;
    std::string x_label;
    std::string y_label;
    int width = 840;
    int height = 520;
};

namespace detail {

inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// round tick step to 1/2/5 * 10^n
inline double nice_step(double span, int target_ticks) {
    if (span <= 0) return 1.0;
    const double raw = span / std::max(1, target_ticks);
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double r = raw / mag;
    if (r < 1.5) return mag;
    if (r < 3.5) return 2.0 * mag;
    if (r < 7.5) return 5.0 * mag;
    return 10.0 * mag;
}

inline std::string heat_color(double t) {
    // white -> deep blue ramp
    t = std::clamp(t, 0.0, 1.0);
    const int r = static_cast<int>(255 + t * (8 - 255));
    const int g = static_cast<int>(255 + t * (48 - 255));
    const int b = static_cast<int>(255 + t * (107 - 255));
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

}  // namespace detail

/// Self-contained SVG line plot: axes, 1/2/5 ticks, one path per series,
/// legend when there is more than one series.
inline std::string emit_svg(const std::vector<Series>& series, const PlotStyle& style = {}) {
    if (series.empty()) throw std::invalid_argument("emit_svg: no series");
    double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
    double y_min = x_min, y_max = -x_min;
    std::size_t n_points = 0;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size()) throw std::invalid_argument("emit_svg: series size mismatch");
        n_points += s.x.size();
        for (double v : s.x) {
            x_min = std::min(x_min, v);
            x_max = std::max(x_max, v);
        }
        for (double v : s.y) {
            y_min = std::min(y_min, v);
            y_max = std::max(y_max, v);
        }
    }
    if (n_points == 0) throw std::invalid_argument("emit_svg: empty data");
    if (x_max == x_min) x_max = x_min + 1.0;
    if (y_max == y_min) y_max = y_min + 1.0;
    const double pad_y = 0.05 * (y_max - y_min);
    y_min -= pad_y;
    y_max += pad_y;

    const double ml = 72, mr = 24, mt = style.title.empty() ? 20 : 40, mb = 52;
    const double pw = style.width - ml - mr;
    const double ph = style.height - mt - mb;
    auto px = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * pw; };
    auto py = [&](double y) { return mt + ph - (y - y_min) / (y_max - y_min) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.width << "\" height=\""
       << style.height << "\" viewBox=\"0 0 " << style.width << ' ' << style.height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!style.title.empty())
        os << "<text x=\"" << style.width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
              "font-size=\"16\">"
           << detail::xml_escape(style.title) << "</text>\n";

    // axes box
    os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    const double xs = detail::nice_step(x_max - x_min, 8);
    for (double x = std::ceil(x_min / xs) * xs; x <= x_max + 1e-9 * xs; x += xs) {
        os << "<line x1=\"" << detail::svg_num(px(x)) << "\" y1=\"" << mt + ph << "\" x2=\""
           << detail::svg_num(px(x)) << "\" y2=\"" << mt + ph + 5 << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << detail::svg_num(px(x)) << "\" y=\"" << mt + ph + 18
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << detail::svg_num(x)
           << "</text>\n";
    }
    const double ys = detail::nice_step(y_max - y_min, 6);
    for (double y = std::ceil(y_min / ys) * ys; y <= y_max + 1e-9 * ys; y += ys) {
        os << "<line x1=\"" << ml - 5 << "\" y1=\"" << detail::svg_num(py(y)) << "\" x2=\"" << ml << "\" y2=\""
           << detail::svg_num(py(y)) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << ml - 8 << "\" y=\"" << detail::svg_num(py(y) + 4)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << detail::svg_num(y)
           << "</text>\n";
    }
    if (!style.x_label.empty())
        os << "<text x=\"" << ml + pw / 2 << "\" y=\"" << style.height - 12
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
           << detail::xml_escape(style.x_label) << "</text>\n";
    if (!style.y_label.empty())
        os << "<text x=\"16\" y=\"" << mt + ph / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
              "font-size=\"13\" transform=\"rotate(-90 16 "
           << mt + ph / 2 << ")\">" << detail::xml_escape(style.y_label) << "</text>\n";

    for (const auto& s : series) {
        if (s.x.empty()) continue;
        os << "<path fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" d=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            os << (i == 0 ? 'M' : 'L') << detail::svg_num(px(s.x[i])) << ' ' << detail::svg_num(py(s.y[i]));
        os << "\"/>\n";
    }
    if (series.size() > 1) {
        double ly = mt + 14;
        for (const auto& s : series) {
            os << "<line x1=\"" << ml + pw - 130 << "\" y1=\"" << ly - 4 << "\" x2=\"" << ml + pw - 105
               << "\" y2=\"" << ly - 4 << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
            os << "<text x=\"" << ml + pw - 100 << "\" y=\"" << ly
               << "\" font-family=\"sans-serif\" font-size=\"11\">" << detail::xml_escape(s.name)
               << "</text>\n";
            ly += 16;
        }
    }
    os << "</svg>\n";
    return os.str();
}

/// Heat-map SVG of a JSI-style matrix with a linear color scale, one cell
/// per entry, axis labels carrying the sideband indices.
inline std::string emit_svg(const JsiMatrix& jsi, const PlotStyle& style = {}) {
    jsi.validate();
    const std::size_t n = jsi.dim();
    if (n == 0) throw std::invalid_argument("emit_svg: empty matrix");
    double v_max = 0.0;
    for (double v : jsi.values) v_max = std::max(v_max, v);
    if (v_max <= 0) v_max = 1.0;

    const int width = style.width ? style.width : 520;
    const int height = width + 30;
    const double ml = 60, mt = style.title.empty() ? 24 : 46;
    const double cell = (width - ml - 24) / static_cast<double>(n);

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!style.title.empty())
        os << "<text x=\"" << width / 2 << "\" y=\"26\" text-anchor=\"middle\" font-family=\"sans-serif\" "
              "font-size=\"15\">"
           << detail::xml_escape(style.title) << "</text>\n";
    for (int ks = jsi.k_lo; ks <= jsi.k_hi; ++ks) {
        for (int ki = jsi.k_lo; ki <= jsi.k_hi; ++ki) {
            const auto row = static_cast<std::size_t>(ks - jsi.k_lo);
            const auto col = static_cast<std::size_t>(ki - jsi.k_lo);
            os << "<rect x=\"" << detail::svg_num(ml + col * cell) << "\" y=\""
               << detail::svg_num(mt + row * cell) << "\" width=\"" << detail::svg_num(cell)
               << "\" height=\"" << detail::svg_num(cell) << "\" fill=\""
               << detail::heat_color(jsi.at(ks, ki) / v_max) << "\" stroke=\"#cccccc\" stroke-width=\"0.5\"/>\n";
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const int k = jsi.k_lo + static_cast<int>(i);
        os << "<text x=\"" << detail::svg_num(ml + (i + 0.5) * cell) << "\" y=\""
           << detail::svg_num(mt + n * cell + 16)
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">I" << k << "</text>\n";
        os << "<text x=\"" << ml - 8 << "\" y=\"" << detail::svg_num(mt + (i + 0.5) * cell + 4)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">S" << k << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace bfc
