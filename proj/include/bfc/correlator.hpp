#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "bfc/event_engine.hpp"
#include "bfc/jsi_matrix.hpp"

namespace bfc {

/// Cross-correlation histogram of two tag streams over [-range, +range).
/// Raw histograms hold integer counts; gate compensation rescales bins, so
/// counts are stored as doubles throughout.
struct Histogram {
    double bin_width_ps = 100.0;
    double range_ps = 40000.0;
    std::vector<double> counts;
    std::vector<uint8_t> valid;  // empty until a compensation step masks bins
    uint64_t n_signal = 0;
    uint64_t n_idler = 0;

    std::size_t n_bins() const { return counts.size(); }
    double bin_center_ps(std::size_t i) const {
        return -range_ps + (static_cast<double>(i) + 0.5) * bin_width_ps;
    }
    std::size_t zero_bin() const { return n_bins() / 2; }
};

struct TiaConfig {
    double bin_ps = 100.0;
    double range_ns = 40.0;
    double window_ns = 2.0;

    double range_ps() const { return ps_from_ns(range_ns); }
    double window_ps() const { return ps_from_ns(window_ns); }

    void validate() const {
        if (bin_ps <= 0) throw std::invalid_argument("tia: bin_ps must be > 0");
        if (range_ns <= 0) throw std::invalid_argument("tia: range_ns must be > 0");
        if (window_ps() < bin_ps) throw std::invalid_argument("tia: window must be at least one bin");
        if (window_ps() > range_ps()) throw std::invalid_argument("tia: window must not exceed half the span");
    }
};

namespace detail {

inline void require_sorted(const std::vector<TimeTag>& tags, const char* name) {
    for (std::size_t i = 1; i < tags.size(); ++i)
        if (tags[i].time_ps < tags[i - 1].time_ps)
            throw std::invalid_argument(std::string("cross_correlate: ") + name + " stream is not time sorted");
}

struct WindowStats {
    double peak_counts = 0.0;
    double off_mean = 0.0;
    std::size_t n_off_windows = 0;
};

// Sums the window of `w_bins` bins whose first bin is `start`, and averages
// all disjoint same-width windows tiled outward from it.
inline WindowStats window_stats(const Histogram& hist, std::size_t start, std::size_t w_bins) {
    WindowStats st;
    auto window_sum = [&](std::size_t s) {
        double total = 0.0;
        for (std::size_t i = s; i < s + w_bins; ++i) total += hist.counts[i];
        return total;
    };
    st.peak_counts = window_sum(start);
    double off_total = 0.0;
    for (std::size_t s = start; s >= w_bins; ) {
        s -= w_bins;
        off_total += window_sum(s);
        ++st.n_off_windows;
    }
    for (std::size_t s = start + w_bins; s + w_bins <= hist.n_bins(); s += w_bins) {
        off_total += window_sum(s);
        ++st.n_off_windows;
    }
    if (st.n_off_windows > 0) st.off_mean = off_total / static_cast<double>(st.n_off_windows);
    return st;
}

inline std::size_t clamped_window_start(const Histogram& hist, std::size_t center, std::size_t w_bins) {
    std::size_t start = center > (w_bins - 1) / 2 ? center - (w_bins - 1) / 2 : 0;
    return std::min(start, hist.n_bins() - w_bins);
}

inline std::size_t window_bins(const Histogram& hist, double window_ps) {
    if (window_ps < hist.bin_width_ps) throw std::invalid_argument("window must be at least one bin wide");
    std::size_t w_bins = static_cast<std::size_t>(std::llround(window_ps / hist.bin_width_ps));
    if (w_bins > hist.n_bins() / 2)
        throw std::invalid_argument("window is larger than half the histogram range");
    return w_bins;
}

}  // namespace detail

/// Multi-stop time-interval analysis: counts[b] = number of (signal, idler)
/// tag pairs whose difference t_s - t_i lands in bin b.  Two-pointer sweep
/// over the sorted streams, O(n_s + n_i + matches).
inline Histogram cross_correlate(const std::vector<TimeTag>& signal, const std::vector<TimeTag>& idler,
                                 double bin_width_ps, double range_ps) {
    if (bin_width_ps <= 0 || range_ps <= 0)
        throw std::invalid_argument("cross_correlate: bin width and range must be > 0");
    const double n_bins_real = 2.0 * range_ps / bin_width_ps;
    const auto n_bins = static_cast<std::size_t>(std::llround(n_bins_real));
    if (n_bins < 1 || std::abs(n_bins_real - static_cast<double>(n_bins)) > 1e-9)
        throw std::invalid_argument("cross_correlate: range must be an integer multiple of the bin width");
    detail::require_sorted(signal, "signal");
    detail::require_sorted(idler, "idler");

    Histogram hist;
    hist.bin_width_ps = bin_width_ps;
    hist.range_ps = range_ps;
    hist.counts.assign(n_bins, 0.0);
    hist.n_signal = signal.size();
    hist.n_idler = idler.size();

    std::size_t lo = 0;
    for (const auto& s : signal) {
        while (lo < idler.size() && idler[lo].time_ps < s.time_ps - range_ps) ++lo;
        for (std::size_t j = lo; j < idler.size() && idler[j].time_ps <= s.time_ps + range_ps; ++j) {
            const double d = s.time_ps - idler[j].time_ps;
            const auto bin = static_cast<std::ptrdiff_t>(std::floor((d + range_ps) / bin_width_ps));
            if (bin >= 0 && bin < static_cast<std::ptrdiff_t>(n_bins))
                hist.counts[static_cast<std::size_t>(bin)] += 1.0;
        }
    }
    return hist;
}

inline CorrelationCurve to_curve(const Histogram& hist, std::string label = "") {
    CorrelationCurve curve;
    curve.label = std::move(label);
    curve.delays_ps.reserve(hist.n_bins());
    curve.values.reserve(hist.n_bins());
    for (std::size_t i = 0; i < hist.n_bins(); ++i) {
        curve.delays_ps.push_back(hist.bin_center_ps(i));
        curve.values.push_back(hist.counts[i]);
    }
    return curve;
}

/// Coincidence-to-accidental ratio: counts in a window centered on the
/// histogram maximum over the mean counts of all disjoint same-width
/// windows.  Returns +infinity when the background is empty.
inline double car(const Histogram& hist, double window_ps) {
    if (hist.n_bins() == 0) throw std::invalid_argument("car: empty histogram");
    const std::size_t w_bins = detail::window_bins(hist, window_ps);
    std::size_t imax = 0;
    for (std::size_t i = 1; i < hist.n_bins(); ++i)
        if (hist.counts[i] > hist.counts[imax]) imax = i;
    const std::size_t start = detail::clamped_window_start(hist, imax, w_bins);
    const auto st = detail::window_stats(hist, start, w_bins);
    if (st.n_off_windows == 0) throw std::invalid_argument("car: no room for an off-peak window");
    if (st.off_mean == 0.0) return std::numeric_limits<double>::infinity();
    return st.peak_counts / st.off_mean;
}

/// Monte Carlo JSI measurement: for each (k_s, k_i) cell the pulse shaper is
/// modeled as an ideal brick-wall filter (only photons of the selected
/// sideband reach each arm), the filtered streams are detected and
/// correlated, and the cell value is the coincidence count in a window
/// centered at zero delay, background subtracted and clamped at zero unless
/// subtract_accidentals is off.  Cells use independent derived RNG streams.
inline JsiMatrix measure_jsi(const BiphotonState& state, const SourceConfig& src,
                             const ChannelConfig& ch_signal, const ChannelConfig& ch_idler,
                             int k_lo, int k_hi, const TiaConfig& tia,
                             bool subtract_accidentals = true) {
    state.validate();
    src.validate();
    tia.validate();
    if (k_lo > k_hi || !state.weights.contains(k_lo) || !state.weights.contains(k_hi))
        throw std::invalid_argument("measure_jsi: k range outside populated sidebands");

    JsiMatrix jsi;
    jsi.k_lo = k_lo;
    jsi.k_hi = k_hi;
    jsi.normalization = JsiNormalization::counts;
    jsi.values.assign(jsi.dim() * jsi.dim(), 0.0);

    const double duration_ps = src.duration_ps();
    for (int ks = k_lo; ks <= k_hi; ++ks) {
        for (int ki = k_lo; ki <= k_hi; ++ki) {
            const auto cell = static_cast<uint64_t>(ks - k_lo) * jsi.dim() + static_cast<uint64_t>(ki - k_lo);
            SourceConfig cell_src = src;
            cell_src.seed = derive_seed(src.seed, rng_domain::jsi_cell, cell);
            auto pairs = generate_pairs(state, cell_src);
            std::vector<PairEvent> sig_arm, idl_arm;
            for (const auto& p : pairs) {
                if (p.k == ks) sig_arm.push_back(p);
                if (p.k == ki) idl_arm.push_back(p);
            }
            auto sig = detect(sig_arm, Channel::signal, ch_signal, duration_ps, cell_src.seed);
            auto idl = detect(idl_arm, Channel::idler, ch_idler, duration_ps, cell_src.seed);
            auto hist = cross_correlate(sig, idl, tia.bin_ps, tia.range_ps());
            const std::size_t w_bins = detail::window_bins(hist, tia.window_ps());
            const std::size_t start = detail::clamped_window_start(hist, hist.zero_bin(), w_bins);
            const auto st = detail::window_stats(hist, start, w_bins);
            double value = st.peak_counts;
            if (subtract_accidentals) value = std::max(0.0, value - st.off_mean);
            jsi.at(ks, ki) = value;
        }
    }
    return jsi;
}

/// Undoes the coincidence roll-off left by synchronized periodic gating.
/// Each bin is divided by the triangular gate-overlap acceptance at its
/// delay; bins below 5% acceptance are flagged invalid instead of being
/// amplified.
inline Histogram compensate_gate(const Histogram& hist, const GateConfig& gate) {
    gate.validate();
    Histogram out = hist;
    out.valid.assign(hist.n_bins(), 1);
    std::size_t n_valid = 0;
    for (std::size_t i = 0; i < hist.n_bins(); ++i) {
        const double tau = std::abs(hist.bin_center_ps(i));
        const double m = std::fmod(tau, gate.period_ps);
        const double d = std::min(m, gate.period_ps - m);
        const double acceptance = std::max(0.0, 1.0 - d / gate.width_ps);
        if (acceptance < 0.05) {
            out.valid[i] = 0;
        } else {
            out.counts[i] = hist.counts[i] / acceptance;
            ++n_valid;
        }
    }
    if (n_valid == 0)
        throw std::invalid_argument("compensate_gate: gate acceptance vanishes over the whole histogram");
    return out;
}

}  // namespace bfc
