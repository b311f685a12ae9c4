#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "bfc/biphoton_state.hpp"
#include "bfc/correlator.hpp"
#include "bfc/dispersion.hpp"
#include "bfc/event_engine.hpp"
#include "bfc/franson.hpp"
#include "bfc/jsi_matrix.hpp"
#include "bfc/schmidt.hpp"

namespace bfc {

namespace detail {

// Shortest round-trippable decimal; keeps artifacts byte-stable across runs.
inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    double parsed = std::strtod(buf, nullptr);
    if (parsed == v) {
        for (int prec = 1; prec < 17; ++prec) {
            char shorter[40];
            std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
            if (std::strtod(shorter, nullptr) == v) return shorter;
        }
    }
    return buf;
}

}  // namespace detail

inline void write_curve_csv(std::ostream& os, const CorrelationCurve& curve) {
    os << "delay_ps,value\n";
    for (std::size_t i = 0; i < curve.delays_ps.size(); ++i)
        os << detail::num(curve.delays_ps[i]) << ',' << detail::num(curve.values[i]) << '\n';
}

inline void write_histogram_csv(std::ostream& os, const Histogram& hist) {
    const bool has_mask = !hist.valid.empty();
    os << (has_mask ? "delay_ps,counts,valid\n" : "delay_ps,counts\n");
    for (std::size_t i = 0; i < hist.n_bins(); ++i) {
        os << detail::num(hist.bin_center_ps(i)) << ',' << detail::num(hist.counts[i]);
        if (has_mask) os << ',' << static_cast<int>(hist.valid[i]);
        os << '\n';
    }
}

inline void write_jsi_csv(std::ostream& os, const JsiMatrix& jsi) {
    os << 'k';
    for (int ki = jsi.k_lo; ki <= jsi.k_hi; ++ki) os << ',' << ki;
    os << '\n';
    for (int ks = jsi.k_lo; ks <= jsi.k_hi; ++ks) {
        os << ks;
        for (int ki = jsi.k_lo; ki <= jsi.k_hi; ++ki) os << ',' << detail::num(jsi.at(ks, ki));
        os << '\n';
    }
}

inline void write_scan_csv(std::ostream& os, const FringeScan& scan) {
    const bool has_vis = !scan.visibility.empty();
    os << (has_vis ? "delay_fs,coincidences,visibility\n" : "delay_fs,coincidences\n");
    for (std::size_t i = 0; i < scan.delays_fs.size(); ++i) {
        os << detail::num(scan.delays_fs[i]) << ',' << detail::num(scan.coincidences[i]);
        if (has_vis) os << ',' << detail::num(scan.visibility[i]);
        os << '\n';
    }
}

inline void write_tags_csv(std::ostream& os, const std::vector<TimeTag>& tags) {
    os << "time_ps,channel,truth\n";
    for (const auto& t : tags) {
        os << detail::num(t.time_ps) << ',' << (t.channel == Channel::signal ? "signal" : "idler") << ','
           << (t.truth == TruthKind::pair ? "pair" : "dark") << '\n';
    }
}

inline void write_peaks_csv(std::ostream& os, const std::vector<Peak>& peaks) {
    os << "delay_ns,height\n";
    for (const auto& p : peaks) os << detail::num(p.delay_ps * 1e-3) << ',' << detail::num(p.height) << '\n';
}

inline void write_schmidt_csv(std::ostream& os, const SchmidtResult& result) {
    os << "key,value\n";
    os << "schmidt_number," << detail::num(result.schmidt_number) << '\n';
    os << "effective_bits," << detail::num(result.effective_bits) << '\n';
    for (std::size_t i = 0; i < result.coefficients.size(); ++i)
        os << "lambda_" << i << ',' << detail::num(result.coefficients[i]) << '\n';
}

// Binary tag record, little-endian, 12 bytes:
//   u64 time (ps, rounded to integer), u8 channel, u8 truth kind, i16 k.
// Compact stream format for large runs; detuning and pair id are not kept.
inline void write_tags_binary(std::ostream& os, const std::vector<TimeTag>& tags) {
    for (const auto& t : tags) {
        unsigned char rec[12];
        auto time = static_cast<uint64_t>(std::llround(t.time_ps < 0 ? 0.0 : t.time_ps));
        for (int b = 0; b < 8; ++b) rec[b] = static_cast<unsigned char>((time >> (8 * b)) & 0xff);
        rec[8] = static_cast<unsigned char>(t.channel);
        rec[9] = static_cast<unsigned char>(t.truth);
        auto k = static_cast<int16_t>(t.k);
        rec[10] = static_cast<unsigned char>(static_cast<uint16_t>(k) & 0xff);
        rec[11] = static_cast<unsigned char>((static_cast<uint16_t>(k) >> 8) & 0xff);
        os.write(reinterpret_cast<const char*>(rec), sizeof(rec));
    }
}

inline std::vector<TimeTag> read_tags_binary(std::istream& is) {
    std::vector<TimeTag> tags;
    unsigned char rec[12];
    while (is.read(reinterpret_cast<char*>(rec), sizeof(rec))) {
        TimeTag t;
        uint64_t time = 0;
        for (int b = 0; b < 8; ++b) time |= static_cast<uint64_t>(rec[b]) << (8 * b);
        t.time_ps = static_cast<double>(time);
        t.channel = static_cast<Channel>(rec[8]);
        t.truth = static_cast<TruthKind>(rec[9]);
        t.k = static_cast<int16_t>(static_cast<uint16_t>(rec[10]) | (static_cast<uint16_t>(rec[11]) << 8));
        tags.push_back(t);
    }
    return tags;
}

}  // namespace bfc
