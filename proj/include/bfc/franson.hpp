#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "bfc/correlator.hpp"
#include "bfc/event_engine.hpp"

namespace bfc {

/// Unbalanced Mach-Zehnder pair: long-short imbalances on the signal and
/// idler arms.  base_visibility lumps every real-world visibility
/// degradation into one multiplicative factor.
struct FransonConfig {
    double tau_s_ns = 6.0;
    double tau_i_ns = 6.0;
    double base_visibility = 1.0;
    double pump_coherence_ns = 1000.0;

    double tau_s_ps() const { return ps_from_ns(tau_s_ns); }
    double tau_i_ps() const { return ps_from_ns(tau_i_ns); }
    double tau_d_ps() const { return tau_i_ps() - tau_s_ps(); }

    void validate(const RingParams& ring) const {
        if (base_visibility < 0 || base_visibility > 1)
            throw std::invalid_argument("franson: base_visibility must be in [0,1]");
        // Imbalance must exceed the single-photon coherence time (no
        // self-interference) yet stay far below the pump coherence time.
        const double coherence_ps = 1.0 / (kPi * ring.linewidth_fwhm_thz());
        for (double tau : {tau_s_ps(), tau_i_ps()}) {
            if (tau <= 5.0 * coherence_ps)
                throw std::invalid_argument("franson: imbalance must exceed 5x the single-photon coherence time");
            if (tau >= ps_from_ns(pump_coherence_ns) / 10.0)
                throw std::invalid_argument("franson: imbalance must be well below the pump coherence time");
        }
    }
};

enum class ScanAxis { common_delay, tau_d };

struct FringeScan {
    ScanAxis axis = ScanAxis::common_delay;
    std::vector<double> delays_fs;
    std::vector<double> coincidences;
    std::vector<double> visibility;   // filled on tau_d scans, else empty
    double carrier_rad_per_fs = 0.0;  // known fringe frequency for fitting
};

/// Single-resonance coherence factor of the fringe envelope.
inline double coherence_factor(const BiphotonState& state, double tau_d_ps) {
    return std::exp(-state.params.gamma_rad_per_ps() * std::abs(tau_d_ps));
}

namespace detail {

// Weighted phasor sum over the idler comb, the discrete part of the fringe
// envelope.  A direct complex sum keeps the revival points exact where the
// closed-form Dirichlet ratio would hit 0/0.
inline std::complex<double> comb_phasor(const BiphotonState& state, double tau_d_ps) {
    const double nu_p = state.params.pump_frequency_thz();
    const double fsr = state.params.fsr_thz();
    std::complex<double> sum = 0.0;
    for (int k = state.weights.first_k; k <= state.weights.last_k(); ++k) {
        const double omega_i = kTwoPi * (nu_p - k * fsr);
        sum += state.weights.at(k) * std::polar(1.0, omega_i * tau_d_ps);
    }
    return sum;
}

}  // namespace detail

/// |E(tau_d)|: the two-photon fringe envelope, product of the single
/// resonance decay and the multi-sideband interference comb.
inline double envelope(const BiphotonState& state, double tau_d_ps) {
    state.validate();
    return coherence_factor(state, tau_d_ps) * std::abs(detail::comb_phasor(state, tau_d_ps));
}

/// Post-selected two-photon coincidence rate in [0, 1]:
///   C = 1/2 [1 + V0 Re(e^{i 2 w_p tau_s} E(tau_d))].
/// For two equal sidebands this is the product-of-cosines fringe law; more
/// sidebands sharpen the envelope and revive it at multiples of 1/FSR.
inline double coincidence_rate(const BiphotonState& state, const FransonConfig& cfg) {
    state.validate();
    cfg.validate(state.params);
    const double omega_p = kTwoPi * state.params.pump_frequency_thz();
    const double tau_d = cfg.tau_d_ps();
    const std::complex<double> envelope_term =
        coherence_factor(state, tau_d) * detail::comb_phasor(state, tau_d);
    const std::complex<double> carrier = std::polar(1.0, 2.0 * omega_p * cfg.tau_s_ps());
    return 0.5 * (1.0 + cfg.base_visibility * (carrier * envelope_term).real());
}

/// Weighted mean idler frequency, the carrier of tau_d fringes.
inline double mean_idler_freq_thz(const BiphotonState& state) {
    double k_mean = 0.0;
    for (int k = state.weights.first_k; k <= state.weights.last_k(); ++k)
        k_mean += k * state.weights.at(k);
    return state.params.pump_frequency_thz() - k_mean * state.params.fsr_thz();
}

/// Analytic fringe scan.  common_delay sweeps tau_s = tau_i together
/// (fringe period: half the pump period); tau_d holds tau_s and sweeps the
/// idler imbalance (fringe period: the mean idler carrier, with the
/// envelope recorded alongside).
inline FringeScan fringe_scan(const BiphotonState& state, const FransonConfig& cfg, ScanAxis axis,
                              const std::vector<double>& delays_fs) {
    if (delays_fs.empty()) throw std::invalid_argument("fringe_scan: empty grid");
    for (std::size_t i = 1; i < delays_fs.size(); ++i)
        if (delays_fs[i] <= delays_fs[i - 1])
            throw std::invalid_argument("fringe_scan: grid must be strictly increasing");
    FringeScan scan;
    scan.axis = axis;
    scan.delays_fs = delays_fs;
    scan.coincidences.reserve(delays_fs.size());
    if (axis == ScanAxis::common_delay) {
        scan.carrier_rad_per_fs = 2.0 * kTwoPi * state.params.pump_frequency_thz() * 1e-3;
        for (double g_fs : delays_fs) {
            FransonConfig c = cfg;
            c.tau_s_ns += g_fs * 1e-6;
            c.tau_i_ns += g_fs * 1e-6;
            scan.coincidences.push_back(coincidence_rate(state, c));
        }
    } else {
        scan.carrier_rad_per_fs = kTwoPi * mean_idler_freq_thz(state) * 1e-3;
        scan.visibility.reserve(delays_fs.size());
        for (double g_fs : delays_fs) {
            FransonConfig c = cfg;
            c.tau_i_ns += g_fs * 1e-6;
            scan.coincidences.push_back(coincidence_rate(state, c));
            scan.visibility.push_back(cfg.base_visibility * envelope(state, c.tau_d_ps()));
        }
    }
    return scan;
}

inline constexpr double kBellVisibilityBound = 0.70710678118654752;

struct VisibilityFit {
    double visibility = 0.0;
    double phase_rad = 0.0;
    double stderr_visibility = 0.0;
    double offset = 0.0;
    bool bell_witness = false;  // visibility above the 1/sqrt(2) bound
};

/// Least-squares sinusoid fit at the scan's known carrier frequency over
/// [first, last) sample indices; visibility = amplitude / offset.
inline VisibilityFit fit_visibility(const FringeScan& scan, std::size_t first = 0,
                                    std::size_t last = std::numeric_limits<std::size_t>::max()) {
    last = std::min(last, scan.delays_fs.size());
    if (first + 4 > last) throw std::invalid_argument("fit_visibility: too few samples");
    const double omega = scan.carrier_rad_per_fs;
    if (omega <= 0) throw std::invalid_argument("fit_visibility: scan carries no carrier frequency");
    if (scan.delays_fs[last - 1] - scan.delays_fs[first] < 2.0 * kTwoPi / omega)
        throw std::invalid_argument("fit_visibility: window must span at least two fringe periods");

    // Normal equations for y = a + b cos(w t) + c sin(w t).
    double m[3][3] = {};
    double rhs[3] = {};
    for (std::size_t i = first; i < last; ++i) {
        const double t = scan.delays_fs[i];
        const double basis[3] = {1.0, std::cos(omega * t), std::sin(omega * t)};
        for (int r = 0; r < 3; ++r) {
            rhs[r] += basis[r] * scan.coincidences[i];
            for (int c = 0; c < 3; ++c) m[r][c] += basis[r] * basis[c];
        }
    }
    const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                       m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                       m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if (std::abs(det) < 1e-30) throw std::domain_error("fit_visibility: singular normal equations");
    double inv[3][3];
    inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
    inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
    inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
    inv[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
    inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
    inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
    inv[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
    inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
    inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
    double p[3];
    for (int r = 0; r < 3; ++r) p[r] = inv[r][0] * rhs[0] + inv[r][1] * rhs[1] + inv[r][2] * rhs[2];

    const double offset = p[0];
    const double amplitude = std::hypot(p[1], p[2]);
    if (offset <= 0) throw std::domain_error("fit_visibility: degenerate fit (offset <= 0)");

    double ss_res = 0.0;
    for (std::size_t i = first; i < last; ++i) {
        const double t = scan.delays_fs[i];
        const double model = p[0] + p[1] * std::cos(omega * t) + p[2] * std::sin(omega * t);
        const double r = scan.coincidences[i] - model;
        ss_res += r * r;
    }
    const auto n = static_cast<double>(last - first);
    const double sigma2 = n > 3 ? ss_res / (n - 3.0) : 0.0;
    double var_amp = 0.0;
    if (amplitude > 0) {
        const double db = p[1] / amplitude, dc = p[2] / amplitude;
        var_amp = sigma2 * (db * db * inv[1][1] + dc * dc * inv[2][2] + 2.0 * db * dc * inv[1][2]);
    } else {
        var_amp = sigma2 * (inv[1][1] + inv[2][2]);
    }
    const double var_off = sigma2 * inv[0][0];

    VisibilityFit fit;
    fit.offset = offset;
    fit.visibility = amplitude / offset;
    fit.phase_rad = std::atan2(-p[2], p[1]);
    fit.stderr_visibility =
        std::sqrt(var_amp / (offset * offset) +
                  amplitude * amplitude / (offset * offset * offset * offset) * var_off);
    fit.bell_witness = fit.visibility > kBellVisibilityBound;
    return fit;
}

/// Monte Carlo Franson coincidences inside a window around zero delay.
/// Pairs detected on both arms interfere at the probability level: half the
/// events land in the distinguishable satellite peaks and are discarded by
/// the window, the surviving half registers with the per-pair rate C
/// evaluated at the pair's sampled idler frequency.  Unpaired tags (darks
/// and lone photons) pick random long/short paths and contribute
/// accidentals.
inline uint64_t mc_franson(const BiphotonState& state, const SourceConfig& src,
                           const ChannelConfig& ch_signal, const ChannelConfig& ch_idler,
                           const FransonConfig& cfg, double window_ps, uint64_t seed) {
    state.validate();
    cfg.validate(state.params);
    if (window_ps <= 0 || window_ps >= std::min(cfg.tau_s_ps(), cfg.tau_i_ps()))
        throw std::invalid_argument("mc_franson: window must be positive and below the interferometer imbalance");

    SourceConfig run_src = src;
    run_src.seed = seed;
    const double duration_ps = src.duration_ps();
    auto pairs = generate_pairs(state, run_src);
    auto sig = detect(pairs, Channel::signal, ch_signal, duration_ps, seed);
    auto idl = detect(pairs, Channel::idler, ch_idler, duration_ps, seed);

    std::unordered_map<uint64_t, const TimeTag*> sig_by_pair;
    sig_by_pair.reserve(sig.size());
    for (const auto& t : sig)
        if (t.truth == TruthKind::pair) sig_by_pair.emplace(t.pair_id, &t);

    const double omega_p = kTwoPi * state.params.pump_frequency_thz();
    const double nu_p = state.params.pump_frequency_thz();
    const double fsr = state.params.fsr_thz();
    const double tau_d = cfg.tau_d_ps();
    const double carrier_phase = 2.0 * omega_p * cfg.tau_s_ps();
    const double half_window = window_ps / 2.0;

    Rng rng(derive_seed(seed, rng_domain::franson, 0));
    uint64_t coincidences = 0;
    std::vector<uint8_t> idler_matched(idl.size(), 0);
    std::unordered_map<uint64_t, bool> sig_matched;
    for (std::size_t j = 0; j < idl.size(); ++j) {
        const auto& it = idl[j];
        if (it.truth != TruthKind::pair) continue;
        auto found = sig_by_pair.find(it.pair_id);
        if (found == sig_by_pair.end()) continue;
        idler_matched[j] = 1;
        sig_matched[it.pair_id] = true;
        const TimeTag& st = *found->second;
        if (std::abs(st.time_ps - it.time_ps) > half_window) continue;  // outside the TIA window
        if (!rng.bernoulli(0.5)) continue;                              // satellite peak, gated away
        const double nu_i = nu_p - it.k * fsr - it.detuning_thz;
        const double rate =
            0.5 * (1.0 + cfg.base_visibility * std::cos(carrier_phase + kTwoPi * nu_i * tau_d));
        if (rng.bernoulli(rate)) ++coincidences;
    }

    // Accidentals: unpaired tags with independently chosen paths.
    std::vector<double> acc_sig, acc_idl;
    for (const auto& t : sig) {
        if (t.truth == TruthKind::pair && sig_matched.count(t.pair_id)) continue;
        acc_sig.push_back(t.time_ps + (rng.bernoulli(0.5) ? cfg.tau_s_ps() : 0.0));
    }
    for (std::size_t j = 0; j < idl.size(); ++j) {
        if (idler_matched[j]) continue;
        acc_idl.push_back(idl[j].time_ps + (rng.bernoulli(0.5) ? cfg.tau_i_ps() : 0.0));
    }
    std::sort(acc_sig.begin(), acc_sig.end());
    std::sort(acc_idl.begin(), acc_idl.end());
    std::size_t lo = 0;
    for (double ts : acc_sig) {
        while (lo < acc_idl.size() && acc_idl[lo] < ts - half_window) ++lo;
        for (std::size_t j = lo; j < acc_idl.size() && acc_idl[j] <= ts + half_window; ++j) ++coincidences;
    }
    return coincidences;
}

/// Monte Carlo fringe scan: one independent mc_franson run per grid point.
inline FringeScan mc_fringe_scan(const BiphotonState& state, const SourceConfig& src,
                                 const ChannelConfig& ch_signal, const ChannelConfig& ch_idler,
                                 const FransonConfig& cfg, ScanAxis axis,
                                 const std::vector<double>& delays_fs, double window_ps,
                                 uint64_t seed) {
    if (delays_fs.empty()) throw std::invalid_argument("mc_fringe_scan: empty grid");
    FringeScan scan;
    scan.axis = axis;
    scan.delays_fs = delays_fs;
    scan.carrier_rad_per_fs =
        axis == ScanAxis::common_delay ? 2.0 * kTwoPi * state.params.pump_frequency_thz() * 1e-3
                                       : kTwoPi * mean_idler_freq_thz(state) * 1e-3;
    scan.coincidences.reserve(delays_fs.size());
    for (std::size_t i = 0; i < delays_fs.size(); ++i) {
        FransonConfig c = cfg;
        if (axis == ScanAxis::common_delay) {
            c.tau_s_ns += delays_fs[i] * 1e-6;
            c.tau_i_ns += delays_fs[i] * 1e-6;
        } else {
            c.tau_i_ns += delays_fs[i] * 1e-6;
        }
        const uint64_t point_seed = derive_seed(seed, rng_domain::franson, i + 1);
        scan.coincidences.push_back(
            static_cast<double>(mc_franson(state, src, ch_signal, ch_idler, c, window_ps, point_seed)));
    }
    return scan;
}

}  // namespace bfc
