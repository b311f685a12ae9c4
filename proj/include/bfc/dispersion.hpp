#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bfc/biphoton_state.hpp"
#include "bfc/event_engine.hpp"
#include "bfc/jsi_matrix.hpp"
#include "bfc/rng.hpp"

namespace bfc {

/// Chirped-grating dispersion element.  D is the usual ns/nm figure at the
/// reference wavelength; internally the element applies a group delay linear
/// in optical frequency (constant GDD), the first-order model under which
/// equal-and-opposite elements on the two arms cancel exactly for
/// frequency-anticorrelated pairs.  insertion_loss is the survival factor
/// (3 dB -> 0.5).
struct DispersionElement {
    double d_ns_per_nm = 0.0;
    double ref_wavelength_nm = 1550.9;
    double insertion_loss = 1.0;

    double ref_freq_thz() const { return frequency_thz(ref_wavelength_nm); }
    // d(group delay)/d(nu) in ps/THz: D * dlambda/dnu = -D * lambda_ref^2 / c.
    double slope_ps_per_thz() const {
        return -(d_ns_per_nm * 1e3) * ref_wavelength_nm * ref_wavelength_nm / kSpeedOfLight_nm_per_ps;
    }

    void validate() const {
        if (ref_wavelength_nm <= 0) throw std::invalid_argument("dispersion: ref_wavelength_nm must be > 0");
        if (insertion_loss < 0 || insertion_loss > 1)
            throw std::invalid_argument("dispersion: insertion_loss must be in [0,1]");
    }
};

/// Group delay at an optical frequency, zero at the reference wavelength;
/// positive D delays longer wavelengths more.
inline double group_delay_ps(const DispersionElement& elem, double freq_thz) {
    if (freq_thz <= 0) throw std::invalid_argument("group_delay: frequency must be > 0");
    elem.validate();
    return elem.slope_ps_per_thz() * (freq_thz - elem.ref_freq_thz());
}

/// Runs a tag stream through a dispersion element: photon tags survive the
/// insertion-loss Bernoulli and are shifted by the group delay at their
/// exact frequency (resonance center +- sampled detuning, sign per
/// channel); dark counts originate at the detector and pass untouched.
inline std::vector<TimeTag> apply_dispersion(const RingParams& params, const std::vector<TimeTag>& tags,
                                             const DispersionElement& elem, uint64_t seed) {
    params.validate();
    elem.validate();
    const double nu_p = params.pump_frequency_thz();
    const double fsr = params.fsr_thz();
    Rng rng(derive_seed(seed, rng_domain::dispersion, 0));
    std::vector<TimeTag> out;
    out.reserve(tags.size());
    for (const auto& tag : tags) {
        if (tag.truth == TruthKind::dark) {
            out.push_back(tag);
            continue;
        }
        if (!rng.bernoulli(elem.insertion_loss)) continue;
        const double freq = tag.channel == Channel::signal ? nu_p + tag.k * fsr + tag.detuning_thz
                                                           : nu_p - tag.k * fsr - tag.detuning_thz;
        TimeTag shifted = tag;
        shifted.time_ps += group_delay_ps(elem, freq);
        out.push_back(shifted);
    }
    std::sort(out.begin(), out.end(), [](const TimeTag& a, const TimeTag& b) {
        if (a.time_ps != b.time_ps) return a.time_ps < b.time_ps;
        return a.pair_id < b.pair_id;
    });
    return out;
}

namespace detail {

// Coincidence profile of one sideband pair after dispersion: the undispersed
// two-sided exponential, shifted to the pair's differential group delay and
// convolved with the Cauchy spread that the residual dispersion slope maps
// onto the anticorrelated spectral detunings.
struct SidebandProfile {
    double center_ps = 0.0;
    double gamma_rad_per_ps = 0.0;
    double cauchy_scale_ps = 0.0;  // |slope_s + slope_i| * detuning HWHM

    double operator()(double tau_ps) const {
        const double u = tau_ps - center_ps;
        if (cauchy_scale_ps < 1e-9) return std::exp(-2.0 * gamma_rad_per_ps * std::abs(u));
        // Integrate over the Cauchy kernel with x = scale*tan(theta); the
        // midpoint rule avoids the endpoint singularities of tan.
        constexpr int kSteps = 801;
        const double dtheta = kPi / kSteps;
        double total = 0.0;
        for (int i = 0; i < kSteps; ++i) {
            const double theta = -kPi / 2.0 + (i + 0.5) * dtheta;
            const double x = cauchy_scale_ps * std::tan(theta);
            total += std::exp(-2.0 * gamma_rad_per_ps * std::abs(u - x));
        }
        return total / kSteps;
    }
};

}  // namespace detail

/// Analytic correlation curve with dispersion d_s on the signal arm and d_i
/// on the idler arm: a weight-mixed sum of per-sideband profiles.  Opposite
/// slopes collapse all centers to zero and null the broadening, which is the
/// nonlocal cancellation signature.
inline CorrelationCurve dispersed_correlation(const BiphotonState& state, const DispersionElement& d_s,
                                              const DispersionElement& d_i,
                                              const std::vector<double>& delays_ps) {
    state.validate();
    d_s.validate();
    d_i.validate();
    const double residual_slope = d_s.slope_ps_per_thz() + d_i.slope_ps_per_thz();
    const double detuning_hwhm = state.params.linewidth_fwhm_thz() / 2.0;
    std::vector<detail::SidebandProfile> profiles;
    std::vector<double> weights;
    for (int k = state.weights.first_k; k <= state.weights.last_k(); ++k) {
        auto [nu_s, nu_i] = resonance_frequencies(state.params, k);
        detail::SidebandProfile prof;
        prof.center_ps = group_delay_ps(d_s, nu_s) - group_delay_ps(d_i, nu_i);
        prof.gamma_rad_per_ps = state.params.gamma_rad_per_ps();
        prof.cauchy_scale_ps = std::abs(residual_slope) * detuning_hwhm;
        profiles.push_back(prof);
        weights.push_back(state.weights.at(k));
    }
    CorrelationCurve curve;
    curve.delays_ps = delays_ps;
    curve.values.reserve(delays_ps.size());
    for (double tau : delays_ps) {
        double v = 0.0;
        for (std::size_t i = 0; i < profiles.size(); ++i) v += weights[i] * profiles[i](tau);
        curve.values.push_back(v);
    }
    curve.label = "dispersed";
    return curve;
}

struct Peak {
    double delay_ps = 0.0;
    double height = 0.0;
};

/// Local maxima with at least the requested topographic prominence,
/// positions refined by parabolic interpolation, sorted by delay.
inline std::vector<Peak> peak_positions(const CorrelationCurve& curve, double min_prominence) {
    if (min_prominence <= 0) throw std::invalid_argument("peak_positions: min_prominence must be > 0");
    const auto& v = curve.values;
    const auto& t = curve.delays_ps;
    std::vector<Peak> peaks;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        if (!(v[i] > v[i - 1] && v[i] > v[i + 1])) continue;
        // prominence: drop to the highest saddle separating this peak from
        // higher ground (or the curve edge)
        double left_min = v[i];
        for (std::size_t j = i; j-- > 0;) {
            left_min = std::min(left_min, v[j]);
            if (v[j] > v[i]) break;
        }
        double right_min = v[i];
        for (std::size_t j = i + 1; j < v.size(); ++j) {
            right_min = std::min(right_min, v[j]);
            if (v[j] > v[i]) break;
        }
        const double prominence = v[i] - std::max(left_min, right_min);
        if (prominence < min_prominence) continue;
        const double a = 0.5 * (v[i - 1] + v[i + 1]) - v[i];
        const double b = 0.5 * (v[i + 1] - v[i - 1]);
        Peak p;
        if (a < 0) {
            const double x = -b / (2.0 * a);  // in bins, |x| <= 0.5 at a local max
            p.delay_ps = t[i] + x * (t[i + 1] - t[i]);
            p.height = v[i] - b * b / (4.0 * a);
        } else {
            p.delay_ps = t[i];
            p.height = v[i];
        }
        peaks.push_back(p);
    }
    return peaks;
}

struct FreqTimeEntry {
    int k = 0;
    double jsi_diag = 0.0;     // max-normalized JSI diagonal entry
    double peak_height = 0.0;  // max-normalized dispersed peak height
    double ratio = 0.0;        // peak_height / jsi_diag
};

/// Frequency-to-time mapping check: pairs the JSI diagonal with the
/// dispersed correlation peaks, both normalized to their maximum.  Peaks are
/// matched to sidebands by increasing |delay|, which is increasing k for a
/// single dispersed arm.
inline std::vector<FreqTimeEntry> frequency_time_map_check(const JsiMatrix& jsi,
                                                           const std::vector<Peak>& peaks) {
    jsi.validate();
    if (peaks.size() != jsi.dim())
        throw std::invalid_argument("frequency_time_map_check: peak count does not match JSI diagonal");
    std::vector<Peak> ordered = peaks;
    std::sort(ordered.begin(), ordered.end(),
              [](const Peak& a, const Peak& b) { return std::abs(a.delay_ps) < std::abs(b.delay_ps); });
    double jsi_max = 0.0, peak_max = 0.0;
    for (int k = jsi.k_lo; k <= jsi.k_hi; ++k) jsi_max = std::max(jsi_max, jsi.at(k, k));
    for (const auto& p : ordered) peak_max = std::max(peak_max, p.height);
    if (jsi_max <= 0 || peak_max <= 0)
        throw std::invalid_argument("frequency_time_map_check: degenerate inputs");
    std::vector<FreqTimeEntry> out;
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        FreqTimeEntry e;
        e.k = jsi.k_lo + static_cast<int>(i);
        e.jsi_diag = jsi.at(e.k, e.k) / jsi_max;
        e.peak_height = ordered[i].height / peak_max;
        e.ratio = e.jsi_diag > 0 ? e.peak_height / e.jsi_diag : 0.0;
        out.push_back(e);
    }
    return out;
}

}  // namespace bfc
