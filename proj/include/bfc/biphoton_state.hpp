#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "bfc/jsi_matrix.hpp"
#include "bfc/spectral_model.hpp"

namespace bfc {

/// The computable biphoton state: a ring plus its normalized sideband
/// weights.  Phase coherence between sidebands is deliberately not tracked;
/// every simulated measurement depends on |a_k|^2 only.
struct BiphotonState {
    RingParams params;
    SidebandWeights weights;

    static BiphotonState make(const RingParams& params) {
        return BiphotonState{params, sideband_weights(params)};
    }

    void validate() const {
        params.validate();
        weights.validate();
        if (weights.size() != params.n_sidebands || weights.first_k != params.min_sideband)
            throw std::invalid_argument("state: weights do not match ring sideband range");
    }
};

struct CorrelationCurve {
    std::vector<double> delays_ps;
    std::vector<double> values;
    std::string label;
};

/// Ideal accidental-free JSI prediction: diagonal with the sideband weights,
/// unit trace.
inline JsiMatrix predicted_jsi(const BiphotonState& state) {
    state.validate();
    JsiMatrix jsi;
    jsi.k_lo = state.weights.first_k;
    jsi.k_hi = state.weights.last_k();
    jsi.normalization = JsiNormalization::unit_trace;
    jsi.values.assign(jsi.dim() * jsi.dim(), 0.0);
    for (int k = jsi.k_lo; k <= jsi.k_hi; ++k) jsi.at(k, k) = state.weights.at(k);
    return jsi;
}

/// Signal-idler coincidence profile of one sideband pair.  The Lorentzian
/// resonance makes this a two-sided exponential exp(-2*Gamma*|tau|), peak
/// normalized; the lineshape is shared by all resonances so the curve does
/// not depend on which populated k is asked for.
inline CorrelationCurve temporal_correlation(const BiphotonState& state, int k,
                                             const std::vector<double>& delays_ps) {
    state.validate();
    if (!state.weights.contains(k) || state.weights.at(k) <= 0)
        throw std::invalid_argument("temporal_correlation: sideband " + std::to_string(k) + " is not populated");
    for (std::size_t i = 1; i < delays_ps.size(); ++i)
        if (delays_ps[i] <= delays_ps[i - 1])
            throw std::invalid_argument("temporal_correlation: delay grid must be strictly increasing");
    const double gamma = state.params.gamma_rad_per_ps();
    CorrelationCurve curve;
    curve.delays_ps = delays_ps;
    curve.values.reserve(delays_ps.size());
    for (double tau : delays_ps) curve.values.push_back(std::exp(-2.0 * gamma * std::abs(tau)));
    curve.label = "S" + std::to_string(k) + "I" + std::to_string(k);
    return curve;
}

/// Full width at half of the peak value, linearly interpolated between the
/// bracketing grid points on each side.
inline double correlation_fwhm(const CorrelationCurve& curve) {
    const auto& t = curve.delays_ps;
    const auto& v = curve.values;
    if (t.size() != v.size() || t.size() < 3)
        throw std::invalid_argument("correlation_fwhm: need at least 3 samples");
    std::size_t imax = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[imax]) imax = i;
    const double half = v[imax] / 2.0;

    auto interp = [&](std::size_t below, std::size_t above) {
        // crossing between samples `below` (value < half) and `above`
        return t[below] + (half - v[below]) * (t[above] - t[below]) / (v[above] - v[below]);
    };
    double left = 0.0, right = 0.0;
    bool found_left = false, found_right = false;
    for (std::size_t i = imax; i-- > 0;) {
        if (v[i] < half) {
            left = interp(i, i + 1);
            found_left = true;
            break;
        }
    }
    for (std::size_t i = imax + 1; i < v.size(); ++i) {
        if (v[i] < half) {
            right = interp(i, i - 1);
            found_right = true;
            break;
        }
    }
    if (!found_left || !found_right)
        throw std::domain_error("correlation_fwhm: curve never crosses half maximum within the grid");
    return right - left;
}

}  // namespace bfc
