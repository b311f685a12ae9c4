#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bfc/constants.hpp"

namespace bfc {

// How the sideband powers |a_k|^2 are assigned across the comb.
struct FlatWeights {};
struct LorentzianRolloff {
    double scale = 5.0;  // w_k ~ 1/(1 + (k/scale)^4)
};
struct ExplicitWeights {
    std::vector<double> weights;  // one entry per sideband, any positive scale
};
using WeightModel = std::variant<FlatWeights, LorentzianRolloff, ExplicitWeights>;

/// Microring resonance comb: pump resonance, FSR grid, Lorentzian linewidth
/// and the sideband weight model.  All downstream physics derives from this.
struct RingParams {
    double pump_wavelength_nm = 1550.9;
    double fsr_ghz = 384.6;
    double linewidth_fwhm_mhz = 270.0;
    int n_sidebands = 6;
    int min_sideband = 2;  // pump notch filter removes pairs below this index
    WeightModel weight_model = LorentzianRolloff{};

    double pump_frequency_thz() const { return frequency_thz(pump_wavelength_nm); }
    double fsr_thz() const { return thz_from_ghz(fsr_ghz); }
    double linewidth_fwhm_thz() const { return thz_from_mhz(linewidth_fwhm_mhz); }
    // Angular half-width of a resonance: the Lorentzian field amplitude is
    // Gamma / (Gamma + i*Omega) with Omega the angular detuning.
    double gamma_rad_per_ps() const { return kPi * linewidth_fwhm_thz(); }
    int max_sideband() const { return min_sideband + n_sidebands - 1; }

    void validate() const {
        if (pump_wavelength_nm <= 0) throw std::invalid_argument("ring: pump_wavelength_nm must be > 0");
        if (fsr_ghz <= 0) throw std::invalid_argument("ring: fsr_ghz must be > 0");
        if (linewidth_fwhm_mhz <= 0) throw std::invalid_argument("ring: linewidth_fwhm_mhz must be > 0");
        if (linewidth_fwhm_thz() / fsr_thz() >= 0.01)
            throw std::invalid_argument("ring: linewidth must be well below the FSR (ratio < 0.01)");
        if (n_sidebands < 1) throw std::invalid_argument("ring: n_sidebands must be >= 1");
        if (min_sideband < 1) throw std::invalid_argument("ring: min_sideband must be >= 1");
        if (auto* ex = std::get_if<ExplicitWeights>(&weight_model)) {
            if (static_cast<int>(ex->weights.size()) != n_sidebands)
                throw std::invalid_argument("ring: explicit weight list length must equal n_sidebands");
        } else if (auto* lr = std::get_if<LorentzianRolloff>(&weight_model)) {
            if (lr->scale <= 0) throw std::invalid_argument("ring: rolloff scale must be > 0");
        }
    }
};

/// Normalized sideband powers w_k, indexed k = first_k .. first_k + size - 1.
struct SidebandWeights {
    int first_k = 2;
    std::vector<double> w;

    int size() const { return static_cast<int>(w.size()); }
    int last_k() const { return first_k + size() - 1; }
    bool contains(int k) const { return k >= first_k && k <= last_k(); }
    double at(int k) const { return w[static_cast<std::size_t>(k - first_k)]; }
    double& at(int k) { return w[static_cast<std::size_t>(k - first_k)]; }

    void validate() const {
        if (w.empty()) throw std::invalid_argument("weights: empty list");
        double sum = 0.0;
        for (double x : w) {
            if (x < 0) throw std::invalid_argument("weights: negative entry");
            sum += x;
        }
        if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("weights: sum must be 1 within 1e-12");
    }
};

/// Absolute (signal, idler) frequencies of sideband pair k.  Sign of k picks
/// which of the two is on the high-frequency side; k = 0 is the pump
/// resonance itself.  The pair always sums to exactly twice the pump
/// frequency, also in floating point.
inline std::pair<double, double> resonance_frequencies(const RingParams& params, int k) {
    if (k != 0 && std::abs(k) < params.min_sideband)
        throw std::invalid_argument("resonance_frequencies: sideband index " + std::to_string(k) +
                                    " falls inside the filtered band (|k| < " +
                                    std::to_string(params.min_sideband) + ")");
    const double nu_p = params.pump_frequency_thz();
    if (k == 0) return {nu_p, nu_p};
    // Compute the upper frequency first, then get the lower one by exact
    // Sterbenz subtraction from 2*nu_p so the pair sum is exact.
    const double upper = nu_p + std::abs(k) * params.fsr_thz();
    const double lower = 2.0 * nu_p - upper;
    return k > 0 ? std::make_pair(upper, lower) : std::make_pair(lower, upper);
}

/// Lorentzian field amplitude of one resonance at ordinary-frequency
/// detuning (THz): Gamma / (Gamma + i*2*pi*detuning), unity on resonance.
inline std::complex<double> lineshape(const RingParams& params, double detuning_thz) {
    const double gamma = params.gamma_rad_per_ps();
    const double omega = kTwoPi * detuning_thz;
    return std::complex<double>(gamma, 0.0) / std::complex<double>(gamma, omega);
}

inline SidebandWeights sideband_weights(const RingParams& params) {
    params.validate();
    SidebandWeights out;
    out.first_k = params.min_sideband;
    out.w.resize(static_cast<std::size_t>(params.n_sidebands));
    std::visit(
        [&](const auto& model) {
            using T = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<T, FlatWeights>) {
                std::fill(out.w.begin(), out.w.end(), 1.0);
            } else if constexpr (std::is_same_v<T, LorentzianRolloff>) {
                for (int i = 0; i < params.n_sidebands; ++i) {
                    double k = params.min_sideband + i;
                    double r = k / model.scale;
                    out.w[static_cast<std::size_t>(i)] = 1.0 / (1.0 + r * r * r * r);
                }
            } else {
                for (double x : model.weights)
                    if (x < 0) throw std::invalid_argument("weights: negative entry in explicit list");
                out.w = model.weights;
            }
        },
        params.weight_model);
    double sum = std::accumulate(out.w.begin(), out.w.end(), 0.0);
    if (sum <= 0) throw std::invalid_argument("weights: total weight must be positive");
    for (double& x : out.w) x /= sum;
    return out;
}

/// Pulse-shaper equalization: attenuation only, so every kept sideband is
/// pulled down to the weakest member of the subset and everything else is
/// blocked; the result is renormalized.
inline SidebandWeights equalize_weights(const SidebandWeights& weights, const std::vector<int>& subset) {
    if (subset.empty()) throw std::invalid_argument("equalize_weights: empty subset");
    double min_w = std::numeric_limits<double>::infinity();
    for (int k : subset) {
        if (!weights.contains(k))
            throw std::invalid_argument("equalize_weights: index " + std::to_string(k) + " outside weight range");
        min_w = std::min(min_w, weights.at(k));
    }
    if (min_w <= 0) throw std::invalid_argument("equalize_weights: subset contains a zero weight");
    SidebandWeights out;
    out.first_k = weights.first_k;
    out.w.assign(weights.w.size(), 0.0);
    for (int k : subset) out.at(k) = min_w;
    double sum = std::accumulate(out.w.begin(), out.w.end(), 0.0);
    for (double& x : out.w) x /= sum;
    return out;
}

}  // namespace bfc
