#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "bfc/biphoton_state.hpp"
#include "bfc/rng.hpp"

namespace bfc {

struct SourceConfig {
    double pair_rate_hz = 1e6;  // aggregate over all sidebands
    double duration_s = 1.0;
    uint64_t seed = 1;

    double duration_ps() const { return ps_from_s(duration_s); }

    void validate() const {
        if (pair_rate_hz <= 0) throw std::invalid_argument("source: pair_rate_hz must be > 0");
        if (duration_s <= 0) throw std::invalid_argument("source: duration_s must be > 0");
    }
};

struct GateConfig {
    double period_ps = 0.0;
    double width_ps = 0.0;

    void validate() const {
        if (period_ps <= 0) throw std::invalid_argument("gate: period_ps must be > 0");
        if (width_ps <= 0) throw std::invalid_argument("gate: width_ps must be > 0");
        if (width_ps > period_ps) throw std::invalid_argument("gate: width_ps must not exceed period_ps");
    }
};

struct ChannelConfig {
    double efficiency = 1.0;
    double dark_rate_hz = 0.0;
    double jitter_sigma_ps = 0.0;  // Gaussian RMS
    std::optional<GateConfig> gate;

    void validate() const {
        if (efficiency < 0 || efficiency > 1) throw std::invalid_argument("channel: efficiency must be in [0,1]");
        if (dark_rate_hz < 0) throw std::invalid_argument("channel: dark_rate_hz must be >= 0");
        if (jitter_sigma_ps < 0) throw std::invalid_argument("channel: jitter_sigma_ps must be >= 0");
        if (gate) gate->validate();
    }
};

enum class Channel : uint8_t { signal = 0, idler = 1 };
enum class TruthKind : uint8_t { pair = 0, dark = 1 };

/// One emitted pair with its ground-truth annotations.  detuning_thz is the
/// ordinary-frequency offset of the signal photon from its resonance center
/// (the idler sits at the opposite offset, by energy conservation), and
/// tau_rel_ps is the signal-minus-idler emission delay.
struct PairEvent {
    double emission_ps = 0.0;
    int k = 0;
    double detuning_thz = 0.0;
    double tau_rel_ps = 0.0;
    uint64_t id = 0;
};

struct TimeTag {
    double time_ps = 0.0;
    Channel channel = Channel::signal;
    TruthKind truth = TruthKind::dark;
    int k = 0;                  // 0 for dark counts
    double detuning_thz = 0.0;  // 0 for dark counts
    uint64_t pair_id = 0;
};

inline bool operator==(const TimeTag& a, const TimeTag& b) {
    return a.time_ps == b.time_ps && a.channel == b.channel && a.truth == b.truth && a.k == b.k &&
           a.detuning_thz == b.detuning_thz && a.pair_id == b.pair_id;
}

namespace detail {

// Fixed block length of the emission process.  Blocks are statistically
// independent and each owns an RNG stream keyed by its index, so the merged
// stream does not depend on how blocks are distributed over workers.
inline constexpr double kPairBlock_ps = 1e9;  // 1 ms

inline void generate_block(const BiphotonState& state, const SourceConfig& src,
                           const std::vector<double>& weight_cdf, uint64_t block,
                           std::vector<PairEvent>& out) {
    const double rate_per_ps = src.pair_rate_hz * 1e-12;
    const double start = static_cast<double>(block) * kPairBlock_ps;
    const double end = std::min(start + kPairBlock_ps, src.duration_ps());
    const double gamma = state.params.gamma_rad_per_ps();
    const double detuning_hwhm_thz = state.params.linewidth_fwhm_thz() / 2.0;
    Rng rng(derive_seed(src.seed, rng_domain::pair_blocks, block));
    double t = start;
    for (;;) {
        t += rng.exponential(rate_per_ps);
        if (t >= end) break;
        PairEvent ev;
        ev.emission_ps = t;
        ev.k = state.weights.first_k + static_cast<int>(rng.discrete(weight_cdf));
        ev.detuning_thz = rng.cauchy(detuning_hwhm_thz);
        double mag = rng.exponential(2.0 * gamma);
        ev.tau_rel_ps = rng.bernoulli(0.5) ? mag : -mag;
        out.push_back(ev);
    }
}

}  // namespace detail

/// Poisson pair emission over the run: each pair carries its sideband index
/// (sampled from the weights), a Lorentzian spectral detuning and a
/// two-sided-exponential relative delay.  Output is identical for any
/// n_workers >= 1.
inline std::vector<PairEvent> generate_pairs(const BiphotonState& state, const SourceConfig& src,
                                             unsigned n_workers = 1) {
    state.validate();
    src.validate();
    if (n_workers == 0) throw std::invalid_argument("generate_pairs: n_workers must be >= 1");
    std::vector<double> cdf(state.weights.w.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < cdf.size(); ++i) {
        acc += state.weights.w[i];
        cdf[i] = acc;
    }
    const uint64_t n_blocks =
        static_cast<uint64_t>(std::ceil(src.duration_ps() / detail::kPairBlock_ps));
    std::vector<std::vector<PairEvent>> per_block(n_blocks);
    if (n_workers == 1 || n_blocks <= 1) {
        for (uint64_t b = 0; b < n_blocks; ++b)
            detail::generate_block(state, src, cdf, b, per_block[b]);
    } else {
        std::vector<std::thread> pool;
        unsigned workers = std::min<unsigned>(n_workers, static_cast<unsigned>(n_blocks));
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w]() {
                for (uint64_t b = w; b < n_blocks; b += workers)
                    detail::generate_block(state, src, cdf, b, per_block[b]);
            });
        }
        for (auto& th : pool) th.join();
    }
    std::vector<PairEvent> merged;
    std::size_t total = 0;
    for (const auto& blk : per_block) total += blk.size();
    merged.reserve(total);
    for (const auto& blk : per_block) merged.insert(merged.end(), blk.begin(), blk.end());
    for (std::size_t i = 0; i < merged.size(); ++i) merged[i].id = i;
    return merged;
}

/// Detector model for one arm: Bernoulli efficiency, half the relative delay
/// applied with the channel's sign, Gaussian jitter, an independent dark
/// Poisson process, optional periodic gating.  Tags outside [0, duration]
/// are dropped; output is time sorted.
inline std::vector<TimeTag> detect(const std::vector<PairEvent>& pairs, Channel which,
                                   const ChannelConfig& cfg, double duration_ps, uint64_t seed) {
    cfg.validate();
    if (duration_ps <= 0) throw std::invalid_argument("detect: duration_ps must be > 0");
    const double half_sign = (which == Channel::signal) ? 0.5 : -0.5;
    std::vector<TimeTag> tags;
    Rng rng(derive_seed(seed, rng_domain::detect, static_cast<uint64_t>(which)));
    for (const auto& p : pairs) {
        if (!rng.bernoulli(cfg.efficiency)) continue;
        double t = p.emission_ps + half_sign * p.tau_rel_ps;
        if (cfg.jitter_sigma_ps > 0) t += cfg.jitter_sigma_ps * rng.gaussian();
        if (t < 0 || t > duration_ps) continue;
        tags.push_back(TimeTag{t, which, TruthKind::pair, p.k, p.detuning_thz, p.id});
    }
    if (cfg.dark_rate_hz > 0) {
        Rng dark_rng(derive_seed(seed, rng_domain::dark, static_cast<uint64_t>(which)));
        const double rate_per_ps = cfg.dark_rate_hz * 1e-12;
        double t = 0.0;
        for (;;) {
            t += dark_rng.exponential(rate_per_ps);
            if (t >= duration_ps) break;
            tags.push_back(TimeTag{t, which, TruthKind::dark, 0, 0.0, 0});
        }
    }
    if (cfg.gate) {
        const GateConfig g = *cfg.gate;
        std::erase_if(tags, [&](const TimeTag& tag) {
            return std::fmod(tag.time_ps, g.period_ps) >= g.width_ps;
        });
    }
    std::sort(tags.begin(), tags.end(), [](const TimeTag& a, const TimeTag& b) {
        if (a.time_ps != b.time_ps) return a.time_ps < b.time_ps;
        return a.pair_id < b.pair_id;
    });
    return tags;
}

/// Drops tags falling outside the periodic gate windows.  Useful when a
/// transformation (e.g. dispersion) has to happen between detection and
/// gating.
inline std::vector<TimeTag> apply_gate(const std::vector<TimeTag>& tags, const GateConfig& gate) {
    gate.validate();
    std::vector<TimeTag> out;
    out.reserve(tags.size());
    for (const auto& tag : tags)
        if (std::fmod(tag.time_ps, gate.period_ps) < gate.width_ps) out.push_back(tag);
    return out;
}

/// Bernoulli thinning of a tag stream (extra loss elements, attenuators).
inline std::vector<TimeTag> bernoulli_thin(const std::vector<TimeTag>& tags, double survive_prob,
                                           uint64_t seed) {
    if (survive_prob < 0 || survive_prob > 1)
        throw std::invalid_argument("bernoulli_thin: probability must be in [0,1]");
    Rng rng(derive_seed(seed, rng_domain::thinning, 0));
    std::vector<TimeTag> out;
    out.reserve(tags.size());
    for (const auto& tag : tags)
        if (rng.bernoulli(survive_prob)) out.push_back(tag);
    return out;
}

}  // namespace bfc
