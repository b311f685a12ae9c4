#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "bfc/constants.hpp"

namespace bfc {

// Stream derivation: every stochastic stage draws from its own engine whose
// seed is mixed from (user seed, domain tag, stream index).  Splitting work
// into blocks/cells therefore never changes the numbers a given stream
// produces, which is what makes runs byte-reproducible under parallelism.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t seed, uint64_t domain, uint64_t index) {
    return splitmix64(splitmix64(seed ^ splitmix64(domain)) ^ index);
}

// RNG stream domains (arbitrary distinct tags).
namespace rng_domain {
inline constexpr uint64_t pair_blocks = 0x01;
inline constexpr uint64_t detect = 0x02;
inline constexpr uint64_t dark = 0x03;
inline constexpr uint64_t jsi_cell = 0x04;
inline constexpr uint64_t franson = 0x05;
inline constexpr uint64_t dispersion = 0x06;
inline constexpr uint64_t thinning = 0x07;
}  // namespace rng_domain

// mt19937_64 with hand-rolled output distributions.  The engine's output
// sequence is fixed by the standard and the samplers below avoid the
// implementation-defined std::*_distribution, so identical seeds give
// identical streams on any platform.
class Rng {
  public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // rate in events per unit time
    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

    double gaussian() {
        // Box-Muller, no caching: draw consumption stays fixed per call.
        double u1 = 1.0 - uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    }

    double cauchy(double scale) { return scale * std::tan(kPi * (uniform() - 0.5)); }

    // Samples an index from a cumulative weight table (last entry = total).
    std::size_t discrete(const std::vector<double>& cdf) {
        double u = uniform() * cdf.back();
        std::size_t lo = 0, hi = cdf.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (cdf[mid] <= u)
                lo = mid + 1;
            else
                hi = mid;
        }
        return lo;
    }

  private:
    std::mt19937_64 eng_;
};

}  // namespace bfc
