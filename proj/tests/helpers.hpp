#pragma once

// Test-only oracles, independent of the library implementation paths they
// cross-check: quadrature Fourier transforms, brute-force pair counting,
// Kolmogorov-Smirnov statistics, closed-form kernels and a cubic
// eigenvalue solver.

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "bfc/constants.hpp"
#include "bfc/correlator.hpp"
#include "bfc/event_engine.hpp"

namespace oracle {

// |FT of the Lorentzian intensity profile|^2 by Simpson quadrature: the
// coincidence profile that temporal_correlation claims in closed form.
inline double coincidence_profile_by_quadrature(double gamma_rad_per_ps, double tau_ps) {
    const double omega_max = 2000.0 * gamma_rad_per_ps;
    const int n = 200000;  // even
    const double h = omega_max / n;
    auto integrand = [&](double omega) {
        const double lorentzian =
            gamma_rad_per_ps * gamma_rad_per_ps / (gamma_rad_per_ps * gamma_rad_per_ps + omega * omega);
        return lorentzian * std::cos(omega * tau_ps);
    };
    double sum = integrand(0.0) + integrand(omega_max);
    for (int i = 1; i < n; ++i) sum += integrand(i * h) * (i % 2 ? 4.0 : 2.0);
    const double psi = sum * h / 3.0;  // one-sided integral; full FT = 2*psi
    return psi * psi;                  // squared amplitude, normalization left to the caller
}

// O(n^2) reference for cross_correlate: identical binning rule, every pair
// inspected.
inline std::vector<double> brute_force_histogram(const std::vector<bfc::TimeTag>& signal,
                                                 const std::vector<bfc::TimeTag>& idler,
                                                 double bin_width_ps, double range_ps) {
    const auto n_bins = static_cast<std::size_t>(std::llround(2.0 * range_ps / bin_width_ps));
    std::vector<double> counts(n_bins, 0.0);
    for (const auto& s : signal) {
        for (const auto& i : idler) {
            const double d = s.time_ps - i.time_ps;
            const auto bin = static_cast<std::ptrdiff_t>(std::floor((d + range_ps) / bin_width_ps));
            if (bin >= 0 && bin < static_cast<std::ptrdiff_t>(n_bins)) counts[static_cast<std::size_t>(bin)] += 1.0;
        }
    }
    return counts;
}

// One-sample KS statistic against a cdf functor.
template <typename Cdf>
double ks_statistic(std::vector<double> samples, Cdf cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
    }
    return d;
}

// Two-sample KS statistic.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
    }
    return d;
}

// Dirichlet kernel |sin(N x)/(N sin x)| with the removable singularities
// patched: the closed form the envelope should reduce to for equal weights.
inline double dirichlet_kernel(int n, double x) {
    const double s = std::sin(x);
    if (std::abs(s) < 1e-9) {
        // near x = m*pi both sin terms vanish; limit is +-1
        return 1.0;
    }
    return std::abs(std::sin(n * x) / (n * s));
}

// Eigenvalues of a symmetric 3x3 matrix by the trigonometric solution of
// the characteristic cubic, descending.
inline std::vector<double> symmetric3_eigenvalues(const double m[3][3]) {
    const double p1 = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
    const double q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
    if (p1 == 0.0) {
        std::vector<double> eig = {m[0][0], m[1][1], m[2][2]};
        std::sort(eig.begin(), eig.end(), std::greater<>());
        return eig;
    }
    const double p2 = (m[0][0] - q) * (m[0][0] - q) + (m[1][1] - q) * (m[1][1] - q) +
                      (m[2][2] - q) * (m[2][2] - q) + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    double b[3][3];
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) b[r][c] = (m[r][c] - (r == c ? q : 0.0)) / p;
    const double det_b = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) -
                         b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
                         b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    const double r = std::clamp(det_b / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double e1 = q + 2.0 * p * std::cos(phi);
    const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * bfc::kPi / 3.0);
    const double e2 = 3.0 * q - e1 - e3;
    std::vector<double> eig = {e1, e2, e3};
    std::sort(eig.begin(), eig.end(), std::greater<>());
    return eig;
}

// Best-fit fringe period: dense scan of the sinusoid least-squares residual
// over candidate angular frequencies, refined by parabolic interpolation.
inline double fit_period(const std::vector<double>& t, const std::vector<double>& y, double omega_guess) {
    auto residual = [&](double omega) {
        double m[3][3] = {};
        double rhs[3] = {};
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double basis[3] = {1.0, std::cos(omega * t[i]), std::sin(omega * t[i])};
            for (int r = 0; r < 3; ++r) {
                rhs[r] += basis[r] * y[i];
                for (int c = 0; c < 3; ++c) m[r][c] += basis[r] * basis[c];
            }
        }
        const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        if (std::abs(det) < 1e-30) return 1e300;
        double p[3];
        // Cramer
        double mm[3][3];
        for (int col = 0; col < 3; ++col) {
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c) mm[r][c] = (c == col) ? rhs[r] : m[r][c];
            const double d = mm[0][0] * (mm[1][1] * mm[2][2] - mm[1][2] * mm[2][1]) -
                             mm[0][1] * (mm[1][0] * mm[2][2] - mm[1][2] * mm[2][0]) +
                             mm[0][2] * (mm[1][0] * mm[2][1] - mm[1][1] * mm[2][0]);
            p[col] = d / det;
        }
        double ss = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double model = p[0] + p[1] * std::cos(omega * t[i]) + p[2] * std::sin(omega * t[i]);
            ss += (y[i] - model) * (y[i] - model);
        }
        return ss;
    };

    const int n_grid = 2001;
    double best_omega = omega_guess;
    double best_res = 1e300;
    for (int i = 0; i < n_grid; ++i) {
        const double omega = omega_guess * (0.95 + 0.10 * static_cast<double>(i) / (n_grid - 1));
        const double res = residual(omega);
        if (res < best_res) {
            best_res = res;
            best_omega = omega;
        }
    }
    const double h = omega_guess * 0.10 / (n_grid - 1);
    const double rl = residual(best_omega - h), rc = best_res, rr = residual(best_omega + h);
    const double denom = rl - 2.0 * rc + rr;
    if (denom > 0) best_omega += 0.5 * h * (rl - rr) / denom;
    return bfc::kTwoPi / best_omega;
}

}  // namespace oracle
