#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <stdexcept>
#include <vector>

#include "bfc/correlator.hpp"
#include "bfc/jsi_matrix.hpp"

namespace bfc {

struct SchmidtResult {
    std::vector<double> coefficients;  // descending, sum 1
    double schmidt_number = 1.0;       // K = 1 / sum(lambda^2)
    double effective_bits = 0.0;       // log2(K)
};

namespace detail {

/// One-sided Jacobi singular values of a small square matrix (row-major).
/// Columns are orthogonalized by plane rotations until the off-diagonal
/// Frobenius mass of A^T A drops below tol; singular values are the final
/// column norms.
inline std::vector<double> jacobi_singular_values(std::vector<double> a, std::size_t n,
                                                  double tol = 1e-12) {
    auto col_dot = [&](std::size_t p, std::size_t q) {
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r) s += a[r * n + p] * a[r * n + q];
        return s;
    };
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off_mass = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double g = col_dot(p, q);
                off_mass += 2.0 * g * g;
            }
        if (std::sqrt(off_mass) < tol) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double app = col_dot(p, p);
                const double aqq = col_dot(q, q);
                const double apq = col_dot(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double zeta = (aqq - app) / (2.0 * apq);
                const double tan_t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + tan_t * tan_t);
                const double s = c * tan_t;
                for (std::size_t r = 0; r < n; ++r) {
                    const double vp = a[r * n + p];
                    const double vq = a[r * n + q];
                    a[r * n + p] = c * vp - s * vq;
                    a[r * n + q] = s * vp + c * vq;
                }
            }
        }
    }
    std::vector<double> sigma(n);
    for (std::size_t p = 0; p < n; ++p) sigma[p] = std::sqrt(col_dot(p, p));
    std::sort(sigma.begin(), sigma.end(), std::greater<>());
    return sigma;
}

}  // namespace detail

/// Schmidt decomposition of a measured JSI.  The joint amplitude is taken
/// as the elementwise square root with zero phases, which is what makes the
/// resulting K a lower bound on the true Schmidt number: intensity
/// measurements carry no phase information, and any nonzero phases could
/// only raise K.
inline SchmidtResult schmidt_decompose(const JsiMatrix& jsi) {
    if (jsi.k_hi < jsi.k_lo || jsi.values.size() != jsi.dim() * jsi.dim())
        throw std::invalid_argument("schmidt: matrix is not square over its range");
    const std::size_t n = jsi.dim();
    std::vector<double> amplitude(n * n);
    double total = 0.0;
    bool clamped = false;
    for (std::size_t i = 0; i < n * n; ++i) {
        double v = jsi.values[i];
        if (v < 0) {
            v = 0.0;
            clamped = true;
        }
        amplitude[i] = std::sqrt(v);
        total += v;
    }
    if (clamped) std::cerr << "schmidt: negative JSI entries clamped to zero\n";
    if (total <= 0) throw std::invalid_argument("schmidt: all-zero JSI");
    const double inv_norm = 1.0 / std::sqrt(total);
    for (double& x : amplitude) x *= inv_norm;

    auto sigma = detail::jacobi_singular_values(std::move(amplitude), n);
    SchmidtResult out;
    out.coefficients.reserve(n);
    double sum = 0.0;
    for (double s : sigma) {
        out.coefficients.push_back(s * s);
        sum += s * s;
    }
    for (double& l : out.coefficients) l /= sum;  // remove the last float drift
    double purity = 0.0;
    for (double l : out.coefficients) purity += l * l;
    out.schmidt_number = 1.0 / purity;
    out.effective_bits = std::log2(out.schmidt_number);
    return out;
}

/// Schmidt number of the accidental-stripped JSI: off-diagonal terms are
/// zeroed before decomposing, which for a diagonal amplitude reduces to
/// K = 1 / sum(normalized diagonal squared).
inline SchmidtResult diagonal_schmidt(const JsiMatrix& jsi) {
    JsiMatrix stripped = jsi;
    double diag_total = 0.0;
    for (int ks = jsi.k_lo; ks <= jsi.k_hi; ++ks)
        for (int ki = jsi.k_lo; ki <= jsi.k_hi; ++ki) {
            if (ks != ki)
                stripped.at(ks, ki) = 0.0;
            else
                diag_total += std::max(0.0, stripped.at(ks, ki));
        }
    if (diag_total <= 0) throw std::invalid_argument("diagonal_schmidt: zero diagonal");
    return schmidt_decompose(stripped);
}

struct SchmidtPipelineResult {
    SchmidtResult full;  // K_min: decomposition of the raw measured JSI
    SchmidtResult diag;  // off-diagonals (accidental floor) zeroed first
    JsiMatrix jsi;       // the raw measured matrix
};

/// End-to-end Monte Carlo Schmidt analysis: measure the JSI with
/// accidentals retained (as a real intensity measurement would), then run
/// both decompositions.
inline SchmidtPipelineResult simulate_schmidt_pipeline(const BiphotonState& state, const SourceConfig& src,
                                                       const ChannelConfig& ch_signal,
                                                       const ChannelConfig& ch_idler, int k_lo, int k_hi,
                                                       const TiaConfig& tia, uint64_t seed) {
    SourceConfig run_src = src;
    run_src.seed = seed;
    SchmidtPipelineResult out{
        SchmidtResult{}, SchmidtResult{},
        measure_jsi(state, run_src, ch_signal, ch_idler, k_lo, k_hi, tia, /*subtract_accidentals=*/false)};
    out.full = schmidt_decompose(out.jsi);
    out.diag = diagonal_schmidt(out.jsi);
    return out;
}

}  // namespace bfc
