#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "bfc/schmidt.hpp"
#include "helpers.hpp"

using namespace bfc;
using Catch::Approx;

namespace {
JsiMatrix diagonal_jsi(const std::vector<double>& diag) {
    JsiMatrix jsi;
    jsi.k_lo = 2;
    jsi.k_hi = 2 + static_cast<int>(diag.size()) - 1;
    jsi.values.assign(diag.size() * diag.size(), 0.0);
    for (std::size_t i = 0; i < diag.size(); ++i)
        jsi.at(jsi.k_lo + static_cast<int>(i), jsi.k_lo + static_cast<int>(i)) = diag[i];
    return jsi;
}
}  // namespace

TEST_CASE("schmidt decomposition of reference matrices") {
    SECTION("four equal modes give K = 4 exactly") {
        auto result = schmidt_decompose(diagonal_jsi({0.25, 0.25, 0.25, 0.25}));
        REQUIRE(result.schmidt_number == Approx(4.0).margin(1e-12));
        REQUIRE(result.effective_bits == Approx(2.0).margin(1e-12));
    }
    SECTION("diagonal weights 0.4/0.3/0.2/0.1 give K = 10/3") {
        auto result = schmidt_decompose(diagonal_jsi({0.4, 0.3, 0.2, 0.1}));
        REQUIRE(result.schmidt_number == Approx(1.0 / 0.30).margin(1e-12));
    }
    SECTION("a rank-1 outer product is separable") {
        JsiMatrix jsi;
        jsi.k_lo = 2;
        jsi.k_hi = 5;
        const std::vector<double> a = {0.9, 0.5, 0.3, 0.1};
        jsi.values.resize(16);
        for (int ks = 2; ks <= 5; ++ks)
            for (int ki = 2; ki <= 5; ++ki) jsi.at(ks, ki) = a[ks - 2] * a[ki - 2];
        auto result = schmidt_decompose(jsi);
        REQUIRE(result.schmidt_number == Approx(1.0).margin(1e-10));
    }
    SECTION("coefficients descend and sum to one") {
        std::mt19937_64 gen(3);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int trial = 0; trial < 20; ++trial) {
            JsiMatrix jsi;
            jsi.k_lo = 2;
            jsi.k_hi = 6;
            jsi.values.resize(25);
            for (double& v : jsi.values) v = u(gen);
            auto result = schmidt_decompose(jsi);
            double sum = 0.0;
            for (std::size_t i = 0; i < result.coefficients.size(); ++i) {
                REQUIRE(result.coefficients[i] >= -1e-15);
                if (i > 0) REQUIRE(result.coefficients[i] <= result.coefficients[i - 1] + 1e-15);
                sum += result.coefficients[i];
            }
            REQUIRE(sum == Approx(1.0).margin(1e-9));
            REQUIRE(result.schmidt_number >= 1.0 - 1e-12);
            REQUIRE(result.schmidt_number <= 5.0 + 1e-12);
        }
    }
    SECTION("K is invariant under permutations and transposition") {
        std::mt19937_64 gen(5);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        JsiMatrix jsi;
        jsi.k_lo = 2;
        jsi.k_hi = 5;
        jsi.values.resize(16);
        for (double& v : jsi.values) v = u(gen);
        const double k_ref = schmidt_decompose(jsi).schmidt_number;

        JsiMatrix transposed = jsi;
        for (int ks = 2; ks <= 5; ++ks)
            for (int ki = 2; ki <= 5; ++ki) transposed.at(ks, ki) = jsi.at(ki, ks);
        REQUIRE(schmidt_decompose(transposed).schmidt_number == Approx(k_ref).margin(1e-10));

        JsiMatrix permuted = jsi;  // swap rows 2 and 4, columns 3 and 5
        for (int ki = 2; ki <= 5; ++ki) {
            permuted.at(2, ki) = jsi.at(4, ki);
            permuted.at(4, ki) = jsi.at(2, ki);
        }
        JsiMatrix permuted2 = permuted;
        for (int ks = 2; ks <= 5; ++ks) {
            permuted2.at(ks, 3) = permuted.at(ks, 5);
            permuted2.at(ks, 5) = permuted.at(ks, 3);
        }
        REQUIRE(schmidt_decompose(permuted2).schmidt_number == Approx(k_ref).margin(1e-10));
    }
    SECTION("all-zero matrix rejected") {
        REQUIRE_THROWS_AS(schmidt_decompose(diagonal_jsi({0.0, 0.0, 0.0})), std::invalid_argument);
    }
}

TEST_CASE("jacobi singular values match the characteristic-polynomial oracle") {
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> a(9);
        for (double& v : a) v = u(gen);
        auto sigma = detail::jacobi_singular_values(a, 3);
        double ata[3][3];
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k) s += a[k * 3 + r] * a[k * 3 + c];
                ata[r][c] = s;
            }
        auto eig = oracle::symmetric3_eigenvalues(ata);
        for (int i = 0; i < 3; ++i) {
            const double expected = std::sqrt(std::max(0.0, eig[static_cast<std::size_t>(i)]));
            REQUIRE(sigma[static_cast<std::size_t>(i)] == Approx(expected).margin(1e-10));
        }
    }
}

TEST_CASE("diagonal schmidt analysis") {
    SECTION("already-diagonal input matches the full decomposition") {
        auto jsi = diagonal_jsi({0.5, 0.3, 0.2});
        REQUIRE(diagonal_schmidt(jsi).schmidt_number ==
                Approx(schmidt_decompose(jsi).schmidt_number).margin(1e-12));
    }
    SECTION("single occupied mode gives K = 1") {
        REQUIRE(diagonal_schmidt(diagonal_jsi({1.0, 0.0, 0.0, 0.0})).schmidt_number ==
                Approx(1.0).margin(1e-12));
    }
    SECTION("matches the closed-form inverse purity for any diagonal") {
        std::mt19937_64 gen(13);
        std::uniform_real_distribution<double> u(0.01, 1.0);
        for (int trial = 0; trial < 40; ++trial) {
            std::vector<double> d(6);
            double sum = 0.0;
            for (double& x : d) {
                x = u(gen);
                sum += x;
            }
            double purity = 0.0;
            for (double x : d) purity += (x / sum) * (x / sum);
            auto result = schmidt_decompose(diagonal_jsi(d));
            REQUIRE(result.schmidt_number == Approx(1.0 / purity).margin(1e-12));
        }
    }
    SECTION("an off-diagonal accidental floor lowers K below the stripped value") {
        auto jsi = diagonal_jsi({0.35, 0.25, 0.2, 0.12, 0.05, 0.03});
        for (int ks = jsi.k_lo; ks <= jsi.k_hi; ++ks)
            for (int ki = jsi.k_lo; ki <= jsi.k_hi; ++ki)
                if (ks != ki) jsi.at(ks, ki) = 0.004;
        auto full = schmidt_decompose(jsi);
        auto diag = diagonal_schmidt(jsi);
        REQUIRE(diag.schmidt_number > full.schmidt_number);
    }
    SECTION("zero diagonal rejected") {
        JsiMatrix jsi;
        jsi.k_lo = 2;
        jsi.k_hi = 3;
        jsi.values = {0.0, 0.5, 0.5, 0.0};
        REQUIRE_THROWS_AS(diagonal_schmidt(jsi), std::invalid_argument);
    }
}

TEST_CASE("monte carlo schmidt pipeline") {
    RingParams p;
    p.n_sidebands = 4;
    p.weight_model = FlatWeights{};
    auto state = BiphotonState::make(p);
    SourceConfig src{1e5, 1.0, 2};
    ChannelConfig clean{1.0, 0.0, 0.0, std::nullopt};
    TiaConfig tia;

    SECTION("flat noiseless four-mode state measures K near 4") {
        auto result = simulate_schmidt_pipeline(state, src, clean, clean, 2, 5, tia, 7);
        REQUIRE(result.full.schmidt_number == Approx(4.0).margin(0.05));
        REQUIRE(result.diag.schmidt_number == Approx(4.0).margin(0.05));
    }
    SECTION("accidental floor pushes the full K below the diagonal K") {
        ChannelConfig noisy{0.5, 50000.0, 0.0, std::nullopt};
        SourceConfig busy{5e5, 1.0, 2};
        auto result = simulate_schmidt_pipeline(state, busy, noisy, noisy, 2, 5, tia, 7);
        REQUIRE(result.diag.schmidt_number > result.full.schmidt_number);
        REQUIRE(result.full.schmidt_number >= 1.0);
    }
}
