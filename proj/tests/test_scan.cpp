#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "episcan/error.hpp"
#include "episcan/innovations.hpp"
#include "episcan/kernels.hpp"
#include "episcan/rng.hpp"
#include "episcan/scan.hpp"
#include "oracles.hpp"

using namespace episcan;
using Catch::Approx;

namespace {

std::vector<double> random_vector(std::uint64_t seed, std::size_t n, int family) {
    const StreamId id = derive_stream(seed, n, StreamRole::Auxiliary);
    switch (family % 4) {
        case 0: return sample_innovations(Gaussian{1.0}, n, id);
        case 1: return sample_innovations(SymmetricPareto{2.5, 0.3}, n, id);
        case 2: return sample_innovations(StudentT{3.0}, n, id);
        default: {
            Stream rng(id);
            std::vector<double> v(n);
            for (double& x : v) x = 100.0 * rng.uniform_signed() + 7.0;
            return v;
        }
    }
}

// Integer vector whose sum is divisible by n, so the mean and every
// centring term are exact and all implementations must agree bit for bit.
std::vector<double> integer_fixture(std::uint64_t seed, std::size_t n) {
    Stream rng(derive_stream(seed, n, StreamRole::Auxiliary));
    std::vector<double> v(n);
    long long sum = 0;
    for (double& x : v) {
        x = static_cast<double>(static_cast<long long>(rng.next_u64() % 41) - 20);
        sum += static_cast<long long>(x);
    }
    const long long rem = ((sum % static_cast<long long>(n)) + static_cast<long long>(n)) % static_cast<long long>(n);
    v.back() -= static_cast<double>(rem);
    return v;
}

}  // namespace

TEST_CASE("scan statistic on the unit impulse matches exhaustive enumeration", "[scan]") {
    const std::vector<double> x{1, 0, 0, 0};
    const auto oracle = oracles::enumerate_windows(x, 0.0, 0);
    CHECK(oracle.value == 0.75);
    CHECK(oracle.k == 0);
    CHECK(oracle.ell == 1);

    const ScanResult r = scan_statistic(x, 0.0, 0);
    CHECK(r.value == 0.75);
    CHECK(r.k_hat == 0);
    CHECK(r.ell_hat == 1);
    CHECK(r.alpha == 0.0);
    CHECK(r.k_min == 0);
}

TEST_CASE("constant input gives a zero statistic", "[scan]") {
    for (double c : {0.0, 1.0, -3.5, 0.1, 1e6}) {
        const std::vector<double> x(37, c);
        for (double alpha : {0.0, 0.25, 0.6}) {
            const ScanResult r = scan_statistic(x, alpha, 0);
            CHECK(r.value <= 1e-12 * std::max(1.0, std::abs(c)));
        }
    }
    // Dyadic constants are exact.
    CHECK(scan_statistic(std::vector<double>(64, 0.5), 0.3, 0).value == 0.0);
}

TEST_CASE("indicator input attains the half-amplitude lower bound", "[scan]") {
    std::vector<double> x(16, 0.0);
    for (std::size_t j = 5; j < 9; ++j) x[j] = 1.0;
    const ScanResult r = scan_statistic(x, 0.5, 0);
    CHECK(r.value >= 0.5 * 1.0 * std::pow(4.0, 0.5));
    // The epidemic window itself: 4 - 4 * 4/16 = 3, weighted by 4^-0.5.
    CHECK(r.value == Approx(1.5));
    CHECK(r.k_hat == 5);
    CHECK(r.ell_hat == 4);
}

TEST_CASE("domain errors", "[scan]") {
    const std::vector<double> empty;
    const std::vector<double> x{1.0, 2.0};
    CHECK_THROWS_AS(scan_statistic(empty, 0.0), DomainError);
    CHECK_THROWS_AS(scan_statistic(x, -0.1), DomainError);
    CHECK_THROWS_AS(scan_statistic(x, 1.0), DomainError);
    CHECK_THROWS_AS(scan_statistic(x, 0.0, 2), DomainError);
    CHECK_THROWS_AS(holder_norm_polygonal(empty, 0.0), DomainError);
    const std::vector<double> bad{1.0, std::nan("")};
    CHECK_THROWS_AS(scan_statistic(bad, 0.0), DomainError);
}

TEST_CASE("prefix-sum kernels equal the triple-loop oracle exactly for n <= 64", "[scan][oracle]") {
    for (std::size_t n = 1; n <= 64; ++n) {
        const auto x = integer_fixture(11, n);
        for (std::size_t k_min : {0u, 1u}) {
            for (double alpha : {0.0, 0.1, 0.25, 0.4, 0.75}) {
                const auto oracle = oracles::enumerate_windows(x, alpha, k_min);
                for (Execution exec : {Execution::Reference, Execution::Vectorized, Execution::Parallel}) {
                    const ScanResult r = scan_statistic(x, alpha, k_min, exec);
                    INFO("n=" << n << " k_min=" << k_min << " alpha=" << alpha);
                    REQUIRE(r.value == oracle.value);
                    if (oracle.value > 0.0) {
                        REQUIRE(r.ell_hat == oracle.ell);
                        REQUIRE(r.k_hat == oracle.k);
                    }
                }
            }
        }
    }
}

TEST_CASE("triple-loop oracle agrees on real-valued inputs", "[scan][oracle]") {
    for (std::size_t n = 2; n <= 64; n += 3) {
        const auto x = random_vector(5, n, static_cast<int>(n));
        for (double alpha : {0.0, 0.25, 0.4}) {
            const auto oracle = oracles::enumerate_windows(x, alpha, 0);
            const ScanResult r = scan_statistic(x, alpha, 0);
            CHECK(r.value == Approx(oracle.value).epsilon(1e-12).margin(1e-13));
        }
    }
}

TEST_CASE("kernel variants are bit-identical", "[scan][kernels]") {
    for (std::size_t n : {1u, 2u, 3u, 17u, 256u, 1000u}) {
        const auto x = random_vector(3, n, static_cast<int>(n));
        std::vector<double> q(n + 1);
        kernels::centred_prefix(x, q);
        std::vector<std::size_t> scales(n);
        for (std::size_t i = 0; i < n; ++i) scales[i] = i + 1;
        for (std::size_t k_min : {0u, 1u}) {
            std::vector<double> ref(n), simd(n), par(n);
            kernels::scale_maxima_reference(q, k_min, scales, ref);
            kernels::scale_maxima_simd(q, k_min, scales, simd);
            kernels::scale_maxima_parallel(q, k_min, scales, par);
            CHECK(ref == simd);
            CHECK(ref == par);
        }
    }
}

TEST_CASE("Hoelder norm of the bridge polygon equals n^alpha times the statistic", "[scan][oracle]") {
    // 500 random vectors, mixed distributions, n in [2, 300].
    Stream pick(derive_stream(2024, 0, StreamRole::Auxiliary));
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
        const std::size_t n = 2 + static_cast<std::size_t>(pick.next_u64() % 299);
        const auto x = random_vector(100 + static_cast<std::uint64_t>(i), n, i);
        for (double alpha : {0.0, 0.1, 0.25, 0.4}) {
            const double holder = holder_norm_polygonal(x, alpha);
            const double scaled = std::pow(static_cast<double>(n), alpha) * scan_statistic(x, alpha, 0).value;
            const double rel = std::abs(holder - scaled) / std::max(holder, 1e-300);
            worst = std::max(worst, rel);
        }
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("alpha = 0 Hoelder norm is the sup of the bridge vertices' oscillation", "[scan]") {
    const std::vector<double> x{1, 0, 0, 0};
    CHECK(holder_norm_polygonal(x, 0.0) == Approx(0.75).epsilon(1e-15));
    CHECK(holder_norm_polygonal(x, 0.5) == Approx(2.0 * 0.75).epsilon(1e-14));
}

TEST_CASE("shift invariance, homogeneity, alpha monotonicity", "[scan][property]") {
    for (int i = 0; i < 60; ++i) {
        const std::size_t n = 5 + static_cast<std::size_t>(i) * 7;
        const auto x = random_vector(77 + static_cast<std::uint64_t>(i), n, i);
        for (std::size_t k_min : {0u, 1u}) {
            const double base0 = scan_statistic(x, 0.0, k_min).value;
            const double base25 = scan_statistic(x, 0.25, k_min).value;

            for (double c : {-1000.0, 3.7, 250.0}) {
                std::vector<double> shifted(x);
                for (double& v : shifted) v += c;
                const double s = scan_statistic(shifted, 0.25, k_min).value;
                CHECK(std::abs(s - base25) <= 1e-10 * std::max(1.0, base25));
            }
            for (double lambda : {-2.0, 0.5, 3.0}) {
                std::vector<double> scaled(x);
                for (double& v : scaled) v *= lambda;
                CHECK(scan_statistic(scaled, 0.25, k_min).value == Approx(std::abs(lambda) * base25).epsilon(1e-12));
            }
            CHECK(base25 <= base0);
            CHECK(scan_statistic(x, 0.4, k_min).value <= base25);
        }
        // Windows starting at k = 0 can only add candidates.
        CHECK(scan_statistic(x, 0.25, 1).value <= scan_statistic(x, 0.25, 0).value);
    }
}

TEST_CASE("ties resolve to the smallest scale, then the smallest start", "[scan]") {
    // Alternating signs: every odd-length window has the same |sum|.
    const std::vector<double> x{1, -1, 1, -1, 1, -1, 1, -1};
    const ScanResult r = scan_statistic(x, 0.0, 0);
    const auto oracle = oracles::enumerate_windows(x, 0.0, 0);
    CHECK(r.value == 1.0);
    CHECK(r.ell_hat == 1);
    CHECK(r.k_hat == 0);
    CHECK(oracle.ell == 1);
    CHECK(oracle.k == 0);
    const ScanResult r1 = scan_statistic(x, 0.0, 1);
    CHECK(r1.k_hat == 1);
}

TEST_CASE("one profile serves every alpha", "[scan]") {
    const auto x = random_vector(9, 500, 0);
    const auto profile = ScaleProfile::exact(x, 0);
    for (double alpha : {0.0, 0.1, 0.33, 0.9}) {
        const ScanResult a = profile.evaluate(alpha);
        const ScanResult b = scan_statistic(x, alpha, 0);
        CHECK(a.value == b.value);
        CHECK(a.k_hat == b.k_hat);
        CHECK(a.ell_hat == b.ell_hat);
    }
}

TEST_CASE("restricted scales give a labelled lower bound", "[scan]") {
    const auto grid = geometric_scales(1000, 1.5);
    CHECK(grid.front() == 1);
    CHECK(grid.back() == 1000);
    CHECK(std::is_sorted(grid.begin(), grid.end()));
    CHECK(std::adjacent_find(grid.begin(), grid.end()) == grid.end());
    CHECK_THROWS_AS(geometric_scales(10, 1.0), DomainError);

    const auto x = random_vector(4, 1000, 1);
    for (double alpha : {0.0, 0.4}) {
        const ScanResult exact = scan_statistic(x, alpha, 0);
        const ScanResult approx = scan_statistic_restricted(x, alpha, 1.5, 0);
        CHECK_FALSE(approx.exact);
        CHECK(exact.exact);
        CHECK(approx.value <= exact.value);
        // ratio barely above 1 enumerates every scale
        CHECK(scan_statistic_restricted(x, alpha, 1.0000001, 0).value == exact.value);
    }
}

TEST_CASE("normalised statistic", "[scan]") {
    CHECK(normalized_statistic(2.0, 0.0, LightTail{1.0, 4}) == Approx(1.0));
    CHECK(normalized_statistic(5.0, 0.3, HeavyTail{10.0}) == Approx(0.5));
    CHECK(normalized_statistic(3.0, 0.25, LightTail{2.0, 16}) == Approx(0.75));
    CHECK_THROWS_AS(normalized_statistic(1.0, 0.0, LightTail{0.0, 4}), DomainError);
    CHECK_THROWS_AS(normalized_statistic(1.0, 0.0, HeavyTail{-1.0}), DomainError);

    const std::vector<double> x{1, 0, 0, 0};
    CHECK(normalized_statistic(x, 0.0, LightTail{1.0, 4}) == Approx(0.375));
}
