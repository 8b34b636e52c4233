#include "globalnull/normal.hpp"
#include "globalnull/rng.hpp"
#include "globalnull/statistics.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

using namespace globalnull;
using Catch::Approx;

namespace {

std::vector<double> normals(std::size_t n, std::uint64_t rep, double shift = 0.0) {
    PhiloxStream s({99, StreamPurpose::Test, rep, 0});
    std::vector<double> x(n);
    s.fill_normal(x);
    for (std::size_t i = 0; i < std::min<std::size_t>(n, 5); ++i) x[i] += shift;
    return x;
}

// sqrt(n)(F(t) - t)/sqrt(t(1-t)) by brute-force counting, maximized over a
// uniform grid on [lo, hi] plus every observed p-value in that range.
double grid_sup(const std::vector<double>& p, double lo, double hi, int points) {
    const double n = static_cast<double>(p.size());
    auto objective = [&](double t) {
        double count = 0.0;
        for (double v: p) count += v <= t;
        return std::sqrt(n) * (count / n - t) / std::sqrt(t * (1.0 - t));
    };
    double best = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < points; ++k) best = std::max(best, objective(lo + (hi - lo) * k / (points - 1)));
    for (double v: p) {
        if (v >= lo && v <= hi) best = std::max(best, objective(v));
    }
    return best;
}

double kl(double a, double b) {
    double out = 0.0;
    if (a > 0.0) out += a * std::log(a / b);
    if (a < 1.0) out += (1.0 - a) * std::log((1.0 - a) / (1.0 - b));
    return out;
}

} // namespace

TEST_CASE("p-values: examples") {
    CHECK(pvalues(std::vector<double>{0.0})[0] == 1.0);
    CHECK(pvalues(std::vector<double>{1.959964})[0] == Approx(0.05).epsilon(1e-6));
    const auto p = pvalues(std::vector<double>{-3.0, 3.0});
    CHECK(p[0] == p[1]);
    CHECK_THROWS_AS(pvalues(std::vector<double>{1.0, std::nan("")}), std::domain_error);
}

TEST_CASE("p-values: relative accuracy against a 40-digit oracle") {
    // erfc(x / sqrt 2) from mpmath at 40 digits.
    const std::pair<double, double> table[] = {
        {0.5, 0.61707507745197379272},      {1.959964, 0.049999998192884808605},
        {3, 0.0026997960632601890533},      {5, 5.7330314375838782335e-7},
        {8.25, 1.5839452629284954682e-16},  {12, 3.5529642241553579954e-33},
        {20, 5.5072482372124673902e-89},    {30, 9.8134278542963741191e-198},
        {37, 1.1451142445049153645e-299},   {37.5, 9.2107060191639096877e-308},
    };
    for (const auto& [x, p]: table) {
        INFO("x = " << x);
        CHECK(std::abs(two_sided_pvalue(x) / p - 1.0) <= 1e-10);
        CHECK(std::abs(two_sided_pvalue(-x) / p - 1.0) <= 1e-10);
    }
}

TEST_CASE("PValueVector validation") {
    CHECK_THROWS_AS(PValueVector({0.5, 0.2}), std::invalid_argument);
    CHECK_THROWS_AS(PValueVector({0.1, 1.2}), std::invalid_argument);
    CHECK_NOTHROW(PValueVector({0.0, 0.2, 1.0}));
}

TEST_CASE("max statistic") {
    CHECK(stat_max(std::vector<double>{1, -4, 2}) == 4.0);
    CHECK(stat_max(std::vector<double>(7, 0.0)) == 0.0);
    CHECK(stat_max(std::vector<double>{-2.5}) == 2.5);
    CHECK_THROWS_AS(stat_max(std::vector<double>{}), std::domain_error);
}

TEST_CASE("chi-square statistic") {
    CHECK(stat_chisq(std::vector<double>{3}) == 9.0);
    CHECK(stat_chisq(std::vector<double>(4, 0.0)) == 0.0);
    CHECK(stat_chisq(std::vector<double>{1, 1, 1, 1}) == 4.0);
    CHECK(stat_chisq(std::vector<double>{1e200, 1.0}) == std::numeric_limits<double>::infinity());
    CHECK(std::isnan(stat_chisq(std::vector<double>{1.0, std::nan("")})));
    // Cancellation-free: 1e-8 survives next to 1 regardless of order.
    CHECK(stat_chisq(std::vector<double>{1e-4, 1.0, 1e-4}) == 1.0 + 2e-8);
    CHECK(stat_chisq(std::vector<double>{1e-160, 1e-170}) == Approx(1e-320).epsilon(1e-3));
}

TEST_CASE("hybrid rule") {
    const std::vector<double> x{1.0, -2.0, 0.5};
    CHECK_FALSE(hybrid_reject(x, 3.0, 10.0));
    CHECK(hybrid_reject(x, 1.5, 10.0));
    CHECK(hybrid_reject(x, 3.0, 5.0));
}

TEST_CASE("HC examples") {
    const double expected = std::sqrt(2.0) * (0.5 - 0.25) / std::sqrt(0.25 * 0.75);
    CHECK(stat_hc(PValueVector({0.25, 0.8})) == Approx(expected).epsilon(1e-14));
    // The same value from the continuous form on the order-statistic range.
    CHECK(grid_sup({0.25, 0.8}, 0.25, 0.25, 2) == Approx(expected).epsilon(1e-14));

    for (std::size_t n: {2u, 5u, 10u, 101u}) {
        std::vector<double> p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = (i + 1.0) / n;
        CHECK(stat_hc(PValueVector(p)) <= 1e-12);
        CHECK(stat_mhc(PValueVector(p)) <= 1e-12);
        CHECK(stat_bj(PValueVector(p)) == Approx(0.0).margin(1e-7));
    }
    CHECK(stat_hc(PValueVector({0.0, 0.3, 0.6})) == std::numeric_limits<double>::infinity());
    CHECK(stat_hc(PValueVector({0.3})) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("HC equals the continuous sup over its order-statistic range") {
    // For distinct p-values the objective decreases between jumps, so the
    // order-statistic maximum equals the sup over [p_(1), p_(floor(n/2))].
    std::mt19937_64 gen(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + trial % 49;
        std::vector<double> p(n);
        for (double& v: p) v = u(gen) * 0.5;
        std::sort(p.begin(), p.end());
        const double hi = p[n / 2 - 1];
        REQUIRE(std::abs(stat_hc(PValueVector(p)) - grid_sup(p, p[0], hi, trial < 20 ? 100000 : 2000)) <= 1e-9);
    }
}

TEST_CASE("mHC examples and grid oracle") {
    const std::size_t n = 6;
    const double lo = 1.0 / n;
    const double at_lo = std::sqrt(6.0) * (0.0 - lo) / std::sqrt(lo * (1.0 - lo));
    CHECK(stat_mhc(PValueVector({0.6, 0.7, 0.8, 0.85, 0.9, 0.99})) == Approx(at_lo).epsilon(1e-14));

    std::mt19937_64 gen(61);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> p(n);
        for (double& v: p) v = u(gen) * (trial % 2 ? 1.0 : 0.6);
        std::sort(p.begin(), p.end());
        REQUIRE(std::abs(stat_mhc(PValueVector(p)) - grid_sup(p, lo, 0.5, 1000000)) <= 1e-9);
    }
}

TEST_CASE("mHC against HC when the HC maximizer lies in [1/n, 1/2]") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int checked = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t n = 2 + trial % 60;
        std::vector<double> p(n);
        for (double& v: p) v = u(gen);
        std::sort(p.begin(), p.end());
        std::size_t arg = 0;
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i <= n / 2; ++i) {
            const double q = p[i - 1];
            const double term = std::sqrt(double(n)) * (double(i) / n - q) / std::sqrt(q * (1 - q));
            if (term > best) best = term, arg = i;
        }
        const double t = p[arg - 1];
        if (t < 1.0 / n || t > 0.5) continue;
        ++checked;
        REQUIRE(stat_mhc(PValueVector(p)) >= stat_hc(PValueVector(p)) - 1e-12);
        // Range containment holds against the continuous form of HC over
        // (0, 1/2]; the order-statistic form stops at floor(n/2) and can
        // fall below mHC.
        const double continuous_hc = std::max(grid_sup(p, 1e-12, 0.5, 2), grid_sup(p, 1.0 / n, 0.5, 2));
        REQUIRE(stat_mhc(PValueVector(p)) <= continuous_hc + 1e-12);
    }
    CHECK(checked > 500);
}

TEST_CASE("Berk-Jones examples") {
    CHECK(stat_bj(PValueVector({0.1, 0.9})) == Approx(std::sqrt(4.0 * kl(0.5, 0.1))).epsilon(1e-13));
    CHECK(stat_bj(PValueVector({0.0, 0.5})) == std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(stat_bj(PValueVector({0.3})), std::domain_error);

    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 2 + trial % 40;
        std::vector<double> p(n);
        for (double& v: p) v = u(gen);
        std::sort(p.begin(), p.end());
        double expected = 0.0;
        for (std::size_t k = 1; k <= n / 2; ++k) {
            expected = std::max(expected, std::sqrt(2.0 * n * std::max(0.0, kl(double(k) / n, p[k - 1]))));
        }
        const double got = stat_bj(PValueVector(p));
        REQUIRE(got >= 0.0);
        REQUIRE(got == Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("permutation and sign invariance are exact") {
    std::mt19937_64 gen(4);
    for (std::size_t n: {2u, 7u, 50u, 1000u}) {
        auto x = normals(n, n, 3.0);
        StatisticsWorkspace ws;
        const auto base = ws.compute(x, StatisticMask::all());
        for (int k = 0; k < 5; ++k) {
            std::shuffle(x.begin(), x.end(), gen);
            for (double& v: x) {
                if (gen() & 1) v = -v;
            }
            const auto s = ws.compute(x, StatisticMask::all());
            REQUIRE(s.max == base.max);
            REQUIRE(s.hc == base.hc);
            REQUIRE(s.mhc == base.mhc);
            REQUIRE(s.bj == base.bj);
            REQUIRE(s.chisq == base.chisq);
        }
    }
}

TEST_CASE("workspace matches the free functions") {
    StatisticsWorkspace ws;
    for (std::size_t n: {2u, 3u, 10u, 333u, 5000u}) {
        for (double shift: {0.0, 2.0, 6.0, 40.0}) {
            const auto x = normals(n, n + 7, shift);
            const auto s = ws.compute(x, StatisticMask::all());
            const auto p = pvalues(x);
            CHECK(s.max == stat_max(x));
            CHECK(s.hc == stat_hc(p));
            CHECK(s.mhc == stat_mhc(p));
            CHECK(s.bj == stat_bj(p));
            CHECK(s.chisq == stat_chisq(x));
        }
    }
    // All |x| tiny: every p-value above 1/2.
    const std::vector<double> small{0.01, -0.02, 0.03, 0.0};
    const auto s = ws.compute(small, StatisticMask::all());
    CHECK(s.hc == stat_hc(pvalues(small)));
    CHECK(s.mhc == stat_mhc(pvalues(small)));
    CHECK(s.bj == stat_bj(pvalues(small)));
    CHECK_THROWS_AS(ws.compute(std::vector<double>{1.0, std::nan("")}, StatisticMask::all()), std::domain_error);
}

TEST_CASE("monotonicity of max and chi-square") {
    auto x = normals(200, 1);
    for (int k = 0; k < 200; ++k) {
        const double m0 = stat_max(x), c0 = stat_chisq(x);
        const std::size_t i = (k * 37) % x.size();
        x[i] += x[i] >= 0 ? 0.1 : -0.1;
        REQUIRE(stat_max(x) >= m0);
        REQUIRE(stat_chisq(x) >= c0);
    }
}

TEST_CASE("test-kind names round trip") {
    for (TestKind k: all_tests) CHECK(parse_test_kind(to_string(k)) == k);
    CHECK_THROWS(parse_test_kind("ks"));
    StatisticValues v{1, 2, 3, 4, 5};
    CHECK(v.get(TestKind::BerkJones) == 4);
    CHECK_THROWS(v.get(TestKind::Hybrid));
}
