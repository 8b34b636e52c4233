#include "globalnull/statistics.hpp"

#include "globalnull/normal.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace globalnull {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double p_floor = 1e-300;

// Every |x| at or above this has a two-sided p-value above 1/2 excluded;
// 0.67 sits safely below the exact cut 0.6744897...
constexpr double half_pvalue_abs_cut = 0.67;

double hc_term(std::size_t i, double p, double n) {
    const double pc = std::clamp(p, p_floor, 1.0 - p_floor);
    return std::sqrt(n) * (static_cast<double>(i) / n - pc) / std::sqrt(pc * (1.0 - pc));
}

double normalized_excess(double count, double t, double n) {
    return std::sqrt(n) * (count / n - t) / std::sqrt(t * (1.0 - t));
}

} // namespace

std::string_view to_string(TestKind kind) {
    switch (kind) {
    case TestKind::Max: return "max";
    case TestKind::HC: return "hc";
    case TestKind::ModifiedHC: return "mhc";
    case TestKind::BerkJones: return "bj";
    case TestKind::ChiSquare: return "chisq";
    case TestKind::Hybrid: return "hybrid";
    }
    return "unknown";
}

TestKind parse_test_kind(std::string_view name) {
    for (TestKind kind: all_tests) {
        if (to_string(kind) == name) return kind;
    }
    if (name == "chi2" || name == "chisquare") return TestKind::ChiSquare;
    if (name == "berk-jones") return TestKind::BerkJones;
    throw std::invalid_argument("unknown test '" + std::string(name) + "'");
}

PValueVector::PValueVector(std::vector<double> sorted): p_(std::move(sorted)) {
    for (std::size_t i = 0; i < p_.size(); ++i) {
        if (!(p_[i] >= 0.0 && p_[i] <= 1.0)) throw std::invalid_argument("p-values must lie in [0, 1]");
        if (i > 0 && p_[i] < p_[i - 1]) throw std::invalid_argument("p-values must be sorted ascending");
    }
}

PValueVector pvalues(std::span<const double> x) {
    std::vector<double> p(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::isnan(x[i])) throw std::domain_error("pvalues: NaN input");
        p[i] = two_sided_pvalue(x[i]);
    }
    std::stable_sort(p.begin(), p.end());
    return PValueVector(std::move(p));
}

double stat_max(std::span<const double> x) {
    if (x.empty()) throw std::domain_error("stat_max: empty vector");
    double m = 0.0;
    for (double v: x) m = std::max(m, std::fabs(v));
    return m;
}

// Squares are added exactly into one integer bin per binary exponent, so the
// result does not depend on the order of x (permutation invariance is exact).
double stat_chisq(std::span<const double> x) {
    constexpr int bins = 2047;
    thread_local std::array<__int128, bins> acc{};
    int lo = bins, hi = -1;
    bool nan = false, infinite = false;
    for (double v: x) {
        const double sq = v * v;
        const auto bits = std::bit_cast<std::uint64_t>(sq);
        const int e = static_cast<int>(bits >> 52);
        if (e == 2047) {
            nan |= std::isnan(sq);
            infinite = true;
            continue;
        }
        std::uint64_t mant = bits & ((std::uint64_t{1} << 52) - 1);
        if (e > 0) mant |= std::uint64_t{1} << 52;
        const int b = std::max(e, 1);
        acc[b] += mant;
        lo = std::min(lo, b);
        hi = std::max(hi, b);
    }
    long double s = 0.0L;
    for (int b = lo; b <= hi; ++b) {
        if (acc[b] != 0) s += std::ldexp(static_cast<long double>(acc[b]), b - 1075);
        acc[b] = 0;
    }
    if (nan) return std::numeric_limits<double>::quiet_NaN();
    if (infinite) return inf;
    return static_cast<double>(s);
}

bool hybrid_reject(std::span<const double> x, double m_half, double c_half) {
    return stat_max(x) > m_half || stat_chisq(x) > c_half;
}

namespace detail {

double hc_from_prefix(std::span<const double> p, std::size_t n) {
    const std::size_t half = n / 2;
    if (half == 0) return -inf;
    const double nd = static_cast<double>(n);
    double best = -inf;
    for (std::size_t i = 1; i <= half; ++i) {
        if (p[i - 1] == 0.0) return inf;
        best = std::max(best, hc_term(i, p[i - 1], nd));
    }
    return best;
}

double mhc_from_prefix(std::span<const double> p, std::size_t n) {
    const double nd = static_cast<double>(n);
    const double lo = 1.0 / nd;
    if (lo > 0.5) return -inf;
    const auto below_lo = std::upper_bound(p.begin(), p.end(), lo) - p.begin();
    double best = normalized_excess(static_cast<double>(below_lo), lo, nd);
    std::size_t i = static_cast<std::size_t>(below_lo);
    while (i < p.size() && p[i] <= 0.5) {
        // F_n jumps at p[i]; include every tie.
        std::size_t j = i + 1;
        while (j < p.size() && p[j] == p[i]) ++j;
        best = std::max(best, normalized_excess(static_cast<double>(j), p[i], nd));
        i = j;
    }
    return best;
}

double bj_from_prefix(std::span<const double> p, std::size_t n) {
    if (n < 2) throw std::domain_error("stat_bj: n must be at least 2");
    const double nd = static_cast<double>(n);
    double best = 0.0;
    for (std::size_t k = 1; k <= n / 2; ++k) {
        const double pk = p[k - 1];
        if (pk == 0.0 || pk == 1.0) return inf;
        const double a = static_cast<double>(k) / nd;
        double kl = a * std::log(a / pk) + (1.0 - a) * (std::log1p(-a) - std::log1p(-pk));
        kl = std::max(kl, 0.0);
        best = std::max(best, std::sqrt(2.0 * nd * kl));
    }
    return best;
}

} // namespace detail

double stat_hc(const PValueVector& p) {
    return detail::hc_from_prefix(p.values(), p.size());
}

double stat_mhc(const PValueVector& p) {
    return detail::mhc_from_prefix(p.values(), p.size());
}

double stat_bj(const PValueVector& p) {
    return detail::bj_from_prefix(p.values(), p.size());
}

double StatisticValues::get(TestKind kind) const {
    switch (kind) {
    case TestKind::Max: return max;
    case TestKind::HC: return hc;
    case TestKind::ModifiedHC: return mhc;
    case TestKind::BerkJones: return bj;
    case TestKind::ChiSquare: return chisq;
    case TestKind::Hybrid: break;
    }
    throw std::invalid_argument("the hybrid test has no scalar statistic");
}

void StatisticMask::require(TestKind kind) {
    switch (kind) {
    case TestKind::Max: max = true; break;
    case TestKind::HC: hc = true; break;
    case TestKind::ModifiedHC: mhc = true; break;
    case TestKind::BerkJones: bj = true; break;
    case TestKind::ChiSquare: chisq = true; break;
    case TestKind::Hybrid: max = chisq = true; break;
    }
}

StatisticValues StatisticsWorkspace::compute(std::span<const double> x, const StatisticMask& mask) {
    const std::size_t n = x.size();
    if (n == 0) throw std::domain_error("statistics: empty vector");
    StatisticValues out;
    out.chisq = stat_chisq(x);
    if (std::isnan(out.chisq)) throw std::domain_error("statistics: NaN input");
    out.max = stat_max(x);
    if (!mask.needs_pvalues()) return out;

    abs_.resize(n);
    std::size_t above_cut = 0;
    for (std::size_t i = 0; i < n; ++i) {
        abs_[i] = std::fabs(x[i]);
        above_cut += abs_[i] >= half_pvalue_abs_cut;
    }
    const std::size_t m = std::min(n, std::max(n / 2, above_cut));
    if (m < n) {
        std::nth_element(abs_.begin(), abs_.begin() + static_cast<std::ptrdiff_t>(m), abs_.end(),
                         std::greater<>());
    }
    prefix_.resize(m);
    for (std::size_t i = 0; i < m; ++i) prefix_[i] = two_sided_pvalue(abs_[i]);
    std::sort(prefix_.begin(), prefix_.end());

    if (mask.hc) out.hc = detail::hc_from_prefix(prefix_, n);
    if (mask.mhc) out.mhc = detail::mhc_from_prefix(prefix_, n);
    if (mask.bj && n >= 2) out.bj = detail::bj_from_prefix(prefix_, n);
    return out;
}

} // namespace globalnull
