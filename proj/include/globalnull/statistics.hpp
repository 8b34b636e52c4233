#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace globalnull {

enum class TestKind { Max, HC, ModifiedHC, BerkJones, ChiSquare, Hybrid };

inline constexpr std::array<TestKind, 6> all_tests{TestKind::Max,       TestKind::HC,
                                                   TestKind::ModifiedHC, TestKind::BerkJones,
                                                   TestKind::ChiSquare, TestKind::Hybrid};

// "max", "hc", "mhc", "bj", "chisq", "hybrid".
std::string_view to_string(TestKind kind);
TestKind parse_test_kind(std::string_view name);

// Sorted two-sided p-values p_i = 2 * (1 - Phi(|x_i|)).
class PValueVector {
public:
    PValueVector() = default;
    // Validates: ascending, every entry in [0, 1]. Throws std::invalid_argument.
    explicit PValueVector(std::vector<double> sorted);

    std::span<const double> values() const { return p_; }
    std::size_t size() const { return p_.size(); }
    double operator[](std::size_t i) const { return p_[i]; }

private:
    std::vector<double> p_;
};

// Throws std::domain_error on NaN input.
PValueVector pvalues(std::span<const double> x);

// max |x_i|. Throws std::domain_error when x is empty.
double stat_max(std::span<const double> x);

// Higher criticism over order statistics 1 <= i <= floor(n/2):
//   max_i sqrt(n) (i/n - p_(i)) / sqrt(p_(i) (1 - p_(i))).
// A zero p-value saturates to +inf; otherwise p is clamped to
// [1e-300, 1 - 1e-300]. Returns -inf when n < 2 (no admissible index).
double stat_hc(const PValueVector& p);

// Modified HC: sup over t in [1/n, 1/2] of sqrt(n)(F_n(t) - t)/sqrt(t(1-t)).
// Between jumps of F_n the objective decreases for t < 1/2, so the sup is
// attained at t = 1/n or at a p-value inside [1/n, 1/2].
double stat_mhc(const PValueVector& p);

// Berk-Jones: max over 1 <= k <= floor(n/2) of sqrt(2n KL(k/n || p_(k))),
// binary KL without a sidedness restriction. Throws std::domain_error for n < 2.
double stat_bj(const PValueVector& p);

// sum x_i^2.
double stat_chisq(std::span<const double> x);

// max|x| > m_half or sum x^2 > c_half, both thresholds calibrated at alpha/2.
bool hybrid_reject(std::span<const double> x, double m_half, double c_half);

// The same statistics evaluated on the m smallest p-values of an n-vector,
// sorted ascending. Exact as long as the prefix holds at least floor(n/2)
// values and every p-value <= 1/2.
namespace detail {
double hc_from_prefix(std::span<const double> sorted_prefix, std::size_t n);
double mhc_from_prefix(std::span<const double> sorted_prefix, std::size_t n);
double bj_from_prefix(std::span<const double> sorted_prefix, std::size_t n);
} // namespace detail

struct StatisticValues {
    double max = 0.0;
    double hc = 0.0;
    double mhc = 0.0;
    double bj = 0.0;
    double chisq = 0.0;

    // Scalar statistic for a test kind; Hybrid has none and throws.
    double get(TestKind kind) const;
};

// Which scalar statistics a caller needs; rank statistics share one sort.
struct StatisticMask {
    bool max = false;
    bool hc = false;
    bool mhc = false;
    bool bj = false;
    bool chisq = false;

    static StatisticMask all() { return {true, true, true, true, true}; }
    void require(TestKind kind);
    bool needs_pvalues() const { return hc || mhc || bj; }
};

// Reusable scratch space for repeated evaluation on vectors of one size.
// Produces values bit-identical to the free functions above, but only sorts
// the part of the p-value vector the rank statistics can see.
class StatisticsWorkspace {
public:
    StatisticValues compute(std::span<const double> x, const StatisticMask& mask);

private:
    std::vector<double> abs_;
    std::vector<double> prefix_;
};

} // namespace globalnull
