#include "globalnull/normal.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace globalnull {

namespace {
constexpr double inv_sqrt2 = 0.70710678118654752440;
constexpr double log_sqrt_2pi = 0.91893853320467274178;
} // namespace

double normal_upper_tail(double x) {
    return 0.5 * std::erfc(x * inv_sqrt2);
}

double two_sided_pvalue(double x) {
    return std::erfc(std::fabs(x) * inv_sqrt2);
}

double log_normal_upper_tail(double x) {
    if (x < 35.0) {
        return std::log(normal_upper_tail(x));
    }
    // Asymptotic series; truncation error below 1e-13 relative for x >= 35.
    const double z = 1.0 / (x * x);
    const double series = 1.0 - z * (1.0 - 3.0 * z * (1.0 - 5.0 * z * (1.0 - 7.0 * z)));
    return -0.5 * x * x - log_sqrt_2pi - std::log(x) + std::log(series);
}

double normal_upper_quantile(double q) {
    if (!(q > 0.0 && q < 1.0)) {
        throw std::domain_error("normal_upper_quantile: q must lie in (0, 1)");
    }
    return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * q);
}

double normal_pdf(double x) {
    return std::exp(-0.5 * x * x - log_sqrt_2pi);
}

} // namespace globalnull
