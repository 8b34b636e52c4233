#include "globalnull/theory.hpp"

#include "globalnull/normal.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>

namespace globalnull {

namespace {

constexpr double infinity = std::numeric_limits<double>::infinity();
constexpr double panel_tolerance = 1e-11;
constexpr double required_relative_accuracy = 1e-8;
constexpr std::size_t sup_grid_points = 1024;
constexpr double golden_tolerance = 1e-10;

void check_n(double n) {
    if (!(n >= 2.0) || !std::isfinite(n)) throw std::domain_error("n must be finite and at least 2");
}

void check_delta(double delta) {
    if (!(delta >= 0.0 && delta <= 1.0)) throw std::domain_error("delta must lie in [0, 1]");
}

// Panel edges on [0, inf) for an integrand whose normal-tail factor switches
// on around `kink` over a width `width`, against a density of unit scale.
std::vector<double> panel_edges(double kink, double width) {
    std::vector<double> edges{0.0, 1.0, 4.0};
    if (std::isfinite(kink)) {
        for (double k: {-8.0, -2.0, 0.0, 2.0, 8.0}) edges.push_back(kink + k * width);
        // Geometric edges resolve the density's own scale even when the
        // switch-on region is wider than its distance from the origin.
        for (double x = 16.0; x < kink + 8.0 * width; x *= 4.0) edges.push_back(x);
    }
    std::erase_if(edges, [](double x) { return !(x >= 0.0) || !std::isfinite(x); });
    std::sort(edges.begin(), edges.end());
    std::vector<double> out;
    for (double x: edges) {
        if (out.empty() || x > out.back() * (1.0 + 1e-12) + 1e-300) out.push_back(x);
    }
    return out;
}

template <typename F>
double integrate_half_line(F&& f, const std::vector<double>& edges) {
    using Integrator = boost::math::quadrature::gauss_kronrod<double, 31>;
    double total = 0.0;
    double error = 0.0;
    auto panel = [&](double a, double b) {
        double err = 0.0;
        total += Integrator::integrate(f, a, b, 15, panel_tolerance, &err);
        error += err;
    };
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) panel(edges[i], edges[i + 1]);
    // [a, inf) through theta = a / s: the tail decays on the scale of a
    // itself, and polynomial tails become bounded integrands on (0, 1].
    const double a = edges.back();
    if (a > 0.0) {
        double err = 0.0;
        total += Integrator::integrate(
            [&](double s) { return s > 0.0 ? f(a / s) * a / (s * s) : 0.0; }, 0.0, 1.0, 15, panel_tolerance, &err);
        error += err;
    } else {
        panel(a, infinity);
    }
    if (!std::isfinite(total) || error > required_relative_accuracy * total + 1e-300) {
        throw NumericalError("tail quadrature did not reach the requested accuracy");
    }
    return total;
}

} // namespace

double exceedance_level(double n, double delta) {
    check_n(n);
    check_delta(delta);
    return std::sqrt(2.0 * delta * std::log(n));
}

double tail_probability(const GFamily& family, double sigma, double n, double delta, TailSide side) {
    const double level = exceedance_level(n, delta);
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw std::domain_error("sigma must be finite and >= 0");

    auto two_sided = [level](double mu) { return normal_upper_tail(level - mu) + normal_upper_tail(level + mu); };
    auto one_sided = [level](double mu) { return normal_upper_tail(level - mu); };

    if (family.kind() == FamilyKind::PointMass || sigma == 0.0) {
        const double mu = family.kind() == FamilyKind::PointMass ? sigma : 0.0;
        return side == TailSide::TwoSided ? two_sided(mu) : one_sided(mu);
    }

    if (family.kind() == FamilyKind::ChiSquared1) {
        // Theta = U^2 with U half-normal removes the density singularity at 0.
        const double kink = std::sqrt(level / sigma);
        const double width = kink > 0.0 ? 1.0 / (2.0 * sigma * kink) : 1.0;
        const auto edges = panel_edges(kink, width);
        auto weight = [](double u) { return 2.0 * normal_pdf(u); };
        if (side == TailSide::TwoSided) {
            return integrate_half_line([&](double u) { return two_sided(sigma * u * u) * weight(u); }, edges);
        }
        return integrate_half_line([&](double u) { return one_sided(sigma * u * u) * weight(u); }, edges);
    }

    // Symmetric families: the two-sided integrand is even in theta, and the
    // one-sided probability is exactly half of the two-sided one.
    const auto edges = panel_edges(level / sigma, 1.0 / sigma);
    const double folded =
        integrate_half_line([&](double theta) { return two_sided(sigma * theta) * family.pdf(theta); }, edges);
    return side == TailSide::TwoSided ? 2.0 * folded : folded;
}

TailExponent tau_quadrature(const GFamily& family, double sigma, double n, double delta, TailSide side) {
    const double p = tail_probability(family, sigma, n, delta, side);
    return {std::log(p) / std::log(n), TailMethod::Quadrature};
}

double scaled_log_tail_rate(const GFamily& family, double sigma, double theta) {
    if (!(sigma > 0.0)) throw std::domain_error("sigma must be positive");
    const double x = theta / sigma;
    return -std::max(family.log_upper_tail(x), family.log_cdf(-x));
}

TailExponent tau_sup_approx(const GFamily& family, double sigma, double n, double delta) {
    const double level = exceedance_level(n, delta);
    const double log_n = std::log(n);

    if (family.kind() == FamilyKind::PointMass) {
        // Q_n is 0 below sigma and infinite above; the sup sits at t = sigma / T.
        const double t = level > 0.0 ? std::min(1.0, sigma / level) : 1.0;
        return {-delta * (1.0 - t) * (1.0 - t), TailMethod::SupApproximation};
    }

    auto objective = [&](double t) {
        return -scaled_log_tail_rate(family, sigma, t * level) / log_n - delta * (1.0 - t) * (1.0 - t);
    };

    const double step = 1.0 / static_cast<double>(sup_grid_points - 1);
    std::size_t best_k = 0;
    double best = -infinity;
    for (std::size_t k = 0; k < sup_grid_points; ++k) {
        const double value = objective(static_cast<double>(k) * step);
        if (value > best) {
            best = value;
            best_k = k;
        }
    }

    double lo = best_k > 0 ? static_cast<double>(best_k - 1) * step : 0.0;
    double hi = best_k + 1 < sup_grid_points ? static_cast<double>(best_k + 1) * step : 1.0;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = objective(x1);
    double f2 = objective(x2);
    while (hi - lo > golden_tolerance) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = objective(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = objective(x1);
        }
    }
    best = std::max({best, f1, f2});
    return {best, TailMethod::SupApproximation};
}

SandwichResult tail_sandwich(const GFamily& family, double sigma, double n, double delta) {
    const double log_n = std::log(n);
    SandwichResult r;
    r.log_probability = std::log(tail_probability(family, sigma, n, delta));
    r.log_envelope = log_n * tau_sup_approx(family, sigma, n, delta).tau;
    r.log_lower = r.log_envelope - std::log(3.0 * std::sqrt(2.0 * log_n));
    r.log_upper = r.log_envelope + std::log(4.0 * log_n + 4.0);
    r.holds = r.log_lower <= r.log_probability && r.log_probability <= r.log_upper;
    return r;
}

bool tail_sandwich_check(const GFamily& family, double sigma, double n, double delta) {
    return tail_sandwich(family, sigma, n, delta).holds;
}

double scale_parameter(const ScaleRule& rule) {
    return std::visit(
        [](const auto& s) -> double {
            if constexpr (std::is_same_v<std::decay_t<decltype(s)>, scale::PowerLaw>) return s.rho;
            else return s.r;
        },
        rule);
}

LambdaCurve lambda_curve(const GFamily& family, const ScaleRule& scale, double n, double beta,
                         std::span<const double> deltas, TailSide side) {
    if (!(beta > 0.0 && beta <= 1.0)) throw std::domain_error("lambda_curve: beta must lie in (0, 1]");
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] > 0.0 && deltas[i] <= 1.0)) throw std::domain_error("lambda_curve: deltas must lie in (0, 1]");
        if (i > 0 && !(deltas[i] > deltas[i - 1])) throw std::domain_error("lambda_curve: deltas must ascend");
    }
    const double sigma = sigma_n(scale, n);
    LambdaCurve curve;
    curve.n = n;
    curve.beta = beta;
    curve.family = family.name();
    curve.r = scale_parameter(scale);
    for (double delta: deltas) {
        const double tau = tau_quadrature(family, sigma, n, delta, side).tau;
        curve.deltas.push_back(delta);
        curve.tau.push_back(tau);
        curve.lambda.push_back(1.0 - beta + tau);
        curve.reference.push_back((1.0 - delta) / 2.0);
    }
    return curve;
}

LambdaCurve lambda_curve(const AlternativeModel& model, std::span<const double> deltas) {
    model.validate();
    return lambda_curve(model.family, model.scale, static_cast<double>(model.n), model.beta, deltas);
}

void write_lambda_csv(std::ostream& os, const LambdaCurve& curve) {
    const auto old_precision = os.precision(17);
    os << "delta,lambda,reference,n,beta,family,r\n";
    for (std::size_t i = 0; i < curve.deltas.size(); ++i) {
        os << curve.deltas[i] << ',' << curve.lambda[i] << ',' << curve.reference[i] << ',' << curve.n << ','
           << curve.beta << ',' << curve.family << ',' << curve.r << '\n';
    }
    os.precision(old_precision);
}

double critical_sparsity(const TailClass& tail) {
    return std::visit(
        [](const auto& c) -> double {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, tail_class::Polynomial>) {
                if (!(c.nu > 0.0)) throw std::domain_error("polynomial tail: nu must be positive");
                if (!(c.rho > -1.0 / (2.0 * c.nu))) {
                    throw std::domain_error("polynomial tail: the growth rate must satisfy rho > -1/(2 nu)");
                }
                return c.nu * c.rho + 1.0;
            } else if constexpr (std::is_same_v<T, tail_class::Exponential>) {
                constexpr double bound = std::numbers::sqrt2 / (std::numbers::sqrt2 - 1.0);
                if (!(c.r > bound)) throw std::domain_error("exponential tail: r must exceed sqrt(2)/(sqrt(2) - 1)");
                return (1.0 - 1.0 / c.r) * (1.0 - 1.0 / c.r);
            } else {
                if (!(c.r > 1.0)) throw std::domain_error("Gaussian tail: r must exceed 1");
                return c.r * c.r / (c.r * c.r + 1.0);
            }
        },
        tail);
}

double asymptotic_max_power(double tail_constant, double nu, double r, double alpha) {
    if (!(tail_constant > 0.0) || !(nu > 0.0) || !(r >= 0.0)) {
        throw std::domain_error("asymptotic_max_power: need C > 0, nu > 0, r >= 0");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("asymptotic_max_power: alpha must lie in (0, 1)");
    if (r == 0.0) return alpha;
    return -std::expm1(std::log1p(-alpha) - 2.0 * tail_constant * std::pow(r, nu));
}

CounterexampleThresholds counterexample_thresholds(int min_m) {
    if (min_m > 0) throw std::invalid_argument("counterexample_thresholds: min_m must be <= 0");
    CounterexampleThresholds out{infinity, infinity, 0, 0};
    for (int m = 0; m >= min_m; --m) {
        const double s = 0.2 * std::pow(3.0, m);
        const double max_test = (1.0 - std::sqrt(1.0 - (0.52 + s))) / s;
        const double hc = std::sqrt(0.02 + s) / s;
        if (max_test < out.r_max_test) {
            out.r_max_test = max_test;
            out.m_max_test = m;
        }
        if (hc < out.r_hc) {
            out.r_hc = hc;
            out.m_hc = m;
        }
    }
    return out;
}

} // namespace globalnull
