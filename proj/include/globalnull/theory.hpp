#pragma once

#include "globalnull/distributions.hpp"

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace globalnull {

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Two-sided counts |X| > T, matching the tests; one-sided counts X > T.
enum class TailSide { TwoSided, OneSided };
enum class TailMethod { Quadrature, SupApproximation };

// tau = log_n of the probability that one non-null observation exceeds
// sqrt(2 delta log n). Never positive.
struct TailExponent {
    double tau = 0.0;
    TailMethod method = TailMethod::Quadrature;
};

// The exceedance level sqrt(2 delta log n).
double exceedance_level(double n, double delta);

// P(|X| > T) (or P(X > T)) for X = mu + Z, mu ~ sigma * Theta, Theta ~ family,
// by adaptive Gauss-Kronrod quadrature of the normal tail against the
// density, split at the kinks of the integrand and mapped to an infinite
// final panel. Target relative accuracy 1e-8; throws NumericalError when the
// error estimate misses it. n may exceed the integer range.
double tail_probability(const GFamily& family, double sigma, double n, double delta,
                        TailSide side = TailSide::TwoSided);

TailExponent tau_quadrature(const GFamily& family, double sigma, double n, double delta,
                            TailSide side = TailSide::TwoSided);

// Q_n(theta) = -max{log(1 - G_n(theta)), log G_n(-theta)} with G_n(x) = G(x / sigma).
double scaled_log_tail_rate(const GFamily& family, double sigma, double theta);

// sup over t in [0, 1] of -Q_n(t T)/log n - delta (1 - t)^2: a 1024-point grid
// followed by golden-section refinement to 1e-10 in t around the best grid
// point. The point mass is evaluated in closed form.
TailExponent tau_sup_approx(const GFamily& family, double sigma, double n, double delta);

struct SandwichResult {
    double log_probability = 0.0; // quadrature (direct for the point mass)
    double log_envelope = 0.0;    // log n * tau_sup_approx
    double log_lower = 0.0;       // log_envelope - log(3 sqrt(2 log n))
    double log_upper = 0.0;       // log_envelope + log(4 log n + 4)
    bool holds = false;
};

// E / (3 sqrt(2 log n)) <= P(|X| > T) <= (4 log n + 4) E with E = n^tau_sup.
SandwichResult tail_sandwich(const GFamily& family, double sigma, double n, double delta);
bool tail_sandwich_check(const GFamily& family, double sigma, double n, double delta);

struct LambdaCurve {
    std::vector<double> deltas;
    std::vector<double> lambda;    // 1 - beta + tau
    std::vector<double> tau;
    std::vector<double> reference; // (1 - delta) / 2
    double n = 0.0;
    double beta = 0.0;
    std::string family;
    double r = 0.0;
};

// The log_n expected count of non-null exceedances, against the (1 - delta)/2
// reference. deltas must be ascending in (0, 1].
LambdaCurve lambda_curve(const GFamily& family, const ScaleRule& scale, double n, double beta,
                         std::span<const double> deltas, TailSide side = TailSide::TwoSided);
LambdaCurve lambda_curve(const AlternativeModel& model, std::span<const double> deltas);

// delta, lambda, reference, n, beta, family, r; floats at 17 significant digits.
void write_lambda_csv(std::ostream& os, const LambdaCurve& curve);

// The r (or rho) parameter of a scale rule.
double scale_parameter(const ScaleRule& rule);

namespace tail_class {
// Density Theta(theta^-(nu+1)) with sigma_n ~ n^rho.
struct Polynomial { double nu; double rho; };
// Density Theta(e^-theta) with sigma_n = r / sqrt(2 log n).
struct Exponential { double r; };
// Density Theta(e^-(theta - c)^2 / 2) with sigma_n = r.
struct Gaussian { double r; };
} // namespace tail_class

using TailClass = std::variant<tail_class::Polynomial, tail_class::Exponential, tail_class::Gaussian>;

// Critical sparsity level: nu rho + 1, (1 - 1/r)^2, r^2 / (r^2 + 1).
// Throws std::domain_error outside rho > -1/(2 nu), r > sqrt2/(sqrt2 - 1), r > 1.
double critical_sparsity(const TailClass& tail);

// Limiting max-test power 1 - exp(-2 C r^nu + log(1 - alpha)) for tails
// P(|Theta| > x) ~ 2 C x^-nu at the critical polynomial scaling.
double asymptotic_max_power(double tail_constant, double nu, double r, double alpha);

// Detection thresholds in r for the three-adic counterexample with
// exponential-type tail at beta = 0.52, scanning integer m in [min_m, 0]:
//   max test: min_m (1 - sqrt(1 - (0.52 + 0.2 * 3^m))) / (0.2 * 3^m)
//   HC:       min_m sqrt(0.02 + 0.2 * 3^m) / (0.2 * 3^m)
struct CounterexampleThresholds {
    double r_max_test = 0.0;
    double r_hc = 0.0;
    int m_max_test = 0;
    int m_hc = 0;
};

CounterexampleThresholds counterexample_thresholds(int min_m = -60);

} // namespace globalnull
