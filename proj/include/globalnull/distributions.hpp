#pragma once

#include "globalnull/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace globalnull {

enum class FamilyKind { PointMass, Gaussian, Laplace, Cauchy, StudentT, Logistic, ChiSquared1 };

// Standardized distribution G of the non-null means; the non-null means are
// sigma_n * Theta with Theta ~ G. Noise is always standard normal.
//
// Laplace is Laplace(0, 1) with density exp(-|t|) / 2. PointMass is the unit
// point mass, so the means equal sigma_n exactly. ChiSquared1 is supported on
// [0, inf) and produces one-sided signals.
class GFamily {
public:
    static GFamily point_mass() { return GFamily(FamilyKind::PointMass, {}); }
    static GFamily gaussian() { return GFamily(FamilyKind::Gaussian, {}); }
    static GFamily laplace() { return GFamily(FamilyKind::Laplace, {}); }
    static GFamily cauchy() { return GFamily(FamilyKind::Cauchy, {}); }
    static GFamily student_t(double nu) { return GFamily(FamilyKind::StudentT, nu); }
    static GFamily logistic() { return GFamily(FamilyKind::Logistic, {}); }
    static GFamily chi_squared1() { return GFamily(FamilyKind::ChiSquared1, {}); }

    // Throws std::invalid_argument when nu is missing for StudentT, is not
    // positive, or is supplied for any other kind.
    GFamily(FamilyKind kind, std::optional<double> nu);

    FamilyKind kind() const { return kind_; }

    // Tail index: nu for StudentT, 1 for Cauchy, empty otherwise.
    std::optional<double> nu() const;

    bool symmetric() const;

    // Density; PointMass has none and throws std::logic_error.
    double pdf(double theta) const;
    double cdf(double theta) const;
    // P(Theta > theta).
    double upper_tail(double theta) const;
    double log_upper_tail(double theta) const;
    // log P(Theta <= theta); -inf outside the support.
    double log_cdf(double theta) const;

    double sample(PhiloxStream& stream) const;

    // "cauchy", "t3", "laplace", ...
    std::string name() const;

    bool operator==(const GFamily&) const = default;

private:
    FamilyKind kind_;
    double nu_ = 0.0;
};

// Parses "gaussian", "laplace", "cauchy", "t", "t3", "logistic", "chi2",
// "chisq1", "pointmass". A bare "t" needs nu.
GFamily parse_family(std::string_view name, std::optional<double> nu = {});

// P(Theta > theta) for the standardized family.
double g_tail(const GFamily& family, double theta);

namespace scale {
struct Fixed { double r; };
// sqrt(2 r log n): the identical-signal calibration.
struct PointMassSqrt2rLogN { double r; };
// r / sqrt(2 log n): exponential-tail calibration.
struct ExpOverSqrtLog { double r; };
// r sqrt(2 log n) / n^((1 - beta) / nu): polynomial-tail critical scaling.
struct PolyCritical { double r; double beta; double nu; };
// n^rho.
struct PowerLaw { double rho; };
} // namespace scale

using ScaleRule = std::variant<scale::Fixed, scale::PointMassSqrt2rLogN, scale::ExpOverSqrtLog,
                               scale::PolyCritical, scale::PowerLaw>;

// Throws std::domain_error for n < 2 and std::invalid_argument for
// parameters outside their ranges.
double sigma_n(const ScaleRule& rule, double n);

std::string describe(const ScaleRule& rule);

enum class SamplingMode { RandomCount, FixedCount };

struct AlternativeModel {
    std::size_t n = 0;
    double beta = 0.5;
    GFamily family = GFamily::gaussian();
    ScaleRule scale = scale::Fixed{1.0};
    SamplingMode mode = SamplingMode::FixedCount;

    // Throws std::invalid_argument.
    void validate() const;
    double sparsity() const; // n^-beta
    double sigma() const { return sigma_n(scale, static_cast<double>(n)); }
};

// floor(n^(1 - beta)), exact at integer powers.
std::size_t fixed_signal_count(std::size_t n, double beta);

// Writes one draw of X = mu + Z into out (size n). Means come from `signal`,
// noise from `noise`, so the noise of a replicate does not depend on the
// family. Returns the number of non-null coordinates.
std::size_t fill_alternative(const AlternativeModel& model, double sigma, PhiloxStream& signal,
                             PhiloxStream& noise, std::span<double> out);

std::vector<double> sample_alternative(const AlternativeModel& model, std::uint64_t seed);

std::vector<double> sample_null(std::size_t n, std::uint64_t seed);

} // namespace globalnull
