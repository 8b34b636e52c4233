#include "globalnull/distributions.hpp"

#include "globalnull/normal.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace globalnull {

namespace {

constexpr double inv_sqrt2 = 0.70710678118654752440;

// Marsaglia-Tsang; shape < 1 is boosted through Gamma(shape + 1) * U^(1/shape).
double sample_gamma(double shape, PhiloxStream& stream) {
    if (shape < 1.0) {
        const double u = stream.uniform();
        return sample_gamma(shape + 1.0, stream) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double z, v;
        do {
            z = stream.normal();
            v = 1.0 + c * z;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = stream.uniform();
        if (u < 1.0 - 0.0331 * z * z * z * z) return d * v;
        if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double student_upper_tail(double nu, double theta) {
    const boost::math::students_t_distribution<double> dist(nu);
    return boost::math::cdf(boost::math::complement(dist, theta));
}

} // namespace

GFamily::GFamily(FamilyKind kind, std::optional<double> nu): kind_(kind) {
    if (kind == FamilyKind::StudentT) {
        if (!nu || !(*nu > 0.0) || !std::isfinite(*nu)) {
            throw std::invalid_argument("StudentT family needs a positive finite nu");
        }
        nu_ = *nu;
    } else if (nu) {
        throw std::invalid_argument("nu is only accepted for the StudentT family");
    }
}

std::optional<double> GFamily::nu() const {
    if (kind_ == FamilyKind::StudentT) return nu_;
    if (kind_ == FamilyKind::Cauchy) return 1.0;
    return std::nullopt;
}

bool GFamily::symmetric() const {
    return kind_ != FamilyKind::PointMass && kind_ != FamilyKind::ChiSquared1;
}

double GFamily::pdf(double theta) const {
    switch (kind_) {
    case FamilyKind::PointMass: throw std::logic_error("the point mass has no density");
    case FamilyKind::Gaussian: return normal_pdf(theta);
    case FamilyKind::Laplace: return 0.5 * std::exp(-std::fabs(theta));
    case FamilyKind::Cauchy: return 1.0 / (std::numbers::pi * (1.0 + theta * theta));
    case FamilyKind::StudentT: return boost::math::pdf(boost::math::students_t_distribution<double>(nu_), theta);
    case FamilyKind::Logistic: {
        const double e = std::exp(-std::fabs(theta));
        return e / ((1.0 + e) * (1.0 + e));
    }
    case FamilyKind::ChiSquared1:
        return theta <= 0.0 ? 0.0 : std::exp(-0.5 * theta) / std::sqrt(2.0 * std::numbers::pi * theta);
    }
    return 0.0;
}

double GFamily::cdf(double theta) const {
    switch (kind_) {
    case FamilyKind::PointMass: return theta >= 1.0 ? 1.0 : 0.0;
    case FamilyKind::Gaussian: return normal_upper_tail(-theta);
    case FamilyKind::Laplace: return theta < 0.0 ? 0.5 * std::exp(theta) : 1.0 - 0.5 * std::exp(-theta);
    case FamilyKind::Cauchy: return std::atan2(1.0, -theta) / std::numbers::pi;
    case FamilyKind::StudentT: return student_upper_tail(nu_, -theta);
    case FamilyKind::Logistic: return 1.0 / (1.0 + std::exp(-theta));
    case FamilyKind::ChiSquared1: return theta <= 0.0 ? 0.0 : std::erf(std::sqrt(theta) * inv_sqrt2);
    }
    return 0.0;
}

double GFamily::upper_tail(double theta) const {
    switch (kind_) {
    case FamilyKind::PointMass: return theta < 1.0 ? 1.0 : 0.0;
    case FamilyKind::Gaussian: return normal_upper_tail(theta);
    case FamilyKind::Laplace: return theta >= 0.0 ? 0.5 * std::exp(-theta) : 1.0 - 0.5 * std::exp(theta);
    case FamilyKind::Cauchy: return std::atan2(1.0, theta) / std::numbers::pi;
    case FamilyKind::StudentT: return student_upper_tail(nu_, theta);
    case FamilyKind::Logistic: return 1.0 / (1.0 + std::exp(theta));
    case FamilyKind::ChiSquared1: return theta <= 0.0 ? 1.0 : std::erfc(std::sqrt(theta) * inv_sqrt2);
    }
    return 0.0;
}

double GFamily::log_upper_tail(double theta) const {
    switch (kind_) {
    case FamilyKind::Gaussian: return log_normal_upper_tail(theta);
    case FamilyKind::Laplace:
        return theta >= 0.0 ? -theta - std::numbers::ln2 : std::log1p(-0.5 * std::exp(theta));
    case FamilyKind::Logistic:
        return theta > 0.0 ? -theta - std::log1p(std::exp(-theta)) : -std::log1p(std::exp(theta));
    case FamilyKind::ChiSquared1:
        return theta <= 0.0 ? 0.0 : std::numbers::ln2 + log_normal_upper_tail(std::sqrt(theta));
    default: return std::log(upper_tail(theta));
    }
}

double GFamily::log_cdf(double theta) const {
    if (symmetric()) return log_upper_tail(-theta);
    return std::log(cdf(theta));
}

double GFamily::sample(PhiloxStream& stream) const {
    switch (kind_) {
    case FamilyKind::PointMass: return 1.0;
    case FamilyKind::Gaussian: return stream.normal();
    case FamilyKind::Laplace: {
        const double u = stream.uniform() - 0.5;
        return u < 0.0 ? std::log1p(2.0 * u) : -std::log1p(-2.0 * u);
    }
    case FamilyKind::Cauchy: return std::tan(std::numbers::pi * (stream.uniform() - 0.5));
    case FamilyKind::StudentT: {
        const double z = stream.normal();
        const double chi2 = 2.0 * sample_gamma(0.5 * nu_, stream);
        return z / std::sqrt(chi2 / nu_);
    }
    case FamilyKind::Logistic: {
        const double u = stream.uniform();
        return std::log(u) - std::log1p(-u);
    }
    case FamilyKind::ChiSquared1: {
        const double z = stream.normal();
        return z * z;
    }
    }
    return 0.0;
}

std::string GFamily::name() const {
    switch (kind_) {
    case FamilyKind::PointMass: return "pointmass";
    case FamilyKind::Gaussian: return "gaussian";
    case FamilyKind::Laplace: return "laplace";
    case FamilyKind::Cauchy: return "cauchy";
    case FamilyKind::StudentT: {
        std::ostringstream os;
        os << 't' << nu_;
        return os.str();
    }
    case FamilyKind::Logistic: return "logistic";
    case FamilyKind::ChiSquared1: return "chi2";
    }
    return "unknown";
}

GFamily parse_family(std::string_view name, std::optional<double> nu) {
    if (name == "pointmass" || name == "point-mass") return GFamily(FamilyKind::PointMass, nu);
    if (name == "gaussian" || name == "normal") return GFamily(FamilyKind::Gaussian, nu);
    if (name == "laplace") return GFamily(FamilyKind::Laplace, nu);
    if (name == "cauchy") return GFamily(FamilyKind::Cauchy, nu);
    if (name == "logistic") return GFamily(FamilyKind::Logistic, nu);
    if (name == "chi2" || name == "chisq1" || name == "chi2-1") return GFamily(FamilyKind::ChiSquared1, nu);
    if (name == "t" || name == "student-t") return GFamily(FamilyKind::StudentT, nu);
    if (name.size() > 1 && name.front() == 't') {
        if (nu) throw std::invalid_argument("family '" + std::string(name) + "' already fixes nu");
        try {
            std::size_t used = 0;
            const double parsed = std::stod(std::string(name.substr(1)), &used);
            if (used == name.size() - 1) return GFamily::student_t(parsed);
        } catch (const std::logic_error&) {
        }
    }
    throw std::invalid_argument("unknown family '" + std::string(name) + "'");
}

double g_tail(const GFamily& family, double theta) {
    return family.upper_tail(theta);
}

namespace {

void require_nonnegative(double r, const char* what) {
    if (!(r >= 0.0) || !std::isfinite(r)) {
        throw std::invalid_argument(std::string(what) + ": scale parameter must be finite and >= 0");
    }
}

} // namespace

double sigma_n(const ScaleRule& rule, double n) {
    if (!(n >= 2.0)) {
        throw std::domain_error("sigma_n: n must be at least 2");
    }
    const double log_n = std::log(n);
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, scale::Fixed>) {
                require_nonnegative(s.r, "Fixed");
                return s.r;
            } else if constexpr (std::is_same_v<T, scale::PointMassSqrt2rLogN>) {
                require_nonnegative(s.r, "PointMassSqrt2rLogN");
                return std::sqrt(2.0 * s.r * log_n);
            } else if constexpr (std::is_same_v<T, scale::ExpOverSqrtLog>) {
                require_nonnegative(s.r, "ExpOverSqrtLog");
                return s.r / std::sqrt(2.0 * log_n);
            } else if constexpr (std::is_same_v<T, scale::PolyCritical>) {
                require_nonnegative(s.r, "PolyCritical");
                if (!(s.beta > 0.0 && s.beta < 1.0)) throw std::invalid_argument("PolyCritical: beta must lie in (0, 1)");
                if (!(s.nu > 0.0)) throw std::invalid_argument("PolyCritical: nu must be positive");
                return s.r * std::sqrt(2.0 * log_n) * std::exp(-(1.0 - s.beta) / s.nu * log_n);
            } else {
                if (!std::isfinite(s.rho)) throw std::invalid_argument("PowerLaw: rho must be finite");
                return std::exp(s.rho * log_n);
            }
        },
        rule);
}

std::string describe(const ScaleRule& rule) {
    std::ostringstream os;
    os.precision(17);
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, scale::Fixed>) os << "fixed(r=" << s.r << ')';
            else if constexpr (std::is_same_v<T, scale::PointMassSqrt2rLogN>) os << "sqrt2rlogn(r=" << s.r << ')';
            else if constexpr (std::is_same_v<T, scale::ExpOverSqrtLog>) os << "exp-critical(r=" << s.r << ')';
            else if constexpr (std::is_same_v<T, scale::PolyCritical>)
                os << "poly-critical(r=" << s.r << ",beta=" << s.beta << ",nu=" << s.nu << ')';
            else os << "power-law(rho=" << s.rho << ')';
        },
        rule);
    return os.str();
}

void AlternativeModel::validate() const {
    if (n < 1) throw std::invalid_argument("model: n must be positive");
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("model: beta must lie in (0, 1)");
    if (n >= 2) (void)sigma();
}

double AlternativeModel::sparsity() const {
    return std::pow(static_cast<double>(n), -beta);
}

std::size_t fixed_signal_count(std::size_t n, double beta) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("fixed_signal_count: beta must lie in [0, 1]");
    if (n == 0) return 0;
    const double x = std::pow(static_cast<double>(n), 1.0 - beta);
    auto k = static_cast<std::size_t>(std::floor(x));
    // pow can land a hair below an exact integer power.
    if (static_cast<double>(k + 1) <= x * (1.0 + 1e-12)) ++k;
    return std::min(k, n);
}

std::size_t fill_alternative(const AlternativeModel& model, double sigma, PhiloxStream& signal,
                             PhiloxStream& noise, std::span<double> out) {
    if (out.size() != model.n) throw std::invalid_argument("fill_alternative: output size must equal n");
    noise.fill_normal(out);
    std::size_t count = 0;
    if (model.mode == SamplingMode::FixedCount) {
        count = fixed_signal_count(model.n, model.beta);
        for (std::size_t i = 0; i < count; ++i) out[i] += sigma * model.family.sample(signal);
    } else {
        const double pi_n = model.sparsity();
        for (double& x: out) {
            if (signal.uniform() < pi_n) {
                x += sigma * model.family.sample(signal);
                ++count;
            }
        }
    }
    return count;
}

std::vector<double> sample_alternative(const AlternativeModel& model, std::uint64_t seed) {
    model.validate();
    std::vector<double> x(model.n);
    const double sigma = model.n >= 2 ? model.sigma() : 0.0;
    PhiloxStream signal({seed, StreamPurpose::Sampling, 0, 0});
    PhiloxStream noise({seed, StreamPurpose::Sampling, 0, 1});
    fill_alternative(model, sigma, signal, noise, x);
    return x;
}

std::vector<double> sample_null(std::size_t n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_null: n must be positive");
    std::vector<double> x(n);
    PhiloxStream stream({seed, StreamPurpose::Null, 0, 0});
    stream.fill_normal(x);
    return x;
}

} // namespace globalnull
