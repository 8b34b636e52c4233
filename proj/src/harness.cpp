#include "globalnull/harness.hpp"

#include "globalnull/parallel.hpp"
#include "globalnull/rng.hpp"
#include "globalnull/theory.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace globalnull {

namespace {

std::vector<double> geometric_grid(double first, double ratio, std::size_t count) {
    std::vector<double> out;
    for (std::size_t k = 0; k < count; ++k) out.push_back(first * std::pow(ratio, static_cast<double>(k)));
    return out;
}

std::vector<double> sparsity_grid() {
    return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

} // namespace

ScaleRule ScaleTemplate::at(double beta, double r) const {
    switch (kind) {
    case ScaleKind::Fixed: return scale::Fixed{r};
    case ScaleKind::PointMassSqrt2rLogN: return scale::PointMassSqrt2rLogN{r};
    case ScaleKind::ExpOverSqrtLog: return scale::ExpOverSqrtLog{r};
    case ScaleKind::PolyCritical: return scale::PolyCritical{r, beta, nu};
    case ScaleKind::PowerLaw: return scale::PowerLaw{r};
    }
    throw std::invalid_argument("unknown scale kind");
}

ScaleKind parse_scale_kind(std::string_view name) {
    for (ScaleKind kind: {ScaleKind::Fixed, ScaleKind::PointMassSqrt2rLogN, ScaleKind::ExpOverSqrtLog,
                          ScaleKind::PolyCritical, ScaleKind::PowerLaw}) {
        if (to_string(kind) == name) return kind;
    }
    throw std::invalid_argument("unknown scale rule '" + std::string(name) + "'");
}

std::string_view to_string(ScaleKind kind) {
    switch (kind) {
    case ScaleKind::Fixed: return "fixed";
    case ScaleKind::PointMassSqrt2rLogN: return "sqrt2rlogn";
    case ScaleKind::ExpOverSqrtLog: return "exp-critical";
    case ScaleKind::PolyCritical: return "poly-critical";
    case ScaleKind::PowerLaw: return "power-law";
    }
    return "unknown";
}

void ExperimentSpec::validate() const {
    if (n < 2) throw std::invalid_argument("experiment: n must be at least 2");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("experiment: alpha must lie in (0, 1)");
    if (tests.empty()) throw std::invalid_argument("experiment: no tests selected");
    if (betas.empty()) throw std::invalid_argument("experiment: the beta grid is empty");
    if (r_values.empty()) throw std::invalid_argument("experiment: the r grid is empty");
    for (double b: betas) {
        if (!(b > 0.0 && b < 1.0)) throw std::invalid_argument("experiment: beta values must lie in (0, 1)");
    }
    if (power_reps < 100) throw std::invalid_argument("experiment: power_reps must be at least 100");
    if (calib_reps < 100) throw std::invalid_argument("experiment: calib_reps must be at least 100");
    for (double b: betas) {
        for (double r: r_values) model(b, r).validate();
    }
}

AlternativeModel ExperimentSpec::model(double beta, double r) const {
    return AlternativeModel{n, beta, family, scale.at(beta, r), mode};
}

double wald_half_width(double power, std::size_t reps) {
    const double reps_d = static_cast<double>(reps);
    return std::max(1.96 * std::sqrt(power * (1.0 - power) / reps_d), 1.0 / reps_d);
}

std::vector<PowerEstimate> estimate_power(std::span<const TestKind> tests, const AlternativeModel& model,
                                          const CriticalValueTable& thresholds, double alpha, std::size_t reps,
                                          std::uint64_t seed, unsigned threads) {
    model.validate();
    if (reps == 0) throw std::invalid_argument("estimate_power: reps must be positive");
    std::vector<RejectionRule> rules;
    StatisticMask mask;
    for (TestKind test: tests) {
        rules.push_back(rejection_rule(test, model.n, thresholds, alpha));
        mask.require(test);
    }
    const double sigma = model.sigma();

    // rejections[rep * tests + t]
    std::vector<unsigned char> rejections(reps * tests.size());
    parallel_for(reps, threads, [&](std::size_t begin, std::size_t end) {
        StatisticsWorkspace workspace;
        std::vector<double> x(model.n);
        for (std::size_t rep = begin; rep < end; ++rep) {
            PhiloxStream signal({seed, StreamPurpose::Power, rep, 0});
            PhiloxStream noise({seed, StreamPurpose::Power, rep, 1});
            fill_alternative(model, sigma, signal, noise, x);
            const StatisticValues s = workspace.compute(x, mask);
            for (std::size_t t = 0; t < rules.size(); ++t) rejections[rep * rules.size() + t] = rules[t].rejects(s);
        }
    });

    std::vector<PowerEstimate> out;
    for (std::size_t t = 0; t < tests.size(); ++t) {
        std::size_t count = 0;
        for (std::size_t rep = 0; rep < reps; ++rep) count += rejections[rep * tests.size() + t];
        const double power = static_cast<double>(count) / static_cast<double>(reps);
        out.push_back({tests[t], model.beta, scale_parameter(model.scale), power, wald_half_width(power, reps), reps,
                       seed});
    }
    return out;
}

PowerEstimate estimate_power(TestKind test, const AlternativeModel& model, const CriticalValueTable& thresholds,
                             double alpha, std::size_t reps, std::uint64_t seed, unsigned threads) {
    const TestKind one[] = {test};
    return estimate_power(one, model, thresholds, alpha, reps, seed, threads).front();
}

const PowerEstimate& GridResult::at(TestKind test, double beta, double r) const {
    for (const auto& e: estimates) {
        if (e.test == test && e.beta == beta && e.r == r) return e;
    }
    throw std::out_of_range("no estimate for the requested cell");
}

GridResult run_grid(const ExperimentSpec& spec, CriticalValueTable* cache) {
    spec.validate();
    GridResult result{spec, {}, {}};

    // Only this run's (reps, seed) entries, so threshold lookups are unique.
    if (cache) {
        for (const auto& cv: cache->entries()) {
            if (cv.key.n == spec.n && cv.key.reps == spec.calib_reps && cv.key.seed == spec.seed) {
                result.calibration.insert(cv.key, cv.threshold);
            }
        }
    }
    calibrate_tests(spec.tests, spec.n, spec.alpha, spec.calib_reps, spec.seed, result.calibration, spec.threads);
    if (cache) cache->merge(result.calibration);

    for (double beta: spec.betas) {
        for (double r: spec.r_values) {
            auto cell = estimate_power(spec.tests, spec.model(beta, r), result.calibration, spec.alpha,
                                       spec.power_reps, spec.seed, spec.threads);
            result.estimates.insert(result.estimates.end(), cell.begin(), cell.end());
        }
    }
    return result;
}

void write_power_csv(std::ostream& os, const GridResult& result, std::span<const std::string> provenance) {
    for (const auto& line: provenance) os << "# " << line << '\n';
    const auto old_precision = os.precision(17);
    os << "test,beta,r,power,ci,reps,seed,n,family\n";
    for (const auto& e: result.estimates) {
        os << to_string(e.test) << ',' << e.beta << ',' << e.r << ',' << e.power << ',' << e.ci_half_width << ','
           << e.reps << ',' << e.seed << ',' << result.spec.n << ',' << result.spec.family.name() << '\n';
    }
    os.precision(old_precision);
}

std::string_view to_string(FigureId id) {
    switch (id) {
    case FigureId::Fig2Laplace: return "Fig2Laplace";
    case FigureId::Fig3Cauchy: return "Fig3Cauchy";
    case FigureId::AppGaussian: return "AppGaussian";
    case FigureId::AppLogistic: return "AppLogistic";
    case FigureId::AppChi1: return "AppChi1";
    case FigureId::AppT5: return "AppT5";
    case FigureId::AppT3: return "AppT3";
    }
    return "unknown";
}

FigureId parse_figure_id(std::string_view name) {
    const std::string wanted = lower(name);
    for (FigureId id: all_figures) {
        if (lower(to_string(id)) == wanted) return id;
    }
    throw std::invalid_argument("unknown figure id '" + std::string(name) + "'");
}

ExperimentSpec figure_spec(FigureId id) {
    ExperimentSpec spec;
    spec.n = 50000;
    spec.alpha = 0.05;
    spec.betas = sparsity_grid();
    spec.scale = {ScaleKind::Fixed, 1.0};
    spec.r_values = geometric_grid(0.05, std::sqrt(2.0), 17);
    switch (id) {
    case FigureId::Fig2Laplace: spec.family = GFamily::laplace(); break;
    case FigureId::Fig3Cauchy:
        spec.family = GFamily::cauchy();
        spec.scale = {ScaleKind::PolyCritical, 1.0};
        spec.r_values = geometric_grid(0.25, std::sqrt(2.0), 9);
        break;
    case FigureId::AppGaussian: spec.family = GFamily::gaussian(); break;
    case FigureId::AppLogistic: spec.family = GFamily::logistic(); break;
    case FigureId::AppChi1: spec.family = GFamily::chi_squared1(); break;
    case FigureId::AppT5: spec.family = GFamily::student_t(5.0); break;
    case FigureId::AppT3: spec.family = GFamily::student_t(3.0); break;
    }
    return spec;
}

ExperimentSpec figure_spec(FigureId id, const FigureOptions& options) {
    ExperimentSpec spec = figure_spec(id);
    if (options.power_reps) spec.power_reps = *options.power_reps;
    if (options.calib_reps) spec.calib_reps = *options.calib_reps;
    if (options.seed) spec.seed = *options.seed;
    if (options.betas) spec.betas = *options.betas;
    if (options.r_values) spec.r_values = *options.r_values;
    spec.threads = options.threads;
    return spec;
}

std::filesystem::path reproduce_figure(FigureId id, const FigureOptions& options, const std::filesystem::path& out_dir,
                                       CriticalValueTable* cache, std::span<const std::string> provenance) {
    const GridResult result = run_grid(figure_spec(id, options), cache);
    std::filesystem::create_directories(out_dir);
    const auto path = out_dir / (std::string(to_string(id)) + ".csv");
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    write_power_csv(os, result, provenance);
    if (!os) throw std::runtime_error("write failed for " + path.string());
    return path;
}

} // namespace globalnull
