#pragma once

#include "globalnull/calibration.hpp"
#include "globalnull/distributions.hpp"
#include "globalnull/statistics.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace globalnull {

// A scale rule with r (or rho) and beta left open; filled in per grid cell.
enum class ScaleKind { Fixed, PointMassSqrt2rLogN, ExpOverSqrtLog, PolyCritical, PowerLaw };

struct ScaleTemplate {
    ScaleKind kind = ScaleKind::Fixed;
    double nu = 1.0; // PolyCritical only

    ScaleRule at(double beta, double r) const;
};

// "fixed", "sqrt2rlogn", "exp-critical", "poly-critical", "power-law".
ScaleKind parse_scale_kind(std::string_view name);
std::string_view to_string(ScaleKind kind);

struct ExperimentSpec {
    std::size_t n = 50000;
    double alpha = 0.05;
    std::vector<TestKind> tests{all_tests.begin(), all_tests.end()};
    std::vector<double> betas;
    std::vector<double> r_values;
    GFamily family = GFamily::laplace();
    ScaleTemplate scale;
    std::size_t power_reps = 1000;
    std::size_t calib_reps = 20000;
    std::uint64_t seed = 1;
    SamplingMode mode = SamplingMode::FixedCount;
    unsigned threads = 1;

    // Throws std::invalid_argument.
    void validate() const;
    AlternativeModel model(double beta, double r) const;
};

struct PowerEstimate {
    TestKind test = TestKind::Max;
    double beta = 0.0;
    double r = 0.0;
    double power = 0.0;
    double ci_half_width = 0.0;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
};

// 1.96 sqrt(p (1 - p) / reps), floored at 1 / reps.
double wald_half_width(double power, std::size_t reps);

// Rejection frequency over `reps` alternative draws. Replicate i uses the
// Power streams (seed, i), so draws never overlap calibration draws, and
// every test evaluated with the same seed sees the same data. Throws
// UncalibratedError when a threshold is missing.
std::vector<PowerEstimate> estimate_power(std::span<const TestKind> tests, const AlternativeModel& model,
                                          const CriticalValueTable& thresholds, double alpha, std::size_t reps,
                                          std::uint64_t seed, unsigned threads = 1);
PowerEstimate estimate_power(TestKind test, const AlternativeModel& model, const CriticalValueTable& thresholds,
                             double alpha, std::size_t reps, std::uint64_t seed, unsigned threads = 1);

struct GridResult {
    ExperimentSpec spec;
    std::vector<PowerEstimate> estimates; // beta-major, then r, then test
    CriticalValueTable calibration;       // the thresholds actually used

    const PowerEstimate& at(TestKind test, double beta, double r) const;
};

// Calibrates once per (test, n, alpha) from spec.seed, reusing matching
// entries of `cache` and adding new ones to it, then estimates power in
// every (beta, r) cell with the same power seed.
GridResult run_grid(const ExperimentSpec& spec, CriticalValueTable* cache = nullptr);

// test,beta,r,power,ci,reps,seed,n,family preceded by '#' provenance lines.
void write_power_csv(std::ostream& os, const GridResult& result, std::span<const std::string> provenance = {});

enum class FigureId { Fig2Laplace, Fig3Cauchy, AppGaussian, AppLogistic, AppChi1, AppT5, AppT3 };

inline constexpr std::array<FigureId, 7> all_figures{FigureId::Fig2Laplace, FigureId::Fig3Cauchy,
                                                     FigureId::AppGaussian, FigureId::AppLogistic,
                                                     FigureId::AppChi1,     FigureId::AppT5,
                                                     FigureId::AppT3};

std::string_view to_string(FigureId id);
// Case-insensitive; throws std::invalid_argument for unknown ids.
FigureId parse_figure_id(std::string_view name);

// n = 50,000, beta = 0.1..0.9, all six tests, fixed-count sampling.
// Laplace and the supplementary families use sigma_n = r on a geometric
// r-grid from 0.05 to 12.8; Cauchy uses the critical polynomial scaling
// on r = 0.25..4.
ExperimentSpec figure_spec(FigureId id);

struct FigureOptions {
    std::optional<std::size_t> power_reps;
    std::optional<std::size_t> calib_reps;
    std::optional<std::uint64_t> seed;
    std::optional<std::vector<double>> betas;
    std::optional<std::vector<double>> r_values;
    unsigned threads = 1;
};

ExperimentSpec figure_spec(FigureId id, const FigureOptions& options);

// Runs the figure's grid and writes <out_dir>/<figure-id>.csv.
std::filesystem::path reproduce_figure(FigureId id, const FigureOptions& options, const std::filesystem::path& out_dir,
                                       CriticalValueTable* cache = nullptr,
                                       std::span<const std::string> provenance = {});

} // namespace globalnull
