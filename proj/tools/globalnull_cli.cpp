// globalnull: calibration, power grids, figure datasets and closed-form
// quantities for global-null tests in the sparse Gaussian sequence model.

#include "globalnull/calibration.hpp"
#include "globalnull/config.hpp"
#include "globalnull/distributions.hpp"
#include "globalnull/harness.hpp"
#include "globalnull/parallel.hpp"
#include "globalnull/statistics.hpp"
#include "globalnull/theory.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace gn = globalnull;

namespace {

constexpr const char* version = "0.1.0";

const std::set<std::string> switch_keys{"critical-scale", "one-sided", "gauss-tail", "exp-tail",
                                        "poly-tail",      "max-power", "calibrate-missing"};

// Lets --config values sit before the command-line tokens so explicit flags
// win under TakeLast.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    std::optional<std::string> config_path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config_path = args[i + 1];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
        }
    }
    if (!config_path || args.size() < 2) return args;
    const auto extra = gn::config_to_args(gn::load_config(*config_path), switch_keys);
    args.insert(args.begin() + 2, extra.begin(), extra.end());
    return args;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

struct Output {
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file.open(path, std::ios::trunc);
            if (!file) throw std::runtime_error("cannot write " + path);
        }
    }
    std::ostream& stream() { return file.is_open() ? file : std::cout; }
    std::ofstream file;
};

// One "key=value" line per option of the subcommand, defaults included.
std::vector<std::string> provenance(const CLI::App& sub) {
    std::vector<std::string> lines{std::string("globalnull ") + version,
                                   std::string("generator ") + std::string(gn::generator_id),
                                   "command " + sub.get_name()};
    for (const CLI::Option* opt: sub.get_options()) {
        const std::string name = opt->get_single_name();
        if (name == "help" || name == "config" || name == "threads") continue;
        std::string value;
        if (opt->count() > 0) {
            const auto& results = opt->results();
            for (std::size_t i = 0; i < results.size(); ++i) value += (i ? "," : "") + results[i];
            if (opt->get_expected_max() == 0) value = "true";
        } else {
            value = opt->get_default_str();
            if (opt->get_expected_max() == 0 && value.empty()) value = "false";
        }
        if (!value.empty()) lines.push_back(name + "=" + value);
    }
    return lines;
}

void write_provenance(std::ostream& os, const CLI::App& sub) {
    for (const auto& line: provenance(sub)) os << "# " << line << '\n';
}

gn::GFamily family_from(const std::string& name, std::optional<double> nu) {
    return gn::parse_family(name, nu);
}

const auto open_unit = CLI::Validator(
    [](std::string& s) -> std::string {
        double v = 0.0;
        try {
            v = std::stod(s);
        } catch (const std::exception&) {
            return "not a number: " + s;
        }
        return v > 0.0 && v < 1.0 ? std::string() : "value must lie in (0, 1): " + s;
    },
    "(0,1)");

// CLI11 reads an empty list element as 0; a grid entry must be written out.
const auto non_empty = CLI::Validator(
    [](std::string& s) -> std::string { return s.empty() ? "empty list element" : std::string(); }, "");

struct CommonModelFlags {
    std::string family = "laplace";
    std::optional<double> nu;
    std::string scale = "fixed";
    std::string mode = "fixed";

    void add(CLI::App* sub) {
        sub->add_option("--family", family, "Non-null family: gaussian, laplace, cauchy, t, t3, logistic, chi2, pointmass")
            ->capture_default_str();
        sub->add_option("--nu", nu, "Degrees of freedom for the t family; tail index for poly-critical scaling");
        sub->add_option("--scale", scale, "Scale rule: fixed, sqrt2rlogn, exp-critical, poly-critical, power-law")
            ->capture_default_str();
        sub->add_option("--mode", mode, "Non-null placement: fixed (floor(n^(1-beta)) signals) or random")
            ->check(CLI::IsMember({"fixed", "random"}))
            ->capture_default_str();
    }

    gn::GFamily family_value() const {
        // --nu doubles as the poly-critical tail index, so only hand it to
        // families that take one.
        const bool takes_nu = family == "t" || family == "student-t";
        return family_from(family, takes_nu ? nu : std::nullopt);
    }

    gn::ScaleTemplate scale_value(const gn::GFamily& fam) const {
        gn::ScaleTemplate t{gn::parse_scale_kind(scale), 1.0};
        if (t.kind == gn::ScaleKind::PolyCritical) t.nu = nu.value_or(fam.nu().value_or(1.0));
        return t;
    }

    gn::SamplingMode mode_value() const {
        return mode == "random" ? gn::SamplingMode::RandomCount : gn::SamplingMode::FixedCount;
    }
};

std::vector<gn::TestKind> parse_tests(const std::vector<std::string>& names) {
    std::vector<gn::TestKind> out;
    for (const auto& n: names) {
        if (n == "all") return {gn::all_tests.begin(), gn::all_tests.end()};
        out.push_back(gn::parse_test_kind(n));
    }
    return out;
}

std::filesystem::path cache_path(const std::string& flag) {
    return flag.empty() ? gn::default_cache_path() : std::filesystem::path(flag);
}

std::vector<double> read_vector(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::vector<double> x;
    std::string token;
    while (in >> token) {
        if (token.front() == '#') {
            std::getline(in, token);
            continue;
        }
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        if (used != token.size()) throw std::runtime_error("bad number '" + token + "' in " + path);
        x.push_back(v);
    }
    if (x.empty()) throw std::runtime_error(path + " holds no values");
    return x;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Global-null tests for sparse Gaussian sequences: calibration, power and theory"};
    app.set_version_flag("--version", std::string("globalnull ") + version);
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    unsigned threads = gn::default_thread_count();
    std::string config_file;
    std::string out_path;
    std::string cache_flag;
    auto add_common = [&](CLI::App* sub, bool with_threads) {
        sub->add_option("--config", config_file, "Flat key = value file; flags override its values");
        sub->add_option("--out", out_path, "Output file (directory for 'figure'); stdout when omitted");
        if (with_threads) sub->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    };

    // calibrate
    auto* calibrate = app.add_subcommand("calibrate", "Monte Carlo null threshold; cached across runs");
    std::string cal_test;
    std::size_t cal_n = 0;
    double cal_alpha = 0.05;
    std::size_t cal_reps = 20000;
    std::uint64_t cal_seed = 1;
    calibrate->add_option("--test", cal_test, "max, hc, mhc, bj, chisq or hybrid")->required();
    calibrate->add_option("--n", cal_n, "Dimension")->required()->check(CLI::PositiveNumber);
    calibrate->add_option("--alpha", cal_alpha, "Level")->check(open_unit)->capture_default_str();
    calibrate->add_option("--reps", cal_reps, "Null replicates")->check(CLI::Range(100ul, 1000000000ul))->capture_default_str();
    calibrate->add_option("--seed", cal_seed, "Calibration seed")->capture_default_str();
    calibrate->add_option("--cache", cache_flag, "Cache file (default: $GLOBALNULL_CACHE_DIR/critical_values.txt)");
    add_common(calibrate, true);

    // test
    auto* test = app.add_subcommand("test", "Apply calibrated tests to one data vector");
    std::string test_input;
    std::vector<std::string> test_names{"all"};
    std::size_t test_n = 1000;
    double test_alpha = 0.05;
    double test_beta = 0.5;
    double test_r = 0.0;
    std::size_t test_calib_reps = 20000;
    std::uint64_t test_seed = 1;
    std::uint64_t test_data_seed = 1;
    bool calibrate_missing = false;
    CommonModelFlags test_model;
    test->add_option("--input", test_input, "Whitespace-separated values; otherwise a vector is simulated");
    test->add_option("--tests", test_names, "Tests to apply (comma separated, or 'all')")->delimiter(',')->check(non_empty)->capture_default_str();
    test->add_option("--n", test_n, "Dimension of the simulated vector")->check(CLI::PositiveNumber)->capture_default_str();
    test->add_option("--alpha", test_alpha, "Level")->check(open_unit)->capture_default_str();
    test->add_option("--beta", test_beta, "Sparsity exponent of the simulated vector")->check(open_unit)->capture_default_str();
    test->add_option("--r", test_r, "Scale parameter of the simulated vector (0: null)")->capture_default_str();
    test->add_option("--calib-reps", test_calib_reps, "Calibration replicates to look up")->capture_default_str();
    test->add_option("--seed", test_seed, "Calibration seed to look up")->capture_default_str();
    test->add_option("--data-seed", test_data_seed, "Seed for the simulated vector")->capture_default_str();
    test->add_flag("--calibrate-missing", calibrate_missing, "Calibrate thresholds that are not cached yet");
    test->add_option("--cache", cache_flag, "Cache file");
    test_model.add(test);
    add_common(test, true);

    // power
    auto* power = app.add_subcommand("power", "Power grid over (beta, r)");
    std::vector<std::string> power_tests{"all"};
    std::size_t power_n = 50000;
    double power_alpha = 0.05;
    std::vector<double> power_betas{0.5};
    std::vector<double> power_r{1.0};
    std::vector<double> power_rho;
    std::size_t power_reps = 1000;
    std::size_t power_calib_reps = 20000;
    std::uint64_t power_seed = 1;
    CommonModelFlags power_model;
    power->add_option("--tests", power_tests, "Tests (comma separated, or 'all')")->delimiter(',')->check(non_empty)->capture_default_str();
    power->add_option("--n", power_n, "Dimension")->check(CLI::Range(2ul, 1000000000ul))->capture_default_str();
    power->add_option("--alpha", power_alpha, "Level")->check(open_unit)->capture_default_str();
    power->add_option("--beta", power_betas, "Sparsity exponents (comma separated)")->delimiter(',')->check(non_empty)->capture_default_str();
    power->add_option("--r", power_r, "Scale parameters (comma separated)")->delimiter(',')->check(non_empty)->capture_default_str();
    power->add_option("--rho", power_rho, "Growth rates for the power-law scale (replace --r)")->delimiter(',')->check(non_empty);
    power->add_option("--reps", power_reps, "Alternative replicates per cell")->capture_default_str();
    power->add_option("--calib-reps", power_calib_reps, "Null replicates per threshold")->capture_default_str();
    power->add_option("--seed", power_seed, "Seed for calibration and power streams")->capture_default_str();
    power->add_option("--cache", cache_flag, "Cache file");
    power_model.add(power);
    add_common(power, true);

    // figure
    auto* figure = app.add_subcommand("figure", "Reproduce a power-curve dataset: <figure-id>.csv");
    std::string figure_id;
    std::optional<std::size_t> figure_reps;
    std::optional<std::size_t> figure_calib_reps;
    std::optional<std::uint64_t> figure_seed;
    std::vector<double> figure_betas;
    std::vector<double> figure_r;
    figure->add_option("id", figure_id,
                       "Fig2Laplace, Fig3Cauchy, AppGaussian, AppLogistic, AppChi1, AppT5 or AppT3")
        ->required();
    figure->add_option("--reps", figure_reps, "Alternative replicates per cell (default 1000)");
    figure->add_option("--calib-reps", figure_calib_reps, "Null replicates per threshold (default 20000)");
    figure->add_option("--seed", figure_seed, "Seed (default 1)");
    figure->add_option("--beta", figure_betas, "Override the beta grid")->delimiter(',')->check(non_empty);
    figure->add_option("--r", figure_r, "Override the r grid")->delimiter(',')->check(non_empty);
    figure->add_option("--cache", cache_flag, "Cache file");
    add_common(figure, true);

    // lambda
    auto* lambda = app.add_subcommand("lambda", "log_n expected non-null exceedances against (1 - delta)/2");
    std::string lambda_family = "cauchy";
    std::optional<double> lambda_nu;
    std::string lambda_scale = "fixed";
    bool critical_scale = false;
    bool one_sided = false;
    double lambda_n = 100000;
    double lambda_beta = 0.7;
    double lambda_r = 1.0;
    std::optional<double> lambda_rho;
    std::vector<double> deltas;
    lambda->add_option("--family", lambda_family, "Non-null family")->capture_default_str();
    lambda->add_option("--nu", lambda_nu, "Degrees of freedom (t family) / tail index (poly-critical)");
    lambda->add_option("--scale", lambda_scale, "Scale rule (ignored with --critical-scale)")->capture_default_str();
    lambda->add_flag("--critical-scale", critical_scale,
                     "Use the family's critical scaling: poly-critical (cauchy, t), exp-critical (laplace, "
                     "logistic), sqrt2rlogn (pointmass), fixed otherwise");
    lambda->add_flag("--one-sided", one_sided, "Count X > T instead of |X| > T");
    lambda->add_option("--n", lambda_n, "Dimension (may exceed the integer range)")->capture_default_str();
    lambda->add_option("--beta", lambda_beta, "Sparsity exponent")->capture_default_str();
    lambda->add_option("--r", lambda_r, "Scale parameter")->capture_default_str();
    lambda->add_option("--rho", lambda_rho, "Growth rate for the power-law scale");
    lambda->add_option("--deltas", deltas, "Ascending grid in (0, 1] (default 0.05, 0.10, ..., 1)")->delimiter(',')->check(non_empty);
    add_common(lambda, false);

    // boundary
    auto* boundary = app.add_subcommand("boundary", "Critical sparsity levels and limiting max-test power");
    bool gauss_tail = false, exp_tail = false, poly_tail = false, max_power = false;
    double boundary_r = 0.0, boundary_nu = 1.0, boundary_rho = 0.0, boundary_alpha = 0.05;
    double tail_constant = 1.0 / 3.14159265358979323846;
    auto* g_flag = boundary->add_flag("--gauss-tail", gauss_tail, "Gaussian tail, sigma_n = r: r^2/(r^2+1)");
    auto* e_flag = boundary->add_flag("--exp-tail", exp_tail, "Exponential tail, sigma_n = r/sqrt(2 log n): (1-1/r)^2");
    auto* p_flag = boundary->add_flag("--poly-tail", poly_tail, "Polynomial tail, sigma_n = n^rho: nu rho + 1");
    auto* m_flag = boundary->add_flag("--max-power", max_power,
                                      "Limiting max-test power 1 - exp(-2 C r^nu + log(1 - alpha))");
    g_flag->excludes(e_flag, p_flag, m_flag);
    e_flag->excludes(p_flag, m_flag);
    p_flag->excludes(m_flag);
    boundary->add_option("--r", boundary_r, "Scale parameter")->capture_default_str();
    boundary->add_option("--nu", boundary_nu, "Tail index")->capture_default_str();
    boundary->add_option("--rho", boundary_rho, "Growth rate")->capture_default_str();
    boundary->add_option("--alpha", boundary_alpha, "Level (--max-power)")->check(open_unit)->capture_default_str();
    boundary->add_option("--tail-constant", tail_constant, "C in P(Theta > x) ~ C x^-nu (--max-power)")
        ->capture_default_str();
    add_common(boundary, false);

    // appendix-a
    auto* appendix = app.add_subcommand("appendix-a",
                                        "Counterexample detection thresholds in r for the max test and HC");
    int min_m = -60;
    appendix->add_option("--min-m", min_m, "Deepest exponent m scanned")->capture_default_str();
    add_common(appendix, false);

    try {
        std::vector<std::string> args = expand_config(argc, argv);
        std::vector<std::string> rest(args.begin() + 1, args.end());
        std::reverse(rest.begin(), rest.end());
        app.parse(rest);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (calibrate->parsed()) {
            const auto path = cache_path(cache_flag);
            gn::CriticalValueTable cache = gn::load_cache(path);
            const gn::TestKind kind = gn::parse_test_kind(cal_test);
            const gn::TestKind one[] = {kind};
            if (gn::calibrate_tests(one, cal_n, cal_alpha, cal_reps, cal_seed, cache, threads) > 0) {
                gn::update_cache(path, cache);
            }
            Output out(out_path);
            write_provenance(out.stream(), *calibrate);
            out.stream() << "test,n,alpha,reps,seed,threshold\n";
            auto row = [&](gn::TestKind t, double level) {
                out.stream() << gn::to_string(t) << ',' << cal_n << ',' << fmt(level) << ',' << cal_reps << ','
                             << cal_seed << ',' << fmt(*cache.find({t, cal_n, level, cal_reps, cal_seed})) << '\n';
            };
            if (kind == gn::TestKind::Hybrid) {
                row(gn::TestKind::Max, cal_alpha * 0.5);
                row(gn::TestKind::ChiSquare, cal_alpha * 0.5);
            } else {
                row(kind, cal_alpha);
            }
        } else if (test->parsed()) {
            std::vector<double> x;
            if (!test_input.empty()) {
                x = read_vector(test_input);
            } else {
                const gn::GFamily fam = test_model.family_value();
                const gn::AlternativeModel model{test_n, test_beta, fam,
                                                 test_model.scale_value(fam).at(test_beta, test_r),
                                                 test_model.mode_value()};
                x = gn::sample_alternative(model, test_data_seed);
            }
            const auto tests = parse_tests(test_names);
            const auto path = cache_path(cache_flag);
            gn::CriticalValueTable cache = gn::load_cache(path);
            gn::CriticalValueTable selected;
            for (const auto& cv: cache.entries()) {
                if (cv.key.n == x.size() && cv.key.reps == test_calib_reps && cv.key.seed == test_seed) {
                    selected.insert(cv.key, cv.threshold);
                }
            }
            if (calibrate_missing &&
                gn::calibrate_tests(tests, x.size(), test_alpha, test_calib_reps, test_seed, selected, threads) > 0) {
                gn::update_cache(path, selected);
            }
            gn::StatisticsWorkspace workspace;
            const gn::StatisticValues stats = workspace.compute(x, gn::StatisticMask::all());
            Output out(out_path);
            write_provenance(out.stream(), *test);
            out.stream() << "test,statistic,threshold,reject\n";
            for (gn::TestKind t: tests) {
                const gn::RejectionRule rule = gn::rejection_rule(t, x.size(), selected, test_alpha);
                const std::string statistic =
                    t == gn::TestKind::Hybrid ? fmt(stats.max) + ";" + fmt(stats.chisq) : fmt(stats.get(t));
                const std::string threshold = t == gn::TestKind::Hybrid
                                                  ? fmt(rule.threshold) + ";" + fmt(rule.chisq_threshold)
                                                  : fmt(rule.threshold);
                out.stream() << gn::to_string(t) << ',' << statistic << ',' << threshold << ','
                             << (rule.rejects(stats) ? 1 : 0) << '\n';
            }
        } else if (power->parsed()) {
            gn::ExperimentSpec spec;
            spec.n = power_n;
            spec.alpha = power_alpha;
            spec.tests = parse_tests(power_tests);
            spec.betas = power_betas;
            spec.family = power_model.family_value();
            spec.scale = power_model.scale_value(spec.family);
            spec.r_values = spec.scale.kind == gn::ScaleKind::PowerLaw && !power_rho.empty() ? power_rho : power_r;
            spec.power_reps = power_reps;
            spec.calib_reps = power_calib_reps;
            spec.seed = power_seed;
            spec.mode = power_model.mode_value();
            spec.threads = threads;
            const auto path = cache_path(cache_flag);
            gn::CriticalValueTable cache = gn::load_cache(path);
            const std::size_t before = cache.size();
            const gn::GridResult result = gn::run_grid(spec, &cache);
            if (cache.size() != before) gn::update_cache(path, cache);
            Output out(out_path);
            gn::write_power_csv(out.stream(), result, provenance(*power));
        } else if (figure->parsed()) {
            const gn::FigureId id = gn::parse_figure_id(figure_id);
            gn::FigureOptions options;
            options.power_reps = figure_reps;
            options.calib_reps = figure_calib_reps;
            options.seed = figure_seed;
            if (!figure_betas.empty()) options.betas = figure_betas;
            if (!figure_r.empty()) options.r_values = figure_r;
            options.threads = threads;
            const gn::ExperimentSpec spec = gn::figure_spec(id, options);
            auto lines = provenance(*figure);
            std::ostringstream resolved;
            resolved << "resolved n=" << spec.n << " alpha=" << fmt(spec.alpha) << " family=" << spec.family.name()
                     << " scale=" << gn::to_string(spec.scale.kind) << " reps=" << spec.power_reps
                     << " calib-reps=" << spec.calib_reps << " seed=" << spec.seed;
            lines.push_back(resolved.str());
            const auto path = cache_path(cache_flag);
            gn::CriticalValueTable cache = gn::load_cache(path);
            const std::size_t before = cache.size();
            const auto written = gn::reproduce_figure(id, options, out_path.empty() ? "." : out_path, &cache, lines);
            if (cache.size() != before) gn::update_cache(path, cache);
            std::cout << written.string() << '\n';
        } else if (lambda->parsed()) {
            const bool takes_nu = lambda_family == "t" || lambda_family == "student-t";
            const gn::GFamily fam = family_from(lambda_family, takes_nu ? lambda_nu : std::nullopt);
            gn::ScaleTemplate scale{gn::parse_scale_kind(lambda_scale), 1.0};
            if (critical_scale) {
                switch (fam.kind()) {
                case gn::FamilyKind::Cauchy:
                case gn::FamilyKind::StudentT: scale.kind = gn::ScaleKind::PolyCritical; break;
                case gn::FamilyKind::Laplace:
                case gn::FamilyKind::Logistic: scale.kind = gn::ScaleKind::ExpOverSqrtLog; break;
                case gn::FamilyKind::PointMass: scale.kind = gn::ScaleKind::PointMassSqrt2rLogN; break;
                default: scale.kind = gn::ScaleKind::Fixed; break;
                }
            }
            if (scale.kind == gn::ScaleKind::PolyCritical) scale.nu = lambda_nu.value_or(fam.nu().value_or(1.0));
            const double r = scale.kind == gn::ScaleKind::PowerLaw && lambda_rho ? *lambda_rho : lambda_r;
            if (deltas.empty()) {
                for (int k = 1; k <= 20; ++k) deltas.push_back(0.05 * k);
            }
            const auto curve = gn::lambda_curve(fam, scale.at(lambda_beta, r), lambda_n, lambda_beta, deltas,
                                                one_sided ? gn::TailSide::OneSided : gn::TailSide::TwoSided);
            Output out(out_path);
            write_provenance(out.stream(), *lambda);
            out.stream() << "# scale " << gn::describe(scale.at(lambda_beta, r)) << '\n';
            gn::write_lambda_csv(out.stream(), curve);
        } else if (boundary->parsed()) {
            Output out(out_path);
            write_provenance(out.stream(), *boundary);
            if (max_power) {
                out.stream() << "max_power\n"
                             << fmt(gn::asymptotic_max_power(tail_constant, boundary_nu, boundary_r, boundary_alpha))
                             << '\n';
            } else {
                gn::TailClass tail;
                if (gauss_tail) tail = gn::tail_class::Gaussian{boundary_r};
                else if (exp_tail) tail = gn::tail_class::Exponential{boundary_r};
                else if (poly_tail) tail = gn::tail_class::Polynomial{boundary_nu, boundary_rho};
                else throw CLI::ValidationError("boundary", "choose --gauss-tail, --exp-tail, --poly-tail or --max-power");
                out.stream() << "beta_star\n" << fmt(gn::critical_sparsity(tail)) << '\n';
            }
        } else if (appendix->parsed()) {
            const auto t = gn::counterexample_thresholds(min_m);
            Output out(out_path);
            write_provenance(out.stream(), *appendix);
            out.stream() << "r_max_test,r_hc,m_max_test,m_hc\n"
                         << fmt(t.r_max_test) << ',' << fmt(t.r_hc) << ',' << t.m_max_test << ',' << t.m_hc << '\n';
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const gn::UncalibratedError& e) {
        std::cerr << "error: " << e.what() << " (run 'globalnull calibrate' or pass --calibrate-missing)\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
