// spde_lab: desk-scale laboratory for stochastic reaction-diffusion dynamics
// on an interval. Subcommands map each experiment family to a runnable
// configuration: eig | check | bound | simulate | mc | compare.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spdelab/comparison.hpp"
#include "spdelab/dynamics.hpp"
#include "spdelab/montecarlo.hpp"
#include "spdelab/noise.hpp"
#include "spdelab/run_config.hpp"
#include "spdelab/spectral.hpp"

namespace {

using nlohmann::json;
using namespace spdelab;

constexpr int kExitConfigError = 2;
constexpr int kExitNumericError = 3;

struct CommonOptions {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    int workers = 0;
};

void add_common_options(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_path, "Path to a JSON run configuration");
    cmd->add_option("--set", opts.overrides,
                    "Override a config key as dotted.key=value (repeatable)");
    cmd->add_option("--out", opts.out_dir,
                    "Output directory for summary.json and series.csv");
    cmd->add_option("--workers", opts.workers, "Max parallel workers for path ensembles")
        ->envname("SPDE_LAB_WORKERS");
}

RunConfig load_config(const CommonOptions& opts) {
    json doc = json::object();
    if (!opts.config_path.empty()) {
        std::ifstream in(opts.config_path);
        if (!in) throw ConfigError("cannot open config file '" + opts.config_path + "'");
        try {
            in >> doc;
        } catch (const json::parse_error& e) {
            throw ConfigError("config file '" + opts.config_path + "': " + e.what());
        }
    }
    for (const std::string& ov : opts.overrides) apply_override(doc, ov);
    return parse_run_config(doc);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const fs::path path = fs::path(dir) / name;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

void emit(const CommonOptions& opts, const json& summary, const std::string* series_csv) {
    std::cout << summary.dump(2) << "\n";
    if (!opts.out_dir.empty()) {
        write_file(opts.out_dir, "summary.json", summary.dump(2) + "\n");
        if (series_csv) write_file(opts.out_dir, "series.csv", *series_csv);
    }
}

std::string path_series_csv(const PathResult& path) {
    std::string csv = "t";
    for (const char* name : kObservableNames) csv += std::string(",") + name;
    csv += "\n";
    for (std::size_t k = 0; k < path.times.size(); ++k) {
        csv += format_double(path.times[k]);
        for (double v : path.rows[k]) csv += "," + format_double(v);
        csv += "\n";
    }
    return csv;
}

std::string ensemble_series_csv(const EnsembleStats& stats) {
    std::string csv = "t";
    for (const char* name : kObservableNames) {
        csv += std::string(",") + name + "_mean";
        csv += std::string(",") + name + "_var";
        csv += std::string(",") + name + "_ci";
    }
    csv += ",n_alive\n";
    for (std::size_t k = 0; k < stats.times.size(); ++k) {
        csv += format_double(stats.times[k]);
        for (int j = 0; j < kNumObservables; ++j) {
            const auto js = static_cast<std::size_t>(j);
            csv += "," + format_double(stats.mean[js][k]);
            csv += "," + format_double(stats.variance[js][k]);
            csv += "," + format_double(stats.ci_halfwidth[js][k]);
        }
        csv += "," + std::to_string(stats.n_alive[k]) + "\n";
    }
    return csv;
}

json criterion_to_json(const CriterionReport& rep) {
    json j;
    j["name"] = rep.name;
    j["satisfied"] = rep.satisfied;
    j["margin"] = rep.margin;
    j["inputs"] = json::object();
    for (const auto& [key, value] : rep.inputs) j["inputs"][key] = value;
    j["notes"] = rep.notes;
    return j;
}

json blowup_stats_json(const EnsembleStats& stats) {
    json j;
    j["blow_up_fraction"] = stats.blow_up_fraction;
    if (stats.blow_up_q50) {
        j["blow_up_time_quantiles"] = {{"q10", *stats.blow_up_q10},
                                       {"q50", *stats.blow_up_q50},
                                       {"q90", *stats.blow_up_q90}};
    } else {
        j["blow_up_time_quantiles"] = nullptr;
    }
    j["n_paths"] = stats.n_paths;
    return j;
}

// The comparison-ODE family implied by the configured drift/noise pair:
//   power drift            -> d xi/dt = a1 xi^beta - (lambda1 - a2) xi
//   fujita (+ power noise) -> d eta/dt = 2 eta^{1+alpha/2} + q1 b^2 eta^m - 2 lambda1 eta
//   zero drift + noise     -> d eta/dt = q1 b^2 eta^m - 2 lambda1 eta
struct ComparisonSetup {
    GrowthFunction growth;
    double x0;
    Observable observable;
};

ComparisonSetup comparison_setup(const RunConfig& cfg, const ProblemSpec& prob) {
    const EigenPair eig = analytic_eigenpair(prob.domain);
    const Field u0 = make_initial(prob.initial, prob.domain);
    const double pairing = inner_product(u0, eig.phi);
    const CovarianceOperator cov = assemble(prob.kernel, prob.domain);

    if (cfg.drift_family == "power") {
        std::vector<GrowthTerm> terms{{cfg.a1, cfg.beta}, {-(eig.lambda1 - cfg.a2), 1.0}};
        return {GrowthFunction(terms), pairing, Observable::phi_pairing};
    }
    if (cfg.drift_family == "fujita") {
        std::vector<GrowthTerm> terms{{2.0, 1.0 + cfg.alpha / 2.0}, {-2.0 * eig.lambda1, 1.0}};
        if (cfg.noise_family == "power" && cfg.b != 0.0)
            terms.push_back({cov.q_inf * cfg.b * cfg.b, cfg.m});
        return {GrowthFunction(terms), pairing * pairing, Observable::phi_pairing_sq};
    }
    if (cfg.drift_family == "zero" && cfg.noise_family == "power" && cfg.b != 0.0) {
        std::vector<GrowthTerm> terms{{cov.q_inf * cfg.b * cfg.b, cfg.m},
                                      {-2.0 * eig.lambda1, 1.0}};
        return {GrowthFunction(terms), pairing * pairing, Observable::phi_pairing_sq};
    }
    throw ConfigError(
        "key 'drift.family': no comparison-ODE family for this drift/noise combination");
}

int cmd_eig(const CommonOptions& opts) {
    const RunConfig cfg = load_config(opts);
    const Domain1D domain(cfg.length, cfg.n);
    const EigenPair analytic = analytic_eigenpair(domain);
    const EigenPair discrete = discrete_eigenpair(domain, 1e-10);

    auto norm_residual = [&domain](const Field& phi) {
        double mass = 0.0;
        for (double v : phi.values) mass += v;
        return std::abs(domain.h * mass - 1.0);
    };

    json summary;
    summary["command"] = "eig";
    summary["length"] = cfg.length;
    summary["n"] = cfg.n;
    summary["lambda1_analytic"] = analytic.lambda1;
    summary["lambda1_discrete"] = discrete.lambda1;
    summary["lambda1_difference"] = analytic.lambda1 - discrete.lambda1;
    summary["phi_norm_residual_analytic"] = norm_residual(analytic.phi);
    summary["phi_norm_residual_discrete"] = norm_residual(discrete.phi);
    summary["config"] = echo(cfg);
    emit(opts, summary, nullptr);
    return 0;
}

int cmd_check(const CommonOptions& opts) {
    const RunConfig cfg = load_config(opts);
    const ProblemSpec prob = build_problem(cfg);
    const EigenPair eig = analytic_eigenpair(prob.domain);
    const Field u0 = make_initial(prob.initial, prob.domain);
    const CovarianceOperator cov = assemble(prob.kernel, prob.domain);
    const double q1 = cov.q_inf;
    const double q0 = cov.q_sup;

    std::vector<CriterionReport> reports;

    if (cfg.drift_family == "fujita") {
        reports.push_back(check_fujita(u0, cfg.alpha, eig));
        if (cfg.noise_family == "power" && cfg.m >= 1.0 && cfg.m < 1.0 + cfg.alpha / 2.0)
            reports.push_back(check_drift_noise_blowup(u0, cfg.alpha, cfg.m, cfg.b, q1, eig));
    }
    if (cfg.drift_family == "power" && cfg.a1 > 0.0 && cfg.beta > 1.0) {
        reports.push_back(check_drift_blowup(u0, cfg.a1, cfg.a2, cfg.beta, eig));
        reports.push_back(check_drift_conditions_power(u0, cfg.a1, cfg.beta, eig));
        if (cfg.noise_family == "power")
            reports.push_back(
                check_positivity_power_bounds(cfg.a1, cfg.a2, cfg.beta, cfg.b, cfg.m, q0));
    }
    if (cfg.noise_family == "power" && cfg.m > 1.0 && cfg.b != 0.0) {
        if (q1 > 0.0) reports.push_back(check_noise_blowup(u0, cfg.m, cfg.b, q1, eig));
        reports.push_back(check_noise_conditions_power(u0, cfg.b, cfg.m, q1, eig));
        reports.push_back(check_parameter_range("power_noise_positivity",
                                                {{"m", cfg.m}, {"n", 1.0}}));
    }
    if (cfg.operator_type == "p_laplacian" && cfg.noise_family == "power")
        reports.push_back(check_parameter_range("p_laplacian_positivity",
                                                {{"p", cfg.p}, {"m", cfg.m}, {"n", 1.0}}));
    if (cfg.drift_family == "allen_cahn" && cfg.noise_family == "power")
        reports.push_back(check_parameter_range("allen_cahn_global", {{"m", cfg.m}}));
    if (cfg.drift_family == "power_decay" && cfg.noise_family == "power")
        reports.push_back(
            check_parameter_range("power_decay_global", {{"m", cfg.m}, {"gamma", cfg.gamma}}));
    if (cfg.noise_family == "gradient")
        reports.push_back(check_parameter_range(
            "gradient_noise_global", {{"nu", cfg.nu}, {"q0", cfg.k * cfg.k * q0}}));

    json arr = json::array();
    for (const CriterionReport& rep : reports) arr.push_back(criterion_to_json(rep));
    emit(opts, arr, nullptr);
    return 0;
}

int cmd_bound(const CommonOptions& opts) {
    const RunConfig cfg = load_config(opts);
    const ProblemSpec prob = build_problem(cfg);
    const ComparisonSetup setup = comparison_setup(cfg, prob);
    const BoundResult bound = blowup_time_bound(setup.growth, setup.x0);

    json summary;
    summary["command"] = "bound";
    summary["t_star"] = bound.t_star;
    summary["abs_error_estimate"] = bound.abs_error_estimate;
    summary["method"] = bound.method == BoundMethod::closed_form ? "closed_form" : "quadrature";
    summary["x0"] = setup.x0;
    summary["observable"] = kObservableNames[static_cast<std::size_t>(setup.observable)];
    summary["growth_terms"] = json::array();
    for (const GrowthTerm& t : setup.growth.terms())
        summary["growth_terms"].push_back(
            {{"coefficient", t.coefficient}, {"exponent", t.exponent}});
    summary["config"] = echo(cfg);
    emit(opts, summary, nullptr);
    return 0;
}

int cmd_simulate(const CommonOptions& opts) {
    const RunConfig cfg = load_config(opts);
    const ProblemSpec prob = build_problem(cfg);
    const SolverConfig solver = build_solver(cfg);
    const PathResult path = simulate_path(prob, solver, cfg.seed);

    json summary;
    summary["command"] = "simulate";
    summary["blow_up_time"] = path.blow_up_time ? json(*path.blow_up_time) : json(nullptr);
    summary["exploded"] = path.exploded;
    summary["samples"] = path.times.size();
    summary["config"] = echo(cfg);
    const std::string csv = path_series_csv(path);
    emit(opts, summary, &csv);
    return 0;
}

int cmd_mc(const CommonOptions& opts) {
    const RunConfig cfg = load_config(opts);
    const ProblemSpec prob = build_problem(cfg);
    const SolverConfig solver = build_solver(cfg);
    const EnsembleStats stats = run_ensemble(prob, solver, build_ensemble(cfg, opts.workers));

    json summary;
    summary["command"] = "mc";
    summary["blow_up"] = blowup_stats_json(stats);
    summary["config"] = echo(cfg);
    const std::string csv = ensemble_series_csv(stats);
    emit(opts, summary, &csv);
    return 0;
}

int cmd_compare(const CommonOptions& opts) {
    const RunConfig cfg = load_config(opts);
    const ProblemSpec prob = build_problem(cfg);
    const SolverConfig solver = build_solver(cfg);
    const ComparisonSetup setup = comparison_setup(cfg, prob);

    const EnsembleStats stats = run_ensemble(prob, solver, build_ensemble(cfg, opts.workers));
    const DominationReport report =
        moment_domination_report(stats, setup.growth, setup.x0, setup.observable);

    json summary;
    summary["command"] = "compare";
    summary["observable"] = kObservableNames[static_cast<std::size_t>(report.observable)];
    summary["x0"] = report.x0;
    summary["disc_tol_frac"] = report.disc_tol_frac;
    summary["all_pass"] = report.all_pass;
    summary["first_failure_time"] =
        report.first_failure_time ? json(*report.first_failure_time) : json(nullptr);
    summary["zeta_blow_up_time"] =
        report.zeta_blow_up_time ? json(*report.zeta_blow_up_time) : json(nullptr);
    summary["entries"] = json::array();
    for (const DominationEntry& e : report.entries)
        summary["entries"].push_back({{"t", e.t},
                                      {"mean", e.mean},
                                      {"ci", e.ci},
                                      {"zeta", e.zeta},
                                      {"pass", e.pass}});
    summary["growth_terms"] = json::array();
    for (const GrowthTerm& t : setup.growth.terms())
        summary["growth_terms"].push_back(
            {{"coefficient", t.coefficient}, {"exponent", t.exponent}});
    summary["blow_up"] = blowup_stats_json(stats);
    summary["config"] = echo(cfg);
    const std::string csv = ensemble_series_csv(stats);
    emit(opts, summary, &csv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spde_lab: stochastic reaction-diffusion laboratory on an interval"};
    app.require_subcommand(1);

    CommonOptions opts;
    CLI::App* eig = app.add_subcommand("eig", "Principal Dirichlet eigenpair, analytic vs discrete");
    CLI::App* check = app.add_subcommand("check", "Evaluate every applicable criterion");
    CLI::App* bound = app.add_subcommand("bound", "Blow-up time upper bound for the comparison ODE");
    CLI::App* simulate = app.add_subcommand("simulate", "Integrate a single path");
    CLI::App* mc = app.add_subcommand("mc", "Run a path ensemble and report moment statistics");
    CLI::App* compare =
        app.add_subcommand("compare", "Monte Carlo moments vs the comparison-ODE solution");
    for (CLI::App* cmd : {eig, check, bound, simulate, mc, compare})
        add_common_options(cmd, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfigError;
    }

    try {
        if (eig->parsed()) return cmd_eig(opts);
        if (check->parsed()) return cmd_check(opts);
        if (bound->parsed()) return cmd_bound(opts);
        if (simulate->parsed()) return cmd_simulate(opts);
        if (mc->parsed()) return cmd_mc(opts);
        if (compare->parsed()) return cmd_compare(opts);
    } catch (const spdelab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumericError;
    }
    return 0;
}
