#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "spdelab/comparison.hpp"
#include "spdelab/dynamics.hpp"

namespace spdelab {

struct EnsembleConfig {
    int n_paths = 100;
    std::uint64_t base_seed = 0;
    int max_workers = 0;  // 0: hardware concurrency
};

// Count/mean/M2 accumulator with the pairwise (Chan) merge, so that
// aggregation over any split of the ensemble gives identical results.
struct MomentAcc {
    std::int64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    static MomentAcc of(double x) { return {1, x, 0.0}; }

    friend MomentAcc merge(const MomentAcc& a, const MomentAcc& b) {
        if (a.n == 0) return b;
        if (b.n == 0) return a;
        MomentAcc out;
        out.n = a.n + b.n;
        const double delta = b.mean - a.mean;
        out.mean = a.mean + delta * static_cast<double>(b.n) / static_cast<double>(out.n);
        out.m2 = a.m2 + b.m2 +
                 delta * delta * static_cast<double>(a.n) * static_cast<double>(b.n) /
                     static_cast<double>(out.n);
        return out;
    }

    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
};

// Per-time-point ensemble estimates. Exploded paths stop contributing after
// their blow-up time (censoring); n_alive tracks the surviving count.
struct EnsembleStats {
    std::vector<double> times;
    std::array<std::vector<double>, kNumObservables> mean;
    std::array<std::vector<double>, kNumObservables> variance;
    std::array<std::vector<double>, kNumObservables> ci_halfwidth;  // 3 sigma
    std::vector<std::int64_t> n_alive;
    int n_paths = 0;
    double blow_up_fraction = 0.0;
    std::optional<double> blow_up_q10, blow_up_q50, blow_up_q90;
};

namespace detail {

inline MomentAcc reduce_paths(const std::vector<PathResult>& paths, std::size_t t_idx, int obs,
                              std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) {
        const PathResult& p = paths[lo];
        if (t_idx < p.rows.size())
            return MomentAcc::of(p.rows[t_idx][static_cast<std::size_t>(obs)]);
        return {};
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return merge(reduce_paths(paths, t_idx, obs, lo, mid),
                 reduce_paths(paths, t_idx, obs, mid, hi));
}

inline double quantile_sorted(const std::vector<double>& sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double pos = p * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline std::vector<double> record_schedule(const SolverConfig& cfg) {
    std::vector<double> times{0.0};
    const auto n_steps = static_cast<long long>(cfg.t_max / cfg.dt + 1e-9);
    for (long long k = cfg.record_stride; k <= n_steps; k += cfg.record_stride)
        times.push_back(static_cast<double>(k) * cfg.dt);
    return times;
}

}  // namespace detail

// Deterministic index-ordered aggregation of finished paths. Independent of
// how the paths were scheduled across workers.
inline EnsembleStats aggregate_ensemble(const std::vector<PathResult>& paths,
                                        std::vector<double> times) {
    EnsembleStats stats;
    stats.times = std::move(times);
    stats.n_paths = static_cast<int>(paths.size());
    const std::size_t n_times = stats.times.size();
    for (int j = 0; j < kNumObservables; ++j) {
        stats.mean[static_cast<std::size_t>(j)].resize(n_times);
        stats.variance[static_cast<std::size_t>(j)].resize(n_times);
        stats.ci_halfwidth[static_cast<std::size_t>(j)].resize(n_times);
    }
    stats.n_alive.resize(n_times);

    for (std::size_t t = 0; t < n_times; ++t) {
        for (int j = 0; j < kNumObservables; ++j) {
            const MomentAcc acc = detail::reduce_paths(paths, t, j, 0, paths.size());
            const auto js = static_cast<std::size_t>(j);
            if (acc.n == 0) {
                stats.mean[js][t] = std::numeric_limits<double>::quiet_NaN();
                stats.variance[js][t] = std::numeric_limits<double>::quiet_NaN();
                stats.ci_halfwidth[js][t] = std::numeric_limits<double>::quiet_NaN();
            } else {
                stats.mean[js][t] = acc.mean;
                stats.variance[js][t] = acc.variance();
                stats.ci_halfwidth[js][t] =
                    3.0 * std::sqrt(acc.variance() / static_cast<double>(acc.n));
            }
            if (j == 0) stats.n_alive[t] = acc.n;
        }
    }

    std::vector<double> blow_times;
    for (const PathResult& p : paths)
        if (p.blow_up_time) blow_times.push_back(*p.blow_up_time);
    stats.blow_up_fraction =
        paths.empty() ? 0.0 : static_cast<double>(blow_times.size()) / static_cast<double>(paths.size());
    if (!blow_times.empty()) {
        std::sort(blow_times.begin(), blow_times.end());
        stats.blow_up_q10 = detail::quantile_sorted(blow_times, 0.10);
        stats.blow_up_q50 = detail::quantile_sorted(blow_times, 0.50);
        stats.blow_up_q90 = detail::quantile_sorted(blow_times, 0.90);
    }
    return stats;
}

// Runs n_paths independent paths with per-path streams (base_seed, index) and
// aggregates them in fixed index order: results are bit-identical for any
// worker count.
inline EnsembleStats run_ensemble(const ProblemSpec& prob, const SolverConfig& scfg,
                                  const EnsembleConfig& ecfg) {
    if (ecfg.n_paths < 1)
        throw std::invalid_argument("run_ensemble: n_paths must be >= 1");
    validate_solver_config(scfg, prob);

    const CovarianceOperator cov = assemble(prob.kernel, prob.domain);
    const EigenPair eig = analytic_eigenpair(prob.domain);

    std::vector<PathResult> paths(static_cast<std::size_t>(ecfg.n_paths));
    int workers = ecfg.max_workers > 0
                      ? ecfg.max_workers
                      : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = std::min(workers, ecfg.n_paths);

    if (workers <= 1) {
        for (int i = 0; i < ecfg.n_paths; ++i)
            paths[static_cast<std::size_t>(i)] =
                simulate_path(prob, scfg, ecfg.base_seed, static_cast<std::uint64_t>(i), cov, eig);
    } else {
        std::atomic<int> next{0};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        auto worker = [&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= ecfg.n_paths) return;
                try {
                    paths[static_cast<std::size_t>(i)] = simulate_path(
                        prob, scfg, ecfg.base_seed, static_cast<std::uint64_t>(i), cov, eig);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    return aggregate_ensemble(paths, detail::record_schedule(scfg));
}

struct DominationEntry {
    double t;
    double mean;
    double ci;
    double zeta;
    bool pass;
};

// Verdict of the moment-domination experiment: at each sample time before the
// comparison solution zeta blows up, the censored ensemble mean (plus its CI
// and a 5% discretization allowance) must dominate zeta.
struct DominationReport {
    Observable observable;
    double x0 = 0.0;
    double disc_tol_frac = 0.05;
    std::vector<DominationEntry> entries;
    bool all_pass = true;
    std::optional<double> first_failure_time;
    std::optional<double> zeta_blow_up_time;
};

inline DominationReport moment_domination_report(const EnsembleStats& stats,
                                                 const GrowthFunction& g, double x0,
                                                 Observable observable) {
    const auto obs = static_cast<std::size_t>(observable);
    if (stats.times.empty() || stats.mean[obs].empty())
        throw std::invalid_argument("moment_domination_report: empty ensemble statistics");
    const double initial = stats.mean[obs][0];
    if (!(std::abs(initial - x0) <= 1e-9 * std::max(1.0, std::abs(x0))))
        throw std::invalid_argument(
            "moment_domination_report: x0 does not match the observable's initial value");

    const double t_last = stats.times.back();
    const double ode_dt = std::max(t_last, 1e-12) / 2e5;
    const OdeTrajectory zeta = integrate_comparison_ode(g, x0, ode_dt, t_last);

    DominationReport report;
    report.observable = observable;
    report.x0 = x0;
    report.zeta_blow_up_time = zeta.blow_up_time;

    for (std::size_t k = 0; k < stats.times.size(); ++k) {
        const double t = stats.times[k];
        if (zeta.blow_up_time && t >= *zeta.blow_up_time) break;
        const auto idx = static_cast<std::size_t>(
            std::min(static_cast<double>(zeta.values.size() - 1), std::round(t / ode_dt)));
        const double z = zeta.values[idx];
        const double mean = stats.mean[obs][k];
        const double ci = stats.ci_halfwidth[obs][k];
        const bool pass =
            std::isfinite(mean) && mean + ci + report.disc_tol_frac * z >= z;
        report.entries.push_back({t, mean, ci, z, pass});
        if (!pass && report.all_pass) {
            report.all_pass = false;
            report.first_failure_time = t;
        }
    }
    return report;
}

}  // namespace spdelab
