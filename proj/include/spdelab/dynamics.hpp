#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "spdelab/domain.hpp"
#include "spdelab/grid_ops.hpp"
#include "spdelab/noise.hpp"
#include "spdelab/rng.hpp"
#include "spdelab/spectral.hpp"
#include "spdelab/tridiag.hpp"

namespace spdelab {

namespace detail {

// sgn(u) |u|^e with fast paths for the common exponents.
inline double pow_signed(double u, double e) {
    if (e == 1.0) return u;
    if (e == 2.0) return u * std::abs(u);
    if (e == 1.5) return u * std::sqrt(std::abs(u));
    return std::copysign(std::pow(std::abs(u), e), u);
}

// |u|^e.
inline double pow_abs(double u, double e) {
    if (e == 1.0) return std::abs(u);
    if (e == 2.0) return u * u;
    return std::pow(std::abs(u), e);
}

}  // namespace detail

// Reaction term families. Non-integer powers of negative arguments follow the
// odd extension sgn(u)|u|^p, except the |u|^{1+alpha} family which is
// nonnegative by definition.
struct DriftSpec {
    enum class Family { zero, power, fujita, allen_cahn, power_decay };

    Family family = Family::zero;
    double a1 = 0.0, a2 = 0.0, beta = 1.0;  // power: a1 u^beta + a2 u
    double alpha = 0.0;                     // fujita: |u|^{1+alpha}
    double gamma = 0.0;                     // power_decay: -u^gamma

    static DriftSpec zero() { return {}; }

    static DriftSpec power(double a1, double a2, double beta) {
        if (!(beta >= 1.0))
            throw std::invalid_argument("DriftSpec::power: beta must be >= 1");
        DriftSpec s;
        s.family = Family::power;
        s.a1 = a1;
        s.a2 = a2;
        s.beta = beta;
        return s;
    }

    static DriftSpec fujita(double alpha) {
        if (!(alpha > 0.0))
            throw std::invalid_argument("DriftSpec::fujita: alpha must be > 0");
        DriftSpec s;
        s.family = Family::fujita;
        s.alpha = alpha;
        return s;
    }

    static DriftSpec allen_cahn() {
        DriftSpec s;
        s.family = Family::allen_cahn;
        return s;
    }

    static DriftSpec power_decay(double gamma) {
        if (!(gamma > 1.0))
            throw std::invalid_argument("DriftSpec::power_decay: gamma must be > 1");
        DriftSpec s;
        s.family = Family::power_decay;
        s.gamma = gamma;
        return s;
    }

    double eval(double u) const {
        switch (family) {
            case Family::zero: return 0.0;
            case Family::power: return a1 * detail::pow_signed(u, beta) + a2 * u;
            case Family::fujita: return detail::pow_abs(u, 1.0 + alpha);
            case Family::allen_cahn: return u * (1.0 - u * u);
            case Family::power_decay: return -detail::pow_signed(u, gamma);
        }
        return 0.0;
    }
};

// Noise intensity families: pointwise power b u^m or gradient noise k u_x.
struct DiffusionSpec {
    enum class Family { zero, power, gradient };

    Family family = Family::zero;
    double b = 0.0, m = 1.0;  // power: b sgn(u)|u|^m
    double k = 0.0;           // gradient: k u_x

    static DiffusionSpec zero() { return {}; }

    static DiffusionSpec power(double b, double m) {
        if (!(m >= 1.0))
            throw std::invalid_argument("DiffusionSpec::power: m must be >= 1");
        DiffusionSpec s;
        s.family = Family::power;
        s.b = b;
        s.m = m;
        return s;
    }

    static DiffusionSpec gradient(double k) {
        DiffusionSpec s;
        s.family = Family::gradient;
        s.k = k;
        return s;
    }

    bool is_active() const {
        switch (family) {
            case Family::zero: return false;
            case Family::power: return b != 0.0;
            case Family::gradient: return k != 0.0;
        }
        return false;
    }
};

inline Field drift_eval(const DriftSpec& spec, const Field& u) {
    Field out(u.domain);
    for (int i = 0; i < u.size(); ++i) out[i] = spec.eval(u[i]);
    return out;
}

// sigma(u) dW pointwise: power acts on node values, gradient on the centered
// difference of u (boundary values zero).
inline void diffusion_apply_into(const DiffusionSpec& spec, const Field& u, const Field& dw,
                                 Field& out) {
    require_same_domain(u, dw, "diffusion_apply");
    const int n = u.size();
    switch (spec.family) {
        case DiffusionSpec::Family::zero:
            for (int i = 0; i < n; ++i) out[i] = 0.0;
            break;
        case DiffusionSpec::Family::power:
            for (int i = 0; i < n; ++i)
                out[i] = spec.b * detail::pow_signed(u[i], spec.m) * dw[i];
            break;
        case DiffusionSpec::Family::gradient: {
            const double inv_2h = 1.0 / (2.0 * u.domain.h);
            for (int i = 0; i < n; ++i) {
                const double left = (i > 0) ? u[i - 1] : 0.0;
                const double right = (i + 1 < n) ? u[i + 1] : 0.0;
                out[i] = spec.k * (right - left) * inv_2h * dw[i];
            }
            break;
        }
    }
}

inline Field diffusion_apply(const DiffusionSpec& spec, const Field& u, const Field& dw) {
    Field out(u.domain);
    diffusion_apply_into(spec, u, dw, out);
    return out;
}

struct SpatialOperator {
    enum class Type { laplacian, p_laplacian };

    Type type = Type::laplacian;
    double nu = 1.0;  // viscosity, laplacian only
    double p = 2.0;   // p_laplacian exponent

    static SpatialOperator laplacian(double nu = 1.0) {
        if (!(nu > 0.0))
            throw std::invalid_argument("SpatialOperator::laplacian: nu must be > 0");
        SpatialOperator op;
        op.type = Type::laplacian;
        op.nu = nu;
        return op;
    }

    static SpatialOperator p_laplacian(double p) {
        if (!(p >= 2.0))
            throw std::invalid_argument("SpatialOperator::p_laplacian: p must be >= 2");
        SpatialOperator op;
        op.type = Type::p_laplacian;
        op.p = p;
        return op;
    }
};

struct InitialProfile {
    enum class Shape { sine, scaled_phi, bump, constant };

    Shape shape = Shape::sine;
    double amplitude = 1.0;  // sine / constant / bump height
    double mass = 1.0;       // scaled_phi: target (u0, phi)
    double center = 0.5;
    double width = 0.1;

    static InitialProfile sine(double amplitude) {
        InitialProfile p;
        p.shape = Shape::sine;
        p.amplitude = amplitude;
        return p;
    }

    static InitialProfile scaled_phi(double mass) {
        InitialProfile p;
        p.shape = Shape::scaled_phi;
        p.mass = mass;
        return p;
    }

    static InitialProfile bump(double center, double width, double height) {
        if (!(width > 0.0))
            throw std::invalid_argument("InitialProfile::bump: width must be > 0");
        InitialProfile p;
        p.shape = Shape::bump;
        p.center = center;
        p.width = width;
        p.amplitude = height;
        return p;
    }

    static InitialProfile constant(double c) {
        InitialProfile p;
        p.shape = Shape::constant;
        p.amplitude = c;
        return p;
    }
};

inline Field make_initial(const InitialProfile& profile, const Domain1D& d) {
    switch (profile.shape) {
        case InitialProfile::Shape::sine: {
            const double pi = std::numbers::pi;
            return Field::from_function(d, [&](double x) {
                return profile.amplitude * std::sin(pi * x / d.length);
            });
        }
        case InitialProfile::Shape::scaled_phi: {
            EigenPair eig = analytic_eigenpair(d);
            const double c = profile.mass / inner_product(eig.phi, eig.phi);
            Field u = std::move(eig.phi);
            for (double& v : u.values) v *= c;
            return u;
        }
        case InitialProfile::Shape::bump:
            return Field::from_function(d, [&](double x) {
                const double xi = (x - profile.center) / profile.width;
                const double xi2 = xi * xi;
                if (xi2 >= 1.0) return 0.0;
                return profile.amplitude * std::exp(1.0 - 1.0 / (1.0 - xi2));
            });
        case InitialProfile::Shape::constant:
            return Field(d, profile.amplitude);
    }
    return Field(d);
}

struct ProblemSpec {
    Domain1D domain;
    SpatialOperator op;
    DriftSpec drift;
    DiffusionSpec diffusion;
    Kernel kernel;
    InitialProfile initial;
};

enum class Scheme { semi_implicit, tamed_explicit };

struct SolverConfig {
    double dt = 1e-4;
    double t_max = 1.0;
    double blowup_threshold = 1e6;
    Scheme scheme = Scheme::semi_implicit;
    int record_stride = 100;
};

inline void validate_solver_config(const SolverConfig& cfg, const ProblemSpec& prob) {
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("SolverConfig: dt must be > 0");
    if (!(cfg.dt < cfg.t_max)) throw std::invalid_argument("SolverConfig: dt must be < t_max");
    if (cfg.record_stride < 1)
        throw std::invalid_argument("SolverConfig: record_stride must be >= 1");
    if (!(cfg.blowup_threshold > 0.0))
        throw std::invalid_argument("SolverConfig: blowup_threshold must be > 0");
    if (prob.op.type == SpatialOperator::Type::p_laplacian &&
        cfg.scheme != Scheme::tamed_explicit)
        throw std::invalid_argument(
            "SolverConfig: the p-Laplacian operator requires scheme tamed_explicit");
}

// Snapshot observables of a path, in fixed column order.
inline constexpr int kNumObservables = 7;
inline constexpr std::array<const char*, kNumObservables> kObservableNames = {
    "phi_pairing", "phi_pairing_sq", "l2sq", "l4_4", "sup", "neg_l2sq", "neg_l1"};

enum class Observable : int {
    phi_pairing = 0,
    phi_pairing_sq = 1,
    l2sq = 2,
    l4_4 = 3,
    sup = 4,
    neg_l2sq = 5,
    neg_l1 = 6,
};

using ObservableRow = std::array<double, kNumObservables>;

inline ObservableRow record_observables(const Field& u, const EigenPair& eig) {
    const double pairing = inner_product(u, eig.phi);
    const NegativePartMass neg = negative_part_mass(u);
    return {pairing,        pairing * pairing, l2_norm_sq(u), l4_norm_4(u),
            sup_norm(u),    neg.l2sq,          neg.l1};
}

struct PathResult {
    std::vector<double> times;
    std::vector<ObservableRow> rows;
    std::optional<double> blow_up_time;
    bool exploded = false;
};

namespace detail {

// Scratch buffers shared across steps of one path.
struct StepWorkspace {
    Field drift;
    Field noise;
    Field dw;
    std::vector<double> z;

    explicit StepWorkspace(const Domain1D& d) : drift(d), noise(d), dw(d) {}
};

inline void step_into(Field& u, const ProblemSpec& prob, const SolverConfig& cfg,
                      const CovarianceOperator& cov, const ConstTridiagSolver* implicit_solver,
                      CounterRng& rng, StepWorkspace& ws) {
    const int n = u.size();
    const double dt = cfg.dt;

    const bool noisy = prob.diffusion.is_active();
    if (noisy) {
        sample_increment_into(cov, dt, rng, ws.z, ws.dw);
        diffusion_apply_into(prob.diffusion, u, ws.dw, ws.noise);
    }

    if (cfg.scheme == Scheme::semi_implicit) {
        // (I - dt nu Lap) u+ = u + dt f(u) + sigma(u) dW
        for (int i = 0; i < n; ++i) {
            double rhs = u[i] + dt * prob.drift.eval(u[i]);
            if (noisy) rhs += ws.noise[i];
            u[i] = rhs;
        }
        implicit_solver->solve_in_place(u.values);
    } else {
        // u+ = u + dt G / (1 + dt |G|_inf) + sigma(u) dW, G = A(u) + f(u)
        if (prob.op.type == SpatialOperator::Type::laplacian) {
            laplacian_apply_into(u, ws.drift);
            for (int i = 0; i < n; ++i)
                ws.drift[i] = prob.op.nu * ws.drift[i] + prob.drift.eval(u[i]);
        } else {
            p_laplacian_apply_into(u, prob.op.p, ws.drift);
            for (int i = 0; i < n; ++i) ws.drift[i] += prob.drift.eval(u[i]);
        }
        const double tame = 1.0 / (1.0 + dt * sup_norm(ws.drift));
        for (int i = 0; i < n; ++i) {
            double next = u[i] + dt * tame * ws.drift[i];
            if (noisy) next += ws.noise[i];
            u[i] = next;
        }
    }
}

inline ConstTridiagSolver make_implicit_solver(const ProblemSpec& prob, const SolverConfig& cfg) {
    const double c = prob.op.nu * cfg.dt / (prob.domain.h * prob.domain.h);
    return ConstTridiagSolver(prob.domain.n, 1.0 + 2.0 * c, -c);
}

}  // namespace detail

// One time step. The semi-implicit scheme treats the Laplacian implicitly via
// the tridiagonal solve and the reaction explicitly; the tamed scheme divides
// the whole drift increment by 1 + dt |drift|_inf.
inline Field step(const Field& u, const ProblemSpec& prob, const SolverConfig& cfg,
                  const CovarianceOperator& cov, CounterRng& rng) {
    validate_solver_config(cfg, prob);
    Field next = u;
    detail::StepWorkspace ws(u.domain);
    if (cfg.scheme == Scheme::semi_implicit) {
        const ConstTridiagSolver solver = detail::make_implicit_solver(prob, cfg);
        detail::step_into(next, prob, cfg, cov, &solver, rng, ws);
    } else {
        detail::step_into(next, prob, cfg, cov, nullptr, rng, ws);
    }
    return next;
}

// Integrates one path, recording observables at t = 0 and every record_stride
// steps. Blow-up (threshold crossing or non-finite values) is data, not an
// error: the path stops and reports blow_up_time.
inline PathResult simulate_path(const ProblemSpec& prob, const SolverConfig& cfg,
                                std::uint64_t base_seed, std::uint64_t path_index,
                                const CovarianceOperator& cov, const EigenPair& eig) {
    validate_solver_config(cfg, prob);

    Field u = make_initial(prob.initial, prob.domain);
    if (!(cfg.blowup_threshold > sup_norm(u)))
        throw std::invalid_argument("simulate_path: blowup_threshold must exceed |u0|_inf");

    CounterRng rng(base_seed, path_index);
    detail::StepWorkspace ws(prob.domain);
    std::optional<ConstTridiagSolver> implicit_solver;
    if (cfg.scheme == Scheme::semi_implicit)
        implicit_solver.emplace(detail::make_implicit_solver(prob, cfg));

    PathResult result;
    result.times.push_back(0.0);
    result.rows.push_back(record_observables(u, eig));

    const auto n_steps = static_cast<long long>(cfg.t_max / cfg.dt + 1e-9);
    for (long long k = 1; k <= n_steps; ++k) {
        detail::step_into(u, prob, cfg, cov, implicit_solver ? &*implicit_solver : nullptr, rng,
                          ws);
        const double t = static_cast<double>(k) * cfg.dt;

        bool bad = false;
        double sup = 0.0;
        for (double v : u.values) {
            if (!std::isfinite(v)) {
                bad = true;
                break;
            }
            sup = std::max(sup, std::abs(v));
        }
        if (bad || sup > cfg.blowup_threshold) {
            result.blow_up_time = t;
            result.exploded = true;
            break;
        }
        if (k % cfg.record_stride == 0) {
            result.times.push_back(t);
            result.rows.push_back(record_observables(u, eig));
        }
    }
    return result;
}

inline PathResult simulate_path(const ProblemSpec& prob, const SolverConfig& cfg,
                                std::uint64_t seed) {
    const CovarianceOperator cov = assemble(prob.kernel, prob.domain);
    const EigenPair eig = analytic_eigenpair(prob.domain);
    return simulate_path(prob, cfg, seed, 0, cov, eig);
}

}  // namespace spdelab
