#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spdelab/domain.hpp"
#include "spdelab/dynamics.hpp"
#include "spdelab/grid_ops.hpp"
#include "spdelab/quadrature.hpp"
#include "spdelab/spectral.hpp"

namespace spdelab {

// g(r) = sum_i c_i r^{p_i} with exponents >= 1; the right-hand side of the
// scalar comparison ODE. Negative arguments follow the odd extension.
struct GrowthTerm {
    double coefficient;
    double exponent;
};

class GrowthFunction {
public:
    explicit GrowthFunction(std::vector<GrowthTerm> terms) : terms_(std::move(terms)) {
        if (terms_.empty())
            throw std::invalid_argument("GrowthFunction: needs at least one term");
        for (const GrowthTerm& t : terms_)
            if (!(t.exponent >= 1.0))
                throw std::invalid_argument("GrowthFunction: exponents must be >= 1");
    }

    double operator()(double r) const {
        double s = 0.0;
        for (const GrowthTerm& t : terms_)
            s += t.coefficient * detail::pow_signed(r, t.exponent);
        return s;
    }

    const std::vector<GrowthTerm>& terms() const { return terms_; }

    // Terms merged by exponent, descending; zero coefficients dropped.
    std::vector<GrowthTerm> normalized_terms() const {
        std::vector<GrowthTerm> out = terms_;
        std::sort(out.begin(), out.end(),
                  [](const GrowthTerm& a, const GrowthTerm& b) { return a.exponent > b.exponent; });
        std::vector<GrowthTerm> merged;
        for (const GrowthTerm& t : out) {
            if (!merged.empty() && merged.back().exponent == t.exponent)
                merged.back().coefficient += t.coefficient;
            else
                merged.push_back(t);
        }
        std::erase_if(merged, [](const GrowthTerm& t) { return t.coefficient == 0.0; });
        return merged;
    }

private:
    std::vector<GrowthTerm> terms_;
};

// Outcome of one sufficient-condition check. All inequalities are strict:
// margin > 0 if and only if the condition is satisfied.
struct CriterionReport {
    std::string name;
    bool satisfied = false;
    double margin = 0.0;
    std::map<std::string, double> inputs;
    std::string notes;
};

enum class BoundMethod { quadrature, closed_form };

struct BoundResult {
    double t_star;
    double abs_error_estimate;
    BoundMethod method;
};

namespace detail {

// Radius beyond which the leading term dominates the sum of all others.
inline double domination_radius(const std::vector<GrowthTerm>& terms) {
    const GrowthTerm& lead = terms.front();
    double radius = 1.0;
    const double others = static_cast<double>(terms.size() - 1);
    for (std::size_t i = 1; i < terms.size(); ++i) {
        const double gap = lead.exponent - terms[i].exponent;
        const double r =
            std::pow(2.0 * others * std::abs(terms[i].coefficient) / lead.coefficient, 1.0 / gap);
        radius = std::max(radius, r);
    }
    return radius;
}

// Scans g over [x0, R] on a geometric grid and bisects any sign change down
// to the offending root.
inline std::optional<double> find_nonpositive_point(const GrowthFunction& g, double x0,
                                                    double radius) {
    if (g(x0) <= 0.0) return x0;
    const int samples = 4096;
    const double hi = std::max(radius, x0 * (1.0 + 1e-12));
    double prev = x0;
    for (int k = 1; k <= samples; ++k) {
        const double r = x0 * std::pow(hi / x0, static_cast<double>(k) / samples);
        if (g(r) <= 0.0) {
            double lo = prev, up = r;
            for (int it = 0; it < 200 && (up - lo) > 1e-14 * up; ++it) {
                const double mid = 0.5 * (lo + up);
                (g(mid) <= 0.0 ? up : lo) = mid;
            }
            return up;
        }
        prev = r;
    }
    return std::nullopt;
}

}  // namespace detail

// Upper bound on the blow-up time, t* = int_{x0}^{inf} dr / g(r). Uses the
// closed form (1/c) log(a x0 / (a x0 - c)) for the two-term shape
// a r^2 - c r; otherwise substitutes s = 1/r (and s = w^k when the leading
// exponent is below 2) and integrates adaptively to 1e-10 absolute.
inline BoundResult blowup_time_bound(const GrowthFunction& g, double x0,
                                     bool force_quadrature = false) {
    if (!(x0 > 0.0))
        throw std::invalid_argument("blowup_time_bound: x0 must be > 0");
    const std::vector<GrowthTerm> terms = g.normalized_terms();
    if (terms.empty())
        throw std::domain_error("blowup_time_bound: g vanishes identically");

    const GrowthTerm& lead = terms.front();
    if (lead.coefficient > 0.0) {
        const double radius = detail::domination_radius(terms);
        if (auto bad = detail::find_nonpositive_point(g, x0, radius))
            throw std::domain_error("blowup_time_bound: g is not positive on [x0, inf), g(r) <= 0 near r = " +
                                    std::to_string(*bad));
    } else {
        throw std::domain_error("blowup_time_bound: g is not positive on [x0, inf)");
    }
    if (!(lead.exponent > 1.0))
        throw std::domain_error("blowup_time_bound: leading exponent <= 1, integral diverges");

    if (!force_quadrature && terms.size() == 2 && terms[0].exponent == 2.0 &&
        terms[1].exponent == 1.0 && terms[1].coefficient < 0.0) {
        const double a = terms[0].coefficient;
        const double c = -terms[1].coefficient;
        const double t = std::log(a * x0 / (a * x0 - c)) / c;
        return {t, 8.0 * std::numeric_limits<double>::epsilon() * t, BoundMethod::closed_form};
    }

    // t* = int_0^{1/x0} ds / sum_i c_i s^{2 - p_i}; for 1 < p_lead < 2 the
    // integrand has an integrable endpoint singularity, removed by s = w^k.
    const double p_lead = lead.exponent;
    const int k = p_lead >= 2.0 ? 1 : static_cast<int>(std::ceil(3.0 / (p_lead - 1.0)));
    auto integrand = [&terms, k](double w) {
        if (w == 0.0) {
            if (k > 1) return 0.0;
            double denom = 0.0;
            for (const GrowthTerm& t : terms)
                denom += t.coefficient * std::pow(0.0, 2.0 - t.exponent);
            return std::isfinite(denom) && denom != 0.0 ? 1.0 / denom : 0.0;
        }
        const double s = k == 1 ? w : std::pow(w, k);
        double denom = 0.0;
        for (const GrowthTerm& t : terms)
            denom += t.coefficient * std::pow(s, 2.0 - t.exponent);
        const double jac = k == 1 ? 1.0 : k * std::pow(w, k - 1.0);
        return jac / denom;
    };
    const double upper = k == 1 ? 1.0 / x0 : std::pow(1.0 / x0, 1.0 / k);
    const QuadratureResult q = integrate_adaptive(integrand, 0.0, upper, 1e-10, 8000);
    if (!(q.error_estimate <= 1e-8))
        throw std::runtime_error("blowup_time_bound: quadrature error estimate above 1e-8");
    return {q.value, q.error_estimate, BoundMethod::quadrature};
}

struct OdeTrajectory {
    std::vector<double> times;
    std::vector<double> values;
    std::optional<double> blow_up_time;
};

// Classical fourth-order one-step integration of dz/dt = g(z), z(0) = x0,
// halting when z exceeds 1e12 (reported as the numerical blow-up time).
inline OdeTrajectory integrate_comparison_ode(const GrowthFunction& g, double x0, double dt,
                                              double t_max) {
    if (!(dt > 0.0))
        throw std::invalid_argument("integrate_comparison_ode: dt must be > 0");
    constexpr double kDivergenceCutoff = 1e12;

    OdeTrajectory traj;
    const auto n_steps = static_cast<long long>(t_max / dt + 1e-9);
    traj.times.reserve(static_cast<std::size_t>(n_steps) + 1);
    traj.values.reserve(static_cast<std::size_t>(n_steps) + 1);
    double z = x0;
    traj.times.push_back(0.0);
    traj.values.push_back(z);

    for (long long n = 1; n <= n_steps; ++n) {
        const double k1 = g(z);
        const double k2 = g(z + 0.5 * dt * k1);
        const double k3 = g(z + 0.5 * dt * k2);
        const double k4 = g(z + dt * k3);
        z += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const double t = static_cast<double>(n) * dt;
        if (!std::isfinite(z) || z > kDivergenceCutoff) {
            traj.blow_up_time = t;
            break;
        }
        traj.times.push_back(t);
        traj.values.push_back(z);
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Sufficient-condition checkers. Each returns satisfied together with a
// signed margin in the condition's natural units (margin > 0 iff satisfied).
// ---------------------------------------------------------------------------

// (u0, phi) > lambda1^{1/alpha}: supercritical initial mass for the
// deterministic |u|^{1+alpha} reaction.
inline CriterionReport check_fujita(const Field& u0, double alpha, const EigenPair& eig) {
    if (!(alpha > 0.0))
        throw std::invalid_argument("check_fujita: alpha must be > 0");
    const double pairing = inner_product(u0, eig.phi);
    const double threshold = std::pow(eig.lambda1, 1.0 / alpha);
    CriterionReport rep;
    rep.name = "fujita_threshold";
    rep.margin = pairing - threshold;
    rep.satisfied = rep.margin > 0.0;
    rep.inputs = {{"alpha", alpha}, {"pairing", pairing}, {"lambda1", eig.lambda1},
                  {"threshold", threshold}};
    return rep;
}

// Blow-up of the drift-dominated problem f >= a1 u^beta + a2 u. When
// lambda1 >= a2 the operative test is positivity of
// g(xi0) = a1 xi0^beta - (lambda1 - a2) xi0 at the initial pairing; the
// weaker printed threshold pairing > ((lambda1 - a2)/a1)^{1/beta} is reported
// alongside. When lambda1 < a2 any nonnegative, nontrivial u0 suffices.
inline CriterionReport check_drift_blowup(const Field& u0, double a1, double a2, double beta,
                                          const EigenPair& eig) {
    if (!(a1 > 0.0))
        throw std::invalid_argument("check_drift_blowup: a1 must be > 0");
    if (!(beta > 1.0))
        throw std::invalid_argument("check_drift_blowup: beta must be > 1");

    const double pairing = inner_product(u0, eig.phi);
    CriterionReport rep;
    rep.name = "drift_blowup";
    rep.inputs = {{"a1", a1}, {"a2", a2}, {"beta", beta}, {"pairing", pairing},
                  {"lambda1", eig.lambda1}};

    if (eig.lambda1 < a2) {
        double min_v = 0.0, l1 = 0.0;
        for (double v : u0.values) {
            min_v = std::min(min_v, v);
            l1 += std::max(v, 0.0);
        }
        l1 *= u0.domain.h;
        rep.margin = min_v < 0.0 ? min_v : l1;
        rep.satisfied = rep.margin > 0.0;
        rep.notes = "lambda1 < a2 branch: requires u0 >= 0 and u0 not identically 0";
        return rep;
    }

    if (pairing <= 0.0) {
        rep.margin = pairing;
        rep.satisfied = false;
        rep.notes = "nonpositive initial pairing";
        return rep;
    }
    const double g0 = a1 * std::pow(pairing, beta) - (eig.lambda1 - a2) * pairing;
    rep.margin = g0;
    rep.satisfied = g0 > 0.0;
    const double printed_threshold = std::pow((eig.lambda1 - a2) / a1, 1.0 / beta);
    rep.inputs["printed_threshold"] = printed_threshold;
    rep.notes = std::string("operative test: a1 xi0^beta - (lambda1 - a2) xi0 > 0; printed ") +
                "threshold pairing > ((lambda1 - a2)/a1)^(1/beta) would be " +
                (pairing > printed_threshold ? "satisfied" : "not satisfied");
    return rep;
}

// Blow-up of du = (Lap u + |u|^{1+alpha}) dt + b u^m dW: the displayed
// condition r^{1+alpha/2} + (b^2 q1 / 2) r^m - lambda1 r > 0 at
// r = (u0, phi)^2.
inline CriterionReport check_drift_noise_blowup(const Field& u0, double alpha, double m, double b,
                                                double q1, const EigenPair& eig) {
    if (!(alpha > 0.0))
        throw std::invalid_argument("check_drift_noise_blowup: alpha must be > 0");
    if (!(m >= 1.0 && m < 1.0 + alpha / 2.0))
        throw std::invalid_argument("check_drift_noise_blowup: requires 1 <= m < 1 + alpha/2");
    if (q1 < 0.0)
        throw std::invalid_argument("check_drift_noise_blowup: q1 must be >= 0");

    const double pairing = inner_product(u0, eig.phi);
    const double r = pairing * pairing;
    const double expr =
        std::pow(r, 1.0 + alpha / 2.0) + 0.5 * b * b * q1 * std::pow(r, m) - eig.lambda1 * r;
    CriterionReport rep;
    rep.name = "drift_noise_blowup";
    rep.margin = expr;
    rep.satisfied = expr > 0.0;
    rep.inputs = {{"alpha", alpha}, {"m", m}, {"b", b}, {"q1", q1},
                  {"r", r},         {"lambda1", eig.lambda1}};
    return rep;
}

// Noise-induced blow-up with f >= 0: operative condition
// (b^2 q1 / 2) eta0^m - lambda1 eta0 > 0 at eta0 = (u0, phi)^2. The printed
// threshold eta0^{m-1} >= lambda1 / (q1 b^2) differs by a factor 2 and is
// reported in the notes.
inline CriterionReport check_noise_blowup(const Field& u0, double m, double b, double q1,
                                          const EigenPair& eig) {
    if (!(m > 1.0))
        throw std::invalid_argument("check_noise_blowup: m must be > 1");
    if (b == 0.0)
        throw std::invalid_argument("check_noise_blowup: b must be nonzero");
    if (!(q1 > 0.0))
        throw std::invalid_argument("check_noise_blowup: q1 must be > 0");

    const double pairing = inner_product(u0, eig.phi);
    const double eta0 = pairing * pairing;
    const double operative = 0.5 * b * b * q1 * std::pow(eta0, m) - eig.lambda1 * eta0;
    const bool printed = std::pow(eta0, m - 1.0) >= eig.lambda1 / (q1 * b * b);

    CriterionReport rep;
    rep.name = "noise_blowup";
    rep.margin = operative;
    rep.satisfied = operative > 0.0;
    rep.inputs = {{"m", m}, {"b", b}, {"q1", q1}, {"eta0", eta0}, {"lambda1", eig.lambda1}};
    rep.notes = std::string("operative test: (b^2 q1/2) eta0^m - lambda1 eta0 > 0; printed ") +
                "threshold eta0^(m-1) >= lambda1/(q1 b^2) (factor-2 gap) would be " +
                (printed ? "satisfied" : "not satisfied");
    return rep;
}

// Positivity hypotheses for f >= a1 u^beta + a2 u with power noise b u^m:
// the exponent window 1 <= m < (1 + beta)/2, the sign convention tying a1 to
// the parity of beta, and the automatic bound (q0/2) sigma^2 - |u_x|^2 <=
// b1 u^{2m} with b1 = q0 b^2 / 2, b2 = 0.
inline CriterionReport check_positivity_power_bounds(double a1, double a2, double beta, double b,
                                                     double m, double q0) {
    CriterionReport rep;
    rep.name = "positivity_power_bounds";
    rep.inputs = {{"a1", a1},   {"a2", a2}, {"beta", beta},
                  {"b", b},     {"m", m},   {"q0", q0},
                  {"b1", 0.5 * q0 * b * b}, {"b2", 0.0}};

    const double rounded = std::nearbyint(beta);
    const bool integer_beta = std::abs(beta - rounded) <= 1e-9;
    bool sign_ok;
    if (a1 == 0.0) {
        sign_ok = false;
        rep.notes = "a1 = 0: no superlinear reaction to control the noise";
    } else if (integer_beta) {
        const bool even = std::fmod(std::abs(rounded), 2.0) < 0.5;
        sign_ok = even ? a1 > 0.0 : a1 < 0.0;
        if (!sign_ok)
            rep.notes = even ? "even beta requires a1 > 0" : "odd beta requires a1 < 0";
    } else {
        sign_ok = a1 > 0.0;
        rep.notes = sign_ok
                        ? "non-integer beta: sign convention read through sgn(u)|u|^beta"
                        : "non-integer beta with a1 < 0: sign convention ambiguous";
    }

    if (m < 1.0) {
        rep.margin = m - 1.0;
        rep.satisfied = false;
    } else if (!sign_ok) {
        rep.margin = -1.0;
        rep.satisfied = false;
    } else {
        rep.margin = (1.0 + beta) / 2.0 - m;
        rep.satisfied = rep.margin > 0.0;
    }
    return rep;
}

// Parameter-window checks for the remaining positivity / global-existence
// statements. margin is the distance to the nearest bound.
inline CriterionReport check_parameter_range(const std::string& kind,
                                             const std::map<std::string, double>& params) {
    auto get = [&params, &kind](const char* key) {
        auto it = params.find(key);
        if (it == params.end())
            throw std::invalid_argument("check_parameter_range(" + kind + "): missing parameter '" +
                                        key + "'");
        return it->second;
    };

    CriterionReport rep;
    rep.inputs = {params.begin(), params.end()};

    if (kind == "p_laplacian_positivity") {
        // p > max(2m, n)
        const double p = get("p"), m = get("m"), n = get("n");
        rep.name = kind;
        rep.margin = std::min(p - 2.0 * m, p - n);
    } else if (kind == "power_noise_positivity") {
        // 2m > n
        const double m = get("m"), n = get("n");
        rep.name = kind;
        rep.margin = 2.0 * m - n;
    } else if (kind == "allen_cahn_global") {
        // 1 < m < 2
        const double m = get("m");
        rep.name = kind;
        rep.margin = std::min(m - 1.0, 2.0 - m);
    } else if (kind == "power_decay_global") {
        // gamma > 1 and 1 < m < (gamma + 1)/2
        const double m = get("m"), gamma = get("gamma");
        rep.name = kind;
        rep.margin = std::min({gamma - 1.0, m - 1.0, (gamma + 1.0) / 2.0 - m});
    } else if (kind == "gradient_noise_global") {
        // 2 nu - q0 > 0
        const double nu = get("nu"), q0 = get("q0");
        rep.name = kind;
        rep.margin = 2.0 * nu - q0;
    } else {
        throw std::invalid_argument("check_parameter_range: unknown kind '" + kind + "'");
    }
    rep.satisfied = rep.margin > 0.0;
    return rep;
}

// Drift-side sufficient conditions specialized to F(r) = a1 r^beta: beta > 1
// makes the superlinear window and its tail integral finite, and the initial
// pairing must clear the crossover M1 = (lambda1/a1)^{1/(beta-1)}.
inline CriterionReport check_drift_conditions_power(const Field& u0, double a1, double beta,
                                                    const EigenPair& eig) {
    const double pairing = inner_product(u0, eig.phi);
    CriterionReport rep;
    rep.name = "drift_conditions_power";
    rep.inputs = {{"a1", a1}, {"beta", beta}, {"pairing", pairing}, {"lambda1", eig.lambda1}};

    if (!(a1 > 0.0)) {
        rep.margin = a1;
        rep.satisfied = false;
        rep.notes = "requires a1 > 0";
        return rep;
    }
    if (!(beta > 1.0)) {
        rep.margin = beta - 1.0;
        rep.satisfied = false;
        rep.notes = "beta <= 1: tail integral of 1/(F(r) - lambda1 r) diverges";
        return rep;
    }
    const double m1 = std::pow(eig.lambda1 / a1, 1.0 / (beta - 1.0)) * (1.0 + 1e-9);
    rep.inputs["M1"] = m1;
    rep.margin = pairing - m1;
    rep.satisfied = rep.margin > 0.0;
    return rep;
}

// Noise-side sufficient conditions specialized to G(s) = (b^2/2) s^m:
// persistent correlation q1 > 0, m > 1, and initial pairing above
// sqrt(M2) with M2 = (2 lambda1 / (q1 b^2))^{1/(m-1)}.
inline CriterionReport check_noise_conditions_power(const Field& u0, double b, double m, double q1,
                                                    const EigenPair& eig) {
    const double pairing = inner_product(u0, eig.phi);
    CriterionReport rep;
    rep.name = "noise_conditions_power";
    rep.inputs = {{"b", b}, {"m", m}, {"q1", q1}, {"pairing", pairing}, {"lambda1", eig.lambda1}};

    if (!(q1 > 0.0)) {
        rep.margin = q1;
        rep.satisfied = false;
        rep.notes = "requires a positive correlation floor q1";
        return rep;
    }
    if (!(m > 1.0)) {
        rep.margin = m - 1.0;
        rep.satisfied = false;
        rep.notes = "requires m > 1";
        return rep;
    }
    if (b == 0.0) {
        rep.margin = 0.0;
        rep.satisfied = false;
        rep.notes = "requires b != 0";
        return rep;
    }
    const double m2 = std::pow(2.0 * eig.lambda1 / (q1 * b * b), 1.0 / (m - 1.0)) * (1.0 + 1e-9);
    rep.inputs["M2"] = m2;
    rep.margin = pairing - std::sqrt(m2);
    rep.satisfied = rep.margin > 0.0;
    return rep;
}

// Growth constant C(eps) of the quadratic-moment envelope |u0|^2 e^{C t} for
// the stochastic Allen-Cahn equation with power noise exponent 1 < m < 2:
// the interpolation |v|_{2m}^{2m} <= |v|_2^{2(2-m)} |v|_4^{4(m-1)} and the
// eps-Young split give
//   C = 2 + (2 - m) (q0 ((m-1)/eps)^{m-1})^{1/(2-m)},  valid for eps <= 2.
inline double allen_cahn_gronwall_rate(double m, double q0, double eps = 1.0) {
    if (!(m > 1.0 && m < 2.0))
        throw std::invalid_argument("allen_cahn_gronwall_rate: requires 1 < m < 2");
    if (!(eps > 0.0 && eps <= 2.0))
        throw std::invalid_argument("allen_cahn_gronwall_rate: requires 0 < eps <= 2");
    const double young = (2.0 - m) * std::pow(q0 * std::pow((m - 1.0) / eps, m - 1.0), 1.0 / (2.0 - m));
    return 2.0 + young;
}

}  // namespace spdelab
