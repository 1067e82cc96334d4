#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "spdelab/quadrature.hpp"

namespace spdelab {

struct MollifierParams {
    double epsilon;

    explicit MollifierParams(double eps) : epsilon(eps) {
        if (!(eps > 0.0))
            throw std::invalid_argument("MollifierParams: epsilon must be > 0");
    }
};

namespace detail {

inline void require_positive_eps(double eps, const char* where) {
    if (!(eps > 0.0))
        throw std::invalid_argument(std::string(where) + ": eps must be > 0");
}

}  // namespace detail

// C^2 regularization of k(r) = (r^-)^2:
//   r^2 - eps^2/6                     for r < -eps,
//   -(r^3/eps) (r/(2 eps) + 4/3)      for -eps <= r < 0,
//   0                                 for r >= 0.
inline double k_eps(double r, double eps) {
    detail::require_positive_eps(eps, "k_eps");
    if (r >= 0.0) return 0.0;
    if (r < -eps) return r * r - eps * eps / 6.0;
    return -(r * r * r / eps) * (r / (2.0 * eps) + 4.0 / 3.0);
}

inline double k_eps_d1(double r, double eps) {
    detail::require_positive_eps(eps, "k_eps_d1");
    if (r >= 0.0) return 0.0;
    if (r < -eps) return 2.0 * r;
    return -2.0 * r * r * r / (eps * eps) - 4.0 * r * r / eps;
}

inline double k_eps_d2(double r, double eps) {
    detail::require_positive_eps(eps, "k_eps_d2");
    if (r >= 0.0) return 0.0;
    if (r < -eps) return 2.0;
    return -6.0 * r * r / (eps * eps) - 8.0 * r / eps;
}

namespace detail {

inline double bump_raw(double x) {
    const double x2 = x * x;
    if (x2 >= 1.0) return 0.0;
    return std::exp(1.0 / (x2 - 1.0));
}

// One-time tables on [-1, 1] for the tail integrals of the normalized bump:
//   tail_j(a) = int_a^1 J(s) ds,  tail_m(a) = int_a^1 s J(s) ds.
// Values are accumulated panel-by-panel with the K15 rule and queried by
// cubic Hermite interpolation (the derivatives -J(a) and -a J(a) are exact).
struct MollifierTables {
    static constexpr int kPanels = 1024;
    double step;
    double norm_c;  // constant making int J = 1
    double chat;    // int_{-1}^{1} tail_j(w) dw
    std::vector<double> nodes;
    std::vector<double> tail_j;
    std::vector<double> tail_m;

    MollifierTables() {
        nodes.resize(kPanels + 1);
        tail_j.resize(kPanels + 1);
        tail_m.resize(kPanels + 1);
        step = 2.0 / kPanels;
        for (int k = 0; k <= kPanels; ++k) nodes[static_cast<std::size_t>(k)] = -1.0 + k * step;

        double raw_mass = 0.0;
        for (int k = 0; k < kPanels; ++k)
            raw_mass += gauss_kronrod_panel(bump_raw, nodes[static_cast<std::size_t>(k)],
                                            nodes[static_cast<std::size_t>(k + 1)])
                            .first;
        norm_c = 1.0 / raw_mass;

        tail_j[kPanels] = 0.0;
        tail_m[kPanels] = 0.0;
        for (int k = kPanels - 1; k >= 0; --k) {
            const double a = nodes[static_cast<std::size_t>(k)];
            const double b = nodes[static_cast<std::size_t>(k + 1)];
            const double dj =
                gauss_kronrod_panel([this](double s) { return norm_c * bump_raw(s); }, a, b).first;
            const double dm =
                gauss_kronrod_panel([this](double s) { return s * norm_c * bump_raw(s); }, a, b)
                    .first;
            tail_j[static_cast<std::size_t>(k)] = tail_j[static_cast<std::size_t>(k + 1)] + dj;
            tail_m[static_cast<std::size_t>(k)] = tail_m[static_cast<std::size_t>(k + 1)] + dm;
        }

        double acc = 0.0;
        for (int k = 0; k < kPanels; ++k)
            acc += gauss_kronrod_panel([this](double w) { return eval(tail_j, w, true); },
                                       nodes[static_cast<std::size_t>(k)],
                                       nodes[static_cast<std::size_t>(k + 1)])
                       .first;
        chat = acc;
    }

    double j_norm(double x) const { return norm_c * bump_raw(x); }

    // Hermite query of tail_j (derivative -J) or tail_m (derivative -s J).
    double eval(const std::vector<double>& table, double x, bool is_tail_j) const {
        if (x <= -1.0) return table[0];
        if (x >= 1.0) return 0.0;
        int k = static_cast<int>((x + 1.0) / step);
        if (k >= kPanels) k = kPanels - 1;
        const double a = nodes[static_cast<std::size_t>(k)];
        const double t = (x - a) / step;
        const double ya = table[static_cast<std::size_t>(k)];
        const double yb = table[static_cast<std::size_t>(k + 1)];
        const double b = nodes[static_cast<std::size_t>(k + 1)];
        const double da = is_tail_j ? -j_norm(a) : -a * j_norm(a);
        const double db = is_tail_j ? -j_norm(b) : -b * j_norm(b);
        const double t2 = t * t;
        const double t3 = t2 * t;
        const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        const double h10 = t3 - 2.0 * t2 + t;
        const double h01 = -2.0 * t3 + 3.0 * t2;
        const double h11 = t3 - t2;
        return h00 * ya + h10 * step * da + h01 * yb + h11 * step * db;
    }

    static const MollifierTables& get() {
        static const MollifierTables tables;
        return tables;
    }
};

}  // namespace detail

// The normalized 1-D bump kernel J (unit mass, support [-1, 1]).
inline double mollifier_j(double x) { return detail::MollifierTables::get().j_norm(x); }

// int_{-2}^{0} int_{t+1}^{1} J(s) ds dt, a pure number < 2.
inline double c_hat() { return detail::MollifierTables::get().chat; }

// rho_eps(r) = int_{r+eps}^{inf} J_eps(s) ds: equals 1 for r <= -2 eps,
// 0 for r >= 0, and interpolates monotonically in between.
inline double rho_eps(double r, double eps) {
    detail::require_positive_eps(eps, "rho_eps");
    if (r >= 0.0) return 0.0;
    if (r <= -2.0 * eps) return 1.0;
    return detail::MollifierTables::get().eval(detail::MollifierTables::get().tail_j,
                                               r / eps + 1.0, true);
}

// beta_eps(r) = int_r^{inf} rho_eps(s) ds: 0 for r >= 0 and
// -2 eps - r + eps * c_hat() for r <= -2 eps; the transition zone reduces to
// the tail integrals via int_a^1 tail_j = -a tail_j(a) + tail_m(a).
inline double beta_eps(double r, double eps) {
    detail::require_positive_eps(eps, "beta_eps");
    if (r >= 0.0) return 0.0;
    const auto& tab = detail::MollifierTables::get();
    if (r <= -2.0 * eps) return -2.0 * eps - r + eps * tab.chat;
    const double a = r / eps + 1.0;
    return eps * (-a * tab.eval(tab.tail_j, a, true) + tab.eval(tab.tail_m, a, false));
}

}  // namespace spdelab
