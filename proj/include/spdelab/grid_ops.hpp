#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spdelab/domain.hpp"

namespace spdelab {

// Three-point Laplacian with zero Dirichlet data, written as the divergence
// of face gradients so that p_laplacian_apply at p = 2 reproduces it bit for
// bit.
inline void laplacian_apply_into(const Field& u, Field& out) {
    const int n = u.domain.n;
    const double h = u.domain.h;
    double gm = u.values[0] / h;  // left-face gradient, u_0 = 0
    for (int i = 0; i < n; ++i) {
        const double up = (i + 1 < n) ? u.values[static_cast<std::size_t>(i + 1)] : 0.0;
        const double gp = (up - u.values[static_cast<std::size_t>(i)]) / h;
        out.values[static_cast<std::size_t>(i)] = (gp - gm) / h;
        gm = gp;
    }
}

inline Field laplacian_apply(const Field& u) {
    Field out(u.domain);
    laplacian_apply_into(u, out);
    return out;
}

// div(|u_x|^{p-2} u_x) with face-centered gradients. Note pow(|g|, 0) == 1
// exactly, so p = 2 falls through to the linear stencil unchanged.
inline void p_laplacian_apply_into(const Field& u, double p, Field& out) {
    if (!(p >= 2.0))
        throw std::invalid_argument("p_laplacian_apply: requires p >= 2");
    const int n = u.domain.n;
    const double h = u.domain.h;
    const double q = p - 2.0;
    auto flux = [q](double g) { return std::pow(std::abs(g), q) * g; };
    double fm = flux(u.values[0] / h);
    for (int i = 0; i < n; ++i) {
        const double up = (i + 1 < n) ? u.values[static_cast<std::size_t>(i + 1)] : 0.0;
        const double fp = flux((up - u.values[static_cast<std::size_t>(i)]) / h);
        out.values[static_cast<std::size_t>(i)] = (fp - fm) / h;
        fm = fp;
    }
}

inline Field p_laplacian_apply(const Field& u, double p) {
    Field out(u.domain);
    p_laplacian_apply_into(u, p, out);
    return out;
}

// Midpoint rule h * sum(u_i v_i); boundary terms vanish with Dirichlet data.
inline double inner_product(const Field& u, const Field& v) {
    require_same_domain(u, v, "inner_product");
    double s = 0.0;
    for (int i = 0; i < u.domain.n; ++i)
        s += u.values[static_cast<std::size_t>(i)] * v.values[static_cast<std::size_t>(i)];
    return u.domain.h * s;
}

inline double lp_norm(const Field& u, double p) {
    if (!(p >= 1.0))
        throw std::invalid_argument("lp_norm: requires p >= 1");
    double s = 0.0;
    for (double x : u.values) s += std::pow(std::abs(x), p);
    return std::pow(u.domain.h * s, 1.0 / p);
}

inline double sup_norm(const Field& u) {
    double m = 0.0;
    for (double x : u.values) m = std::max(m, std::abs(x));
    return m;
}

inline double l2_norm_sq(const Field& u) {
    double s = 0.0;
    for (double x : u.values) s += x * x;
    return u.domain.h * s;
}

inline double l4_norm_4(const Field& u) {
    double s = 0.0;
    for (double x : u.values) {
        const double x2 = x * x;
        s += x2 * x2;
    }
    return u.domain.h * s;
}

struct NegativePartMass {
    double l2sq;
    double l1;
};

// h * sum((u_i^-)^2) and h * sum(u_i^-) with u^- = max(-u, 0).
inline NegativePartMass negative_part_mass(const Field& u) {
    double l2 = 0.0, l1 = 0.0;
    for (double x : u.values) {
        const double neg = x < 0.0 ? -x : 0.0;
        l2 += neg * neg;
        l1 += neg;
    }
    return {u.domain.h * l2, u.domain.h * l1};
}

}  // namespace spdelab
