#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "spdelab/domain.hpp"
#include "spdelab/grid_ops.hpp"
#include "spdelab/tridiag.hpp"

namespace spdelab {

enum class EigenSource { analytic, discrete };

// Principal Dirichlet eigenpair of -Laplacian on (0, L), normalized so that
// phi >= 0 and the grid integral h * sum(phi) equals 1.
struct EigenPair {
    double lambda1;
    Field phi;
    EigenSource source;
};

inline EigenPair analytic_eigenpair(const Domain1D& d) {
    const double L = d.length;
    const double pi = std::numbers::pi;
    const double lambda = (pi / L) * (pi / L);
    Field phi = Field::from_function(
        d, [&](double x) { return pi / (2.0 * L) * std::sin(pi * x / L); });
    return {lambda, std::move(phi), EigenSource::analytic};
}

// Inverse power iteration on the stencil matrix of laplacian_apply, using the
// same tridiagonal kernel as the semi-implicit stepper. The spectrum is
// positive, so no shift is needed.
inline EigenPair discrete_eigenpair(const Domain1D& d, double tol) {
    if (!(tol > 0.0))
        throw std::invalid_argument("discrete_eigenpair: tol must be > 0");
    const int n = d.n;
    const double h = d.h;
    const ConstTridiagSolver solver(n, 2.0 / (h * h), -1.0 / (h * h));

    Field y(d, 1.0);
    Field my(d);
    double lambda = 0.0;
    double lambda_prev = std::numeric_limits<double>::infinity();
    constexpr int kMaxIters = 10000;
    bool converged = false;

    for (int iter = 0; iter < kMaxIters; ++iter) {
        solver.solve_in_place(y.values);
        const double scale = 1.0 / std::sqrt(l2_norm_sq(y));
        for (double& v : y.values) v *= scale;

        laplacian_apply_into(y, my);
        for (double& v : my.values) v = -v;
        lambda = inner_product(y, my);

        double res_sq = 0.0;
        for (int i = 0; i < n; ++i) {
            const double r = my[i] - lambda * y[i];
            res_sq += r * r;
        }
        const double residual = std::sqrt(h * res_sq);
        if (std::abs(lambda - lambda_prev) < tol && residual <= 5.0 * tol) {
            converged = true;
            break;
        }
        lambda_prev = lambda;
    }
    if (!converged)
        throw std::runtime_error("discrete_eigenpair: no convergence within 10000 iterations");

    double mass = 0.0;
    for (double v : y.values) mass += v;
    mass *= h;
    if (mass < 0.0) {
        mass = -mass;
        for (double& v : y.values) v = -v;
    }
    const double norm = 1.0 / mass;
    for (double& v : y.values) v *= norm;

    return {lambda, std::move(y), EigenSource::discrete};
}

// Closed form of the discrete principal eigenvalue, 2(1 - cos(pi h / L)) / h^2.
inline double discrete_lambda1_closed_form(const Domain1D& d) {
    const double x = std::numbers::pi * d.h / d.length;
    return 2.0 * (1.0 - std::cos(x)) / (d.h * d.h);
}

}  // namespace spdelab
