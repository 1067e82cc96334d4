#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "spdelab/domain.hpp"
#include "spdelab/rng.hpp"

namespace spdelab {

// Spatial covariance kernel q(x, y) of the Wiener random field.
struct Kernel {
    enum class Type { constant, exponential, diagonal };

    Type type = Type::constant;
    double q0 = 1.0;   // constant / diagonal amplitude
    double s2 = 0.0;   // exponential variance
    double ell = 0.0;  // exponential correlation length

    static Kernel constant(double q0) {
        if (!(q0 > 0.0)) throw std::invalid_argument("Kernel::constant: q0 must be > 0");
        Kernel k;
        k.type = Type::constant;
        k.q0 = q0;
        return k;
    }

    static Kernel exponential(double s2, double ell) {
        if (!(s2 > 0.0)) throw std::invalid_argument("Kernel::exponential: s2 must be > 0");
        if (!(ell > 0.0)) throw std::invalid_argument("Kernel::exponential: ell must be > 0");
        Kernel k;
        k.type = Type::exponential;
        k.q0 = 0.0;
        k.s2 = s2;
        k.ell = ell;
        return k;
    }

    // Grid approximation of uncorrelated (white) forcing: Q = (q0/h) I.
    // Non-convergent idealization; the entrywise infimum q_inf is 0, which
    // disables the criteria that need persistent spatial correlation.
    static Kernel diagonal(double q0) {
        if (!(q0 > 0.0)) throw std::invalid_argument("Kernel::diagonal: q0 must be > 0");
        Kernel k;
        k.type = Type::diagonal;
        k.q0 = q0;
        return k;
    }
};

namespace detail {

// Lower Cholesky tolerant of semidefinite pivots: a pivot within pivot_tol of
// zero zeroes its column (exact for rank-deficient PSD input); a pivot below
// -pivot_tol reports indefiniteness.
inline bool cholesky_psd(int n, std::vector<double>& a, double pivot_tol) {
    for (int j = 0; j < n; ++j) {
        double d = a[static_cast<std::size_t>(j) * n + j];
        for (int k = 0; k < j; ++k) {
            const double l = a[static_cast<std::size_t>(j) * n + k];
            d -= l * l;
        }
        if (d <= pivot_tol) {
            if (d < -pivot_tol) return false;
            for (int i = j; i < n; ++i) a[static_cast<std::size_t>(i) * n + j] = 0.0;
            continue;
        }
        const double l = std::sqrt(d);
        a[static_cast<std::size_t>(j) * n + j] = l;
        const double inv = 1.0 / l;
        for (int i = j + 1; i < n; ++i) {
            double s = a[static_cast<std::size_t>(i) * n + j];
            for (int k = 0; k < j; ++k)
                s -= a[static_cast<std::size_t>(i) * n + k] *
                     a[static_cast<std::size_t>(j) * n + k];
            a[static_cast<std::size_t>(i) * n + j] = s * inv;
        }
    }
    // clear the stale upper triangle so the factor is plain lower-triangular
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < j; ++i) a[static_cast<std::size_t>(i) * n + j] = 0.0;
    return true;
}

}  // namespace detail

// Dense covariance matrix Q_ij = q(x_i, x_j) together with a lower-triangular
// factor F with F F^T = Q + jitter I, and the kernel bounds
// q_sup = max_i Q_ii and q_inf = min_{ij} Q_ij.
struct CovarianceOperator {
    Domain1D domain;
    std::vector<double> q;       // n x n, row-major
    std::vector<double> factor;  // n x n lower-triangular, row-major
    double jitter = 0.0;
    double q_sup = 0.0;
    double q_inf = 0.0;

    int n() const { return domain.n; }
};

inline CovarianceOperator assemble(const Kernel& kernel, const Domain1D& d) {
    const int n = d.n;
    CovarianceOperator cov{d, {}, {}, 0.0, 0.0, 0.0};
    cov.q.assign(static_cast<std::size_t>(n) * n, 0.0);

    switch (kernel.type) {
        case Kernel::Type::constant:
            std::fill(cov.q.begin(), cov.q.end(), kernel.q0);
            break;
        case Kernel::Type::exponential:
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    cov.q[static_cast<std::size_t>(i) * n + j] =
                        kernel.s2 * std::exp(-std::abs(d.node(i) - d.node(j)) / kernel.ell);
            break;
        case Kernel::Type::diagonal:
            for (int i = 0; i < n; ++i)
                cov.q[static_cast<std::size_t>(i) * n + i] = kernel.q0 / d.h;
            break;
    }

    cov.q_sup = cov.q[0];
    for (int i = 0; i < n; ++i)
        cov.q_sup = std::max(cov.q_sup, cov.q[static_cast<std::size_t>(i) * n + i]);
    cov.q_inf = *std::min_element(cov.q.begin(), cov.q.end());

    double trace = 0.0;
    for (int i = 0; i < n; ++i) trace += cov.q[static_cast<std::size_t>(i) * n + i];
    const double scale = trace / n;

    for (double jitter_rel : {0.0, 1e-12, 1e-10, 1e-8}) {
        const double jitter = jitter_rel * scale;
        std::vector<double> work = cov.q;
        for (int i = 0; i < n; ++i) work[static_cast<std::size_t>(i) * n + i] += jitter;
        if (detail::cholesky_psd(n, work, 1e-12 * (scale + jitter))) {
            cov.factor = std::move(work);
            cov.jitter = jitter;
            return cov;
        }
    }
    throw std::runtime_error("assemble: covariance factorization failed (indefinite kernel)");
}

// sqrt(dt) * F z with z i.i.d. standard normal; mean zero and covariance
// dt * (Q + jitter I). The buffer overload is allocation-free for steppers.
inline void sample_increment_into(const CovarianceOperator& cov, double dt, CounterRng& rng,
                                  std::vector<double>& z, Field& out) {
    if (!(dt >= 0.0))
        throw std::invalid_argument("sample_increment: dt must be >= 0");
    const int n = cov.n();
    z.resize(static_cast<std::size_t>(n));
    for (double& v : z) v = rng.next_normal();

    const double root_dt = std::sqrt(dt);
    for (int i = 0; i < n; ++i) {
        const double* row = &cov.factor[static_cast<std::size_t>(i) * n];
        double s = 0.0;
        for (int j = 0; j <= i; ++j) s += row[j] * z[static_cast<std::size_t>(j)];
        out.values[static_cast<std::size_t>(i)] = root_dt * s;
    }
}

inline Field sample_increment(const CovarianceOperator& cov, double dt, CounterRng& rng) {
    Field out(cov.domain);
    std::vector<double> z;
    sample_increment_into(cov, dt, rng, z, out);
    return out;
}

}  // namespace spdelab
