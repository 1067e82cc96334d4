#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace spdelab {

// Prefactored Thomas solve for the constant-coefficient symmetric tridiagonal
// matrix tridiag(off, diag, off). Factorization costs O(n) once; each solve
// is O(n) and allocation-free.
class ConstTridiagSolver {
public:
    ConstTridiagSolver(int n, double diag, double off)
        : n_(n), off_(off), upper_(static_cast<std::size_t>(n)),
          inv_pivot_(static_cast<std::size_t>(n)) {
        if (n < 1)
            throw std::invalid_argument("ConstTridiagSolver: n must be >= 1");
        double pivot = diag;
        for (int i = 0; i < n; ++i) {
            if (pivot == 0.0)
                throw std::runtime_error("ConstTridiagSolver: zero pivot");
            inv_pivot_[static_cast<std::size_t>(i)] = 1.0 / pivot;
            upper_[static_cast<std::size_t>(i)] = off * inv_pivot_[static_cast<std::size_t>(i)];
            pivot = diag - off * upper_[static_cast<std::size_t>(i)];
        }
    }

    void solve_in_place(std::span<double> x) const {
        x[0] *= inv_pivot_[0];
        for (int i = 1; i < n_; ++i)
            x[static_cast<std::size_t>(i)] =
                (x[static_cast<std::size_t>(i)] - off_ * x[static_cast<std::size_t>(i - 1)]) *
                inv_pivot_[static_cast<std::size_t>(i)];
        for (int i = n_ - 2; i >= 0; --i)
            x[static_cast<std::size_t>(i)] -=
                upper_[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i + 1)];
    }

    int size() const { return n_; }

private:
    int n_;
    double off_;
    std::vector<double> upper_;
    std::vector<double> inv_pivot_;
};

}  // namespace spdelab
