#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace spdelab {

// Uniform grid on (0, length) with homogeneous Dirichlet boundary.
// Interior nodes are x_i = i*h for i = 1..n with mesh width h = length/(n+1);
// the boundary values at x = 0 and x = length are identically zero and are
// never stored.
struct Domain1D {
    double length;
    int n;
    double h;

    Domain1D(double length_, int n_) : length(length_), n(n_) {
        if (!(length > 0.0))
            throw std::invalid_argument("Domain1D: length must be > 0");
        if (n < 3)
            throw std::invalid_argument("Domain1D: need at least 3 interior nodes");
        h = length / (n + 1);
    }

    // 0-based storage index i holds the node x_{i+1} = (i+1)*h.
    double node(int i) const { return (i + 1) * h; }

    friend bool operator==(const Domain1D& a, const Domain1D& b) {
        return a.n == b.n && a.length == b.length;
    }
};

// Interior values of a real-valued grid function.
struct Field {
    Domain1D domain;
    std::vector<double> values;

    explicit Field(const Domain1D& d, double fill = 0.0)
        : domain(d), values(static_cast<std::size_t>(d.n), fill) {}

    template <class F>
    static Field from_function(const Domain1D& d, F&& f) {
        Field u(d);
        for (int i = 0; i < d.n; ++i) u.values[static_cast<std::size_t>(i)] = f(d.node(i));
        return u;
    }

    int size() const { return domain.n; }
    double& operator[](int i) { return values[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }

    bool all_finite() const {
        for (double v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

inline void require_same_domain(const Field& u, const Field& v, const char* where) {
    if (!(u.domain == v.domain))
        throw std::invalid_argument(std::string(where) + ": fields live on different domains");
}

}  // namespace spdelab
