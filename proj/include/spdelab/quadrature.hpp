#pragma once

#include <array>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

namespace spdelab {

struct QuadratureResult {
    double value;
    double error_estimate;
    int panels;
};

namespace detail {

// Gauss 7 / Kronrod 15 node-weight table (positive abscissae).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.0,
    0.207784955007898, 0.405845151377397, 0.586087235467691,
    0.741531185599394, 0.864864423359769, 0.949107912342759,
    0.991455371120813};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267,
    0.140653259715525, 0.104790010322250, 0.063092092629979,
    0.022935322010529};
// Gauss weights for nodes 0, 2, 4, 6 of the table above.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870};

}  // namespace detail

// One G7/K15 panel on [a, b]; returns the K15 value and an error estimate
// from the embedded Gauss rule.
template <class F>
std::pair<double, double> gauss_kronrod_panel(F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double m = 0.5 * (b - a);

    const double f0 = f(c);
    double k15 = detail::kKronrodWeights[0] * f0;
    double g7 = detail::kGaussWeights[0] * f0;
    for (int i = 1; i < 8; ++i) {
        const double dx = m * detail::kKronrodNodes[static_cast<std::size_t>(i)];
        const double fi = f(c + dx) + f(c - dx);
        k15 += detail::kKronrodWeights[static_cast<std::size_t>(i)] * fi;
        if (i % 2 == 0)
            g7 += detail::kGaussWeights[static_cast<std::size_t>(i / 2)] * fi;
    }
    k15 *= m;
    g7 *= m;

    double err = 200.0 * std::abs(k15 - g7);
    err *= std::sqrt(err);
    return {k15, err};
}

// Adaptive bisection on [a, b] to an absolute tolerance. Throws when the
// panel budget is exhausted before the tolerance is met.
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double abs_tol,
                                    int max_panels = 4000) {
    struct Segment {
        double err, value, a, b;
        bool operator<(const Segment& o) const { return err < o.err; }
    };

    auto [v0, e0] = gauss_kronrod_panel(f, a, b);
    std::priority_queue<Segment> queue;
    queue.push({e0, v0, a, b});
    double total_value = v0;
    double total_err = e0;
    int panels = 1;

    while (total_err > abs_tol) {
        if (panels >= max_panels)
            throw std::runtime_error("integrate_adaptive: panel budget exhausted");
        const Segment worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(worst.a < mid && mid < worst.b))
            throw std::runtime_error("integrate_adaptive: interval too small to split");
        auto [vl, el] = gauss_kronrod_panel(f, worst.a, mid);
        auto [vr, er] = gauss_kronrod_panel(f, mid, worst.b);
        total_value += vl + vr - worst.value;
        total_err += el + er - worst.err;
        queue.push({el, vl, worst.a, mid});
        queue.push({er, vr, mid, worst.b});
        ++panels;
    }
    return {total_value, total_err, panels};
}

}  // namespace spdelab
