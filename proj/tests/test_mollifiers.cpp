#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "spdelab/mollifiers.hpp"
#include "spdelab/quadrature.hpp"

using namespace spdelab;
using Catch::Approx;

namespace {

// Independent oracles built straight from the integral definitions.
double rho_oracle(double r, double eps) {
    if (r + eps >= eps) return 0.0;
    auto j_eps = [eps](double s) { return mollifier_j(s / eps) / eps; };
    return integrate_adaptive(j_eps, r + eps, eps, 1e-12).value;
}

double beta_oracle(double r, double eps) {
    if (r >= 0.0) return 0.0;
    auto rho = [eps](double s) { return rho_eps(s, eps); };
    return integrate_adaptive(rho, r, 0.0, 1e-12).value;
}

}  // namespace

TEST_CASE("k_eps branch values and continuity", "[mollifiers]") {
    const double eps = 0.3;

    // both closed forms meet at r = -eps
    const double left = eps * eps - eps * eps / 6.0;
    CHECK(k_eps(-eps, eps) == Approx(5.0 / 6.0 * eps * eps).epsilon(1e-14));
    CHECK(k_eps(-eps, eps) == Approx(left).epsilon(1e-14));

    CHECK(k_eps(1.0, eps) == 0.0);
    CHECK(k_eps_d1(1.0, eps) == 0.0);
    CHECK(k_eps_d2(1.0, eps) == 0.0);

    // one-sided derivative mismatch at the branch points
    auto mid_d1 = [eps](double r) { return -2.0 * r * r * r / (eps * eps) - 4.0 * r * r / eps; };
    CHECK(std::abs(2.0 * -eps - mid_d1(-eps)) <= 1e-10);
    CHECK(std::abs(mid_d1(0.0) - 0.0) <= 1e-10);
    auto mid_k = [eps](double r) { return -(r * r * r / eps) * (r / (2.0 * eps) + 4.0 / 3.0); };
    CHECK(std::abs((eps * eps - eps * eps / 6.0) - mid_k(-eps)) <= 1e-12);
}

TEST_CASE("k_eps sign, convexity, and uniform gap on a sweep", "[mollifiers]") {
    const double eps = 0.5;
    const int samples = 10000;
    double max_gap = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double r = -10.0 + 20.0 * i / samples;
        CHECK(k_eps_d1(r, eps) <= 0.0);
        CHECK(k_eps_d2(r, eps) >= 0.0);
        const double neg = r < 0.0 ? -r : 0.0;
        max_gap = std::max(max_gap, std::abs(k_eps(r, eps) - neg * neg));
    }
    CHECK(max_gap == Approx(eps * eps / 6.0).margin(1e-12));
    // the gap is exactly eps^2/6 on r <= -eps
    CHECK(std::abs(k_eps(-2.0, eps) - 4.0) == Approx(eps * eps / 6.0).margin(1e-15));
}

TEST_CASE("rho_eps branches and monotonicity", "[mollifiers]") {
    const double eps = 0.25;
    CHECK(rho_eps(0.0, eps) == 0.0);
    CHECK(rho_eps(0.7, eps) == 0.0);
    CHECK(rho_eps(-2.0 * eps, eps) == 1.0);
    CHECK(rho_eps(-5.0 * eps, eps) == 1.0);

    double prev = 1.0;
    for (int i = 0; i <= 2000; ++i) {
        const double r = -3.0 * eps + 3.5 * eps * i / 2000;
        const double value = rho_eps(r, eps);
        CHECK(value <= prev + 1e-12);
        CHECK(value >= -1e-14);
        CHECK(value <= 1.0 + 1e-14);
        prev = value;
    }

    // table evaluation against direct quadrature of J_eps
    for (double r : {-0.45, -0.3, -0.2, -0.1, -0.05}) {
        CHECK(rho_eps(r, eps) == Approx(rho_oracle(r, eps)).margin(1e-10));
    }
}

TEST_CASE("beta_eps matches its defining integral and closed branches", "[mollifiers]") {
    const double eps = 0.2;

    CHECK(beta_eps(0.0, eps) == 0.0);
    CHECK(beta_eps(1.0, eps) == 0.0);

    // linear branch: beta(r) = -2 eps - r + eps * c_hat for r <= -2 eps
    CHECK(beta_eps(-3.0 * eps, eps) == Approx(eps * (1.0 + c_hat())).margin(1e-12));

    for (double r : {-1.0, -0.5, -0.4001, -0.35, -0.2, -0.1, -0.02}) {
        CHECK(beta_eps(r, eps) == Approx(beta_oracle(r, eps)).margin(1e-8));
    }
}

TEST_CASE("beta_eps is convex on a sweep", "[mollifiers]") {
    const double eps = 0.4;
    const int samples = 4000;
    const double lo = -2.0, hi = 1.0;
    const double step = (hi - lo) / samples;
    double prev2 = beta_eps(lo, eps);
    double prev1 = beta_eps(lo + step, eps);
    for (int i = 2; i <= samples; ++i) {
        const double value = beta_eps(lo + i * step, eps);
        CHECK(value - 2.0 * prev1 + prev2 >= -1e-10);
        prev2 = prev1;
        prev1 = value;
    }
}

TEST_CASE("c_hat agrees with the nested double integral and is below 2", "[mollifiers]") {
    const double chat = c_hat();
    CHECK(chat < 2.0);

    auto inner_tail = [](double t) {
        return integrate_adaptive([](double s) { return mollifier_j(s); }, t + 1.0, 1.0, 1e-12)
            .value;
    };
    const double direct = integrate_adaptive(inner_tail, -2.0, 0.0, 1e-10).value;
    CHECK(chat == Approx(direct).margin(1e-9));

    // with unit-mass J the double integral collapses to int J = 1
    CHECK(chat == Approx(1.0).margin(1e-9));
}

TEST_CASE("mollifier J has unit mass and compact support", "[mollifiers]") {
    CHECK(mollifier_j(1.0) == 0.0);
    CHECK(mollifier_j(-1.2) == 0.0);
    const double mass =
        integrate_adaptive([](double s) { return mollifier_j(s); }, -1.0, 1.0, 1e-12).value;
    CHECK(mass == Approx(1.0).margin(1e-10));
}

TEST_CASE("mollifier parameter validation", "[mollifiers]") {
    CHECK_THROWS_AS(k_eps(0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(rho_eps(0.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(beta_eps(0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(MollifierParams(0.0), std::invalid_argument);
    CHECK(MollifierParams(0.5).epsilon == 0.5);
}
