#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "spdelab/dynamics.hpp"

using namespace spdelab;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

ProblemSpec heat_problem(int n = 200, double nu = 1.0, double amplitude = 1.0) {
    return ProblemSpec{Domain1D(1.0, n),
                       SpatialOperator::laplacian(nu),
                       DriftSpec::zero(),
                       DiffusionSpec::zero(),
                       Kernel::constant(1.0),
                       InitialProfile::sine(amplitude)};
}

}  // namespace

TEST_CASE("drift family evaluation", "[dynamics]") {
    CHECK(DriftSpec::allen_cahn().eval(1.0) == 0.0);
    CHECK(DriftSpec::fujita(1.0).eval(-2.0) == Approx(4.0));
    CHECK(DriftSpec::power(1.0, -3.0, 2.0).eval(2.0) == Approx(-2.0));
    CHECK(DriftSpec::power_decay(3.0).eval(2.0) == Approx(-8.0));
    CHECK(DriftSpec::zero().eval(5.0) == 0.0);

    CHECK_THROWS_AS(DriftSpec::power(1.0, 0.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(DriftSpec::fujita(0.0), std::invalid_argument);
    CHECK_THROWS_AS(DriftSpec::power_decay(1.0), std::invalid_argument);
}

TEST_CASE("diffusion application", "[dynamics]") {
    Domain1D d(1.0, 10);
    Field zero(d);
    Field ones(d, 1.0);

    Field out = diffusion_apply(DiffusionSpec::power(3.0, 2.0), zero, ones);
    for (double v : out.values) CHECK(v == 0.0);

    out = diffusion_apply(DiffusionSpec::power(0.0, 1.5), ones, ones);
    for (double v : out.values) CHECK(v == 0.0);

    out = diffusion_apply(DiffusionSpec::power(2.0, 1.0), ones, ones);
    for (double v : out.values) CHECK(v == Approx(2.0));

    CHECK_THROWS_AS(DiffusionSpec::power(1.0, 0.5), std::invalid_argument);

    // gradient noise uses the centered difference
    Field linear = Field::from_function(d, [](double x) { return x; });
    out = diffusion_apply(DiffusionSpec::gradient(2.0), linear, ones);
    for (int i = 1; i + 1 < d.n; ++i) CHECK(out[i] == Approx(2.0).epsilon(1e-12));
}

TEST_CASE("initial profiles", "[dynamics]") {
    Domain1D d(1.0, 199);  // node at x = 1/2

    Field bump = make_initial(InitialProfile::bump(0.5, 0.2, 2.0), d);
    CHECK(bump[99] == Approx(2.0).epsilon(1e-12));  // peak value equals the height
    for (int i = 0; i < d.n; ++i) {
        CHECK(bump[i] >= 0.0);
        if (std::abs(d.node(i) - 0.5) >= 0.2) CHECK(bump[i] == 0.0);
    }

    Field flat = make_initial(InitialProfile::constant(0.3), d);
    for (double v : flat.values) CHECK(v == 0.3);

    // scaled_phi realizes the requested pairing exactly on the grid
    EigenPair eig = analytic_eigenpair(d);
    Field scaled = make_initial(InitialProfile::scaled_phi(2.5), d);
    CHECK(inner_product(scaled, eig.phi) == Approx(2.5).epsilon(1e-12));

    CHECK_THROWS_AS(InitialProfile::bump(0.5, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("semi-implicit heat decay matches exp(-pi^2 t)", "[dynamics]") {
    ProblemSpec prob = heat_problem();
    SolverConfig cfg;
    cfg.dt = 1e-4;
    cfg.t_max = 0.1;
    cfg.record_stride = 1000;
    const PathResult path = simulate_path(prob, cfg, 1);
    REQUIRE_FALSE(path.exploded);
    const double sup_end = path.rows.back()[static_cast<int>(Observable::sup)];
    CHECK(sup_end == Approx(std::exp(-kPi * kPi * 0.1)).epsilon(0.01));
}

TEST_CASE("zero state is invariant", "[dynamics]") {
    ProblemSpec prob = heat_problem();
    prob.drift = DriftSpec::allen_cahn();
    prob.initial = InitialProfile::constant(0.0);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_max = 0.01;
    cfg.record_stride = 1;
    const PathResult path = simulate_path(prob, cfg, 3);
    for (const auto& row : path.rows)
        CHECK(row[static_cast<int>(Observable::sup)] == 0.0);
}

TEST_CASE("deterministic Allen-Cahn stays below 1 from u0 = 1", "[dynamics]") {
    ProblemSpec prob = heat_problem(128);
    prob.drift = DriftSpec::allen_cahn();
    prob.initial = InitialProfile::constant(1.0);
    SolverConfig cfg;
    cfg.dt = 1e-4;
    cfg.t_max = 0.5;
    cfg.record_stride = 100;
    const PathResult path = simulate_path(prob, cfg, 5);
    REQUIRE_FALSE(path.exploded);
    for (const auto& row : path.rows)
        CHECK(row[static_cast<int>(Observable::sup)] <= 1.0 + 1e-12);
    CHECK(path.rows.back()[static_cast<int>(Observable::sup)] < 1.0);
}

TEST_CASE("semi-implicit heat step never increases the sup norm", "[dynamics]") {
    ProblemSpec prob = heat_problem(64);
    SolverConfig cfg;
    cfg.dt = 5e-3;  // far above the explicit stability limit
    cfg.t_max = 1.0;
    const CovarianceOperator cov = assemble(prob.kernel, prob.domain);
    CounterRng source(11, 0);
    for (int trial = 0; trial < 100; ++trial) {
        Field u(prob.domain);
        for (double& v : u.values) v = source.next_uniform();
        CounterRng rng(0, 0);
        Field next = step(u, prob, cfg, cov, rng);
        CHECK(sup_norm(next) <= sup_norm(u) + 1e-14);
    }
}

TEST_CASE("pairing decays at rate nu lambda1", "[dynamics]") {
    for (double nu : {1.0, 2.0}) {
        ProblemSpec prob = heat_problem(200, nu, 0.3);
        SolverConfig cfg;
        cfg.dt = 1e-4;
        cfg.t_max = 0.05;
        cfg.record_stride = 500;
        const PathResult path = simulate_path(prob, cfg, 17);
        const double ratio = path.rows.back()[static_cast<int>(Observable::phi_pairing)] /
                             path.rows.front()[static_cast<int>(Observable::phi_pairing)];
        CHECK(ratio == Approx(std::exp(-nu * kPi * kPi * 0.05)).epsilon(0.01));
    }
}

TEST_CASE("quadratic energy obeys the Allen-Cahn drift bound", "[dynamics]") {
    ProblemSpec prob = heat_problem(128);
    prob.drift = DriftSpec::allen_cahn();
    prob.initial = InitialProfile::sine(0.8);
    SolverConfig cfg;
    cfg.dt = 1e-4;
    cfg.t_max = 0.2;
    cfg.record_stride = 10;
    const PathResult path = simulate_path(prob, cfg, 23);
    for (std::size_t k = 0; k + 1 < path.times.size(); ++k) {
        const double dt = path.times[k + 1] - path.times[k];
        const double l2sq = path.rows[k][static_cast<int>(Observable::l2sq)];
        const double l4 = path.rows[k][static_cast<int>(Observable::l4_4)];
        const double rate =
            (path.rows[k + 1][static_cast<int>(Observable::l2sq)] - l2sq) / dt;
        CHECK(rate <= 2.0 * l2sq - 2.0 * l4 + 0.01);
    }
}

TEST_CASE("paths are bitwise reproducible from the seed", "[dynamics]") {
    ProblemSpec prob = heat_problem(48);
    prob.drift = DriftSpec::power(1.0, 0.0, 2.0);
    prob.diffusion = DiffusionSpec::power(0.5, 1.5);
    SolverConfig cfg;
    cfg.dt = 1e-4;
    cfg.t_max = 0.02;
    cfg.record_stride = 10;

    const PathResult a = simulate_path(prob, cfg, 99);
    const PathResult b = simulate_path(prob, cfg, 99);
    const PathResult c = simulate_path(prob, cfg, 100);

    REQUIRE(a.times == b.times);
    REQUIRE(a.rows.size() == b.rows.size());
    bool identical_c = c.rows.size() == a.rows.size();
    for (std::size_t k = 0; k < a.rows.size(); ++k) {
        for (int j = 0; j < kNumObservables; ++j) {
            CHECK(a.rows[k][static_cast<std::size_t>(j)] == b.rows[k][static_cast<std::size_t>(j)]);
            if (identical_c)
                identical_c = a.rows[k][static_cast<std::size_t>(j)] ==
                              c.rows[k][static_cast<std::size_t>(j)];
        }
    }
    CHECK_FALSE(identical_c);
}

TEST_CASE("supercritical reaction crosses the threshold in finite time", "[dynamics]") {
    ProblemSpec prob = heat_problem(100);
    prob.drift = DriftSpec::power(1.0, 0.0, 2.0);
    prob.initial = InitialProfile::sine(20.0);
    SolverConfig cfg;
    cfg.dt = 1e-4;
    cfg.t_max = 0.2;
    cfg.record_stride = 100;
    const PathResult path = simulate_path(prob, cfg, 31);
    REQUIRE(path.exploded);
    REQUIRE(path.blow_up_time.has_value());
    CHECK(*path.blow_up_time <= 0.111);
    // no samples past the blow-up time
    CHECK(path.times.back() < *path.blow_up_time);
}

TEST_CASE("subcritical deterministic run decays without blow-up", "[dynamics]") {
    ProblemSpec prob = heat_problem(100);
    prob.drift = DriftSpec::power(1.0, 0.0, 2.0);
    prob.initial = InitialProfile::sine(1.0);  // pairing pi/4, below threshold
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_max = 2.0;
    cfg.record_stride = 200;
    const PathResult path = simulate_path(prob, cfg, 37);
    REQUIRE_FALSE(path.exploded);
    double prev = 1e300;
    for (const auto& row : path.rows) {
        CHECK(row[static_cast<int>(Observable::sup)] < prev + 1e-15);
        prev = row[static_cast<int>(Observable::sup)];
    }
}

TEST_CASE("scheme and operator validation", "[dynamics]") {
    ProblemSpec prob = heat_problem(32);
    prob.op = SpatialOperator::p_laplacian(3.0);
    SolverConfig cfg;
    cfg.dt = 1e-4;
    cfg.t_max = 0.01;
    CHECK_THROWS_AS(simulate_path(prob, cfg, 1), std::invalid_argument);

    cfg.scheme = Scheme::tamed_explicit;
    const PathResult path = simulate_path(prob, cfg, 1);
    CHECK_FALSE(path.exploded);

    SolverConfig bad = cfg;
    bad.dt = 0.0;
    CHECK_THROWS_AS(simulate_path(prob, bad, 1), std::invalid_argument);
    bad = cfg;
    bad.t_max = bad.dt / 2.0;
    CHECK_THROWS_AS(simulate_path(prob, bad, 1), std::invalid_argument);
    bad = cfg;
    bad.blowup_threshold = 0.5;
    prob.initial = InitialProfile::sine(2.0);
    CHECK_THROWS_AS(simulate_path(prob, bad, 1), std::invalid_argument);
}

TEST_CASE("tamed explicit scheme handles the p-laplacian decay", "[dynamics]") {
    ProblemSpec prob = heat_problem(64);
    prob.op = SpatialOperator::p_laplacian(3.0);
    prob.initial = InitialProfile::sine(1.0);
    SolverConfig cfg;
    cfg.scheme = Scheme::tamed_explicit;
    cfg.dt = 1e-5;
    cfg.t_max = 0.01;
    cfg.record_stride = 100;
    const PathResult path = simulate_path(prob, cfg, 3);
    REQUIRE_FALSE(path.exploded);
    CHECK(path.rows.back()[static_cast<int>(Observable::sup)] <
          path.rows.front()[static_cast<int>(Observable::sup)]);
}
