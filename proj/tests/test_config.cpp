#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include "spdelab/run_config.hpp"

using namespace spdelab;
using nlohmann::json;
using Catch::Approx;

TEST_CASE("defaults materialize and the echo round-trips", "[config]") {
    const RunConfig cfg = parse_run_config(json::object());
    CHECK(cfg.length == 1.0);
    CHECK(cfg.n == 200);
    CHECK(cfg.operator_type == "laplacian");
    CHECK(cfg.drift_family == "zero");
    CHECK(cfg.scheme == "semi_implicit");

    const json doc = echo(cfg);
    const RunConfig again = parse_run_config(doc);
    CHECK(echo(again) == doc);
}

TEST_CASE("a populated document round-trips through the echo", "[config]") {
    json doc = {
        {"domain", {{"length", 2.0}, {"n", 128}}},
        {"operator", {{"type", "p_laplacian"}, {"p", 4.0}}},
        {"drift", {{"family", "power"}, {"a1", 1.0}, {"a2", -0.5}, {"beta", 2.0}}},
        {"noise", {{"family", "power"}, {"b", 0.5}, {"m", 1.5}}},
        {"kernel", {{"type", "exponential"}, {"s2", 1.0}, {"ell", 0.2}}},
        {"initial", {{"profile", "bump"}, {"amplitude", 2.0}, {"center", 0.7}, {"width", 0.2}}},
        {"time",
         {{"dt", 1e-5},
          {"t_max", 0.5},
          {"blowup_threshold", 1e7},
          {"record_stride", 10},
          {"scheme", "tamed_explicit"}}},
        {"mc", {{"paths", 32}, {"seed", 99}}},
    };
    const RunConfig cfg = parse_run_config(doc);
    const json normalized = echo(cfg);
    CHECK(parse_run_config(normalized).p == 4.0);
    CHECK(echo(parse_run_config(normalized)) == normalized);
    CHECK(normalized["time"]["scheme"] == "tamed_explicit");
}

TEST_CASE("unknown sections and keys are rejected by name", "[config]") {
    CHECK_THROWS_WITH(parse_run_config(json{{"domian", json::object()}}),
                      Catch::Matchers::ContainsSubstring("domian"));
    CHECK_THROWS_WITH(parse_run_config(json{{"domain", {{"len", 1.0}}}}),
                      Catch::Matchers::ContainsSubstring("domain.len"));
    CHECK_THROWS_WITH(parse_run_config(json{{"noise", {{"family", "power"}, {"q", 1.0}}}}),
                      Catch::Matchers::ContainsSubstring("noise.q"));
    // keys belonging to a different family variant are unknown for this one
    CHECK_THROWS_WITH(parse_run_config(json{{"drift", {{"family", "power"}, {"alpha", 1.0}}}}),
                      Catch::Matchers::ContainsSubstring("drift.alpha"));
}

TEST_CASE("numeric constraints are validated with key-precise messages", "[config]") {
    CHECK_THROWS_WITH(parse_run_config(json{{"domain", {{"n", 2}}}}),
                      Catch::Matchers::ContainsSubstring("domain.n"));
    CHECK_THROWS_WITH(parse_run_config(json{{"time", {{"dt", -1.0}}}}),
                      Catch::Matchers::ContainsSubstring("time.dt"));
    CHECK_THROWS_WITH(parse_run_config(json{{"time", {{"dt", 2.0}, {"t_max", 1.0}}}}),
                      Catch::Matchers::ContainsSubstring("time.dt"));
    CHECK_THROWS_WITH(parse_run_config(json{{"drift", {{"family", "fujita"}, {"alpha", 0.0}}}}),
                      Catch::Matchers::ContainsSubstring("drift.alpha"));
    CHECK_THROWS_WITH(parse_run_config(json{{"noise", {{"family", "power"}, {"m", 0.5}}}}),
                      Catch::Matchers::ContainsSubstring("noise.m"));
    CHECK_THROWS_WITH(parse_run_config(json{{"domain", {{"n", 10.5}}}}),
                      Catch::Matchers::ContainsSubstring("integer"));
    CHECK_THROWS_WITH(parse_run_config(json{{"drift", {{"family", "nonsense"}}}}),
                      Catch::Matchers::ContainsSubstring("drift.family"));
}

TEST_CASE("p-laplacian scheme coupling", "[config]") {
    json doc = {{"operator", {{"type", "p_laplacian"}, {"p", 3.0}}}};
    CHECK(parse_run_config(doc).scheme == "tamed_explicit");

    doc["time"] = {{"scheme", "semi_implicit"}};
    CHECK_THROWS_WITH(parse_run_config(doc),
                      Catch::Matchers::ContainsSubstring("time.scheme"));
}

TEST_CASE("dotted overrides reach into the document", "[config]") {
    json doc = json::object();
    apply_override(doc, "domain.n=64");
    apply_override(doc, "drift.family=fujita");
    apply_override(doc, "drift.alpha=1.5");
    apply_override(doc, "time.dt=1e-5");
    const RunConfig cfg = parse_run_config(doc);
    CHECK(cfg.n == 64);
    CHECK(cfg.drift_family == "fujita");
    CHECK(cfg.alpha == 1.5);
    CHECK(cfg.dt == Approx(1e-5));

    CHECK_THROWS_AS(apply_override(doc, "noconstraint"), ConfigError);
    CHECK_THROWS_AS(apply_override(doc, "toplevel=1"), ConfigError);
    apply_override(doc, "domain.bogus=1");
    CHECK_THROWS_WITH(parse_run_config(doc),
                      Catch::Matchers::ContainsSubstring("domain.bogus"));
}

TEST_CASE("build_problem maps the configured families", "[config]") {
    json doc = {
        {"domain", {{"length", 1.0}, {"n", 100}}},
        {"drift", {{"family", "fujita"}, {"alpha", 2.0}}},
        {"noise", {{"family", "power"}, {"b", 6.0}, {"m", 2.0}}},
        {"kernel", {{"type", "constant"}, {"q0", 1.0}}},
        {"initial", {{"profile", "scaled_phi"}, {"mass", 1.0}}},
    };
    const RunConfig cfg = parse_run_config(doc);
    const ProblemSpec prob = build_problem(cfg);
    CHECK(prob.domain.n == 100);
    CHECK(prob.drift.family == DriftSpec::Family::fujita);
    CHECK(prob.drift.alpha == 2.0);
    CHECK(prob.diffusion.family == DiffusionSpec::Family::power);
    CHECK(prob.diffusion.b == 6.0);
    CHECK(prob.kernel.type == Kernel::Type::constant);
    CHECK(prob.initial.shape == InitialProfile::Shape::scaled_phi);

    // the scaled profile realizes the requested pairing exactly on the grid
    const EigenPair eig = analytic_eigenpair(prob.domain);
    const Field u0 = make_initial(prob.initial, prob.domain);
    CHECK(inner_product(u0, eig.phi) == Approx(1.0).epsilon(1e-12));

    const SolverConfig scfg = build_solver(cfg);
    CHECK(scfg.scheme == Scheme::semi_implicit);
    const EnsembleConfig ecfg = build_ensemble(cfg, 3);
    CHECK(ecfg.n_paths == cfg.paths);
    CHECK(ecfg.max_workers == 3);
}
