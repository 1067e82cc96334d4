#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "spdelab/dynamics.hpp"
#include "spdelab/montecarlo.hpp"
#include "spdelab/noise.hpp"

namespace spdelab {

// Violation of the config schema or of a parameter constraint; the message
// names the offending key.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The full structured run configuration. Parsing materializes every default,
// so echo() emits a normalized document that re-parses to the same state.
struct RunConfig {
    // domain
    double length = 1.0;
    int n = 200;
    // operator
    std::string operator_type = "laplacian";
    double nu = 1.0;
    double p = 2.0;
    // drift
    std::string drift_family = "zero";
    double a1 = 0.0, a2 = 0.0, beta = 2.0, alpha = 1.0, gamma = 2.0;
    // noise
    std::string noise_family = "zero";
    double b = 0.0, m = 1.0, k = 0.0;
    // kernel
    std::string kernel_type = "constant";
    double q0 = 1.0, s2 = 1.0, ell = 0.1;
    // initial
    std::string initial_profile = "sine";
    double amplitude = 1.0, mass = 1.0, center = 0.5, width = 0.1;
    // time
    double dt = 1e-4;
    double t_max = 1.0;
    double blowup_threshold = 1e6;
    int record_stride = 100;
    std::string scheme;  // "", "semi_implicit" or "tamed_explicit"
    // mc
    int paths = 100;
    std::uint64_t seed = 12345;
};

namespace detail {

using nlohmann::json;

inline void reject_unknown_keys(const json& section, const std::string& prefix,
                                const std::set<std::string>& allowed) {
    for (auto it = section.begin(); it != section.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key '" + prefix + "." + it.key() + "'");
}

inline double get_number(const json& section, const std::string& prefix, const std::string& key,
                         double fallback) {
    if (!section.contains(key)) return fallback;
    const json& v = section.at(key);
    if (!v.is_number())
        throw ConfigError("key '" + prefix + "." + key + "' must be a number");
    return v.get<double>();
}

inline int get_integer(const json& section, const std::string& prefix, const std::string& key,
                       int fallback) {
    if (!section.contains(key)) return fallback;
    const json& v = section.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned())
        throw ConfigError("key '" + prefix + "." + key + "' must be an integer");
    return v.get<int>();
}

inline std::uint64_t get_u64(const json& section, const std::string& prefix,
                             const std::string& key, std::uint64_t fallback) {
    if (!section.contains(key)) return fallback;
    const json& v = section.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned())
        throw ConfigError("key '" + prefix + "." + key + "' must be an integer");
    return v.get<std::uint64_t>();
}

inline std::string get_string(const json& section, const std::string& prefix,
                              const std::string& key, const std::string& fallback,
                              const std::set<std::string>& allowed_values) {
    std::string value = fallback;
    if (section.contains(key)) {
        const json& v = section.at(key);
        if (!v.is_string())
            throw ConfigError("key '" + prefix + "." + key + "' must be a string");
        value = v.get<std::string>();
    }
    if (!allowed_values.empty() && !allowed_values.count(value))
        throw ConfigError("key '" + prefix + "." + key + "': unsupported value '" + value + "'");
    return value;
}

inline void require(bool cond, const std::string& key, const std::string& what) {
    if (!cond) throw ConfigError("key '" + key + "': " + what);
}

}  // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& doc) {
    using detail::get_integer;
    using detail::get_number;
    using detail::get_string;
    using detail::get_u64;
    using detail::reject_unknown_keys;
    using detail::require;

    if (!doc.is_object()) throw ConfigError("config document must be a JSON object");
    static const std::set<std::string> sections = {"domain", "operator", "drift",  "noise",
                                                   "kernel", "initial",  "time",   "mc"};
    for (auto it = doc.begin(); it != doc.end(); ++it)
        if (!sections.count(it.key()))
            throw ConfigError("unknown config section '" + it.key() + "'");

    RunConfig cfg;
    const nlohmann::json empty = nlohmann::json::object();
    auto section = [&doc, &empty](const char* name) -> const nlohmann::json& {
        if (!doc.contains(name)) return empty;
        if (!doc.at(name).is_object())
            throw ConfigError(std::string("config section '") + name + "' must be an object");
        return doc.at(name);
    };

    {
        const auto& s = section("domain");
        reject_unknown_keys(s, "domain", {"length", "n"});
        cfg.length = get_number(s, "domain", "length", cfg.length);
        cfg.n = get_integer(s, "domain", "n", cfg.n);
        require(cfg.length > 0.0, "domain.length", "must be > 0");
        require(cfg.n >= 3, "domain.n", "must be >= 3");
    }
    {
        const auto& s = section("operator");
        cfg.operator_type =
            get_string(s, "operator", "type", cfg.operator_type, {"laplacian", "p_laplacian"});
        if (cfg.operator_type == "laplacian") {
            reject_unknown_keys(s, "operator", {"type", "nu"});
            cfg.nu = get_number(s, "operator", "nu", cfg.nu);
            require(cfg.nu > 0.0, "operator.nu", "must be > 0");
        } else {
            reject_unknown_keys(s, "operator", {"type", "p"});
            cfg.p = get_number(s, "operator", "p", cfg.p);
            require(cfg.p >= 2.0, "operator.p", "must be >= 2");
        }
    }
    {
        const auto& s = section("drift");
        cfg.drift_family = get_string(s, "drift", "family", cfg.drift_family,
                                      {"zero", "power", "fujita", "allen_cahn", "power_decay"});
        if (cfg.drift_family == "power") {
            reject_unknown_keys(s, "drift", {"family", "a1", "a2", "beta"});
            cfg.a1 = get_number(s, "drift", "a1", cfg.a1);
            cfg.a2 = get_number(s, "drift", "a2", cfg.a2);
            cfg.beta = get_number(s, "drift", "beta", cfg.beta);
            require(cfg.beta >= 1.0, "drift.beta", "must be >= 1");
        } else if (cfg.drift_family == "fujita") {
            reject_unknown_keys(s, "drift", {"family", "alpha"});
            cfg.alpha = get_number(s, "drift", "alpha", cfg.alpha);
            require(cfg.alpha > 0.0, "drift.alpha", "must be > 0");
        } else if (cfg.drift_family == "power_decay") {
            reject_unknown_keys(s, "drift", {"family", "gamma"});
            cfg.gamma = get_number(s, "drift", "gamma", cfg.gamma);
            require(cfg.gamma > 1.0, "drift.gamma", "must be > 1");
        } else {
            reject_unknown_keys(s, "drift", {"family"});
        }
    }
    {
        const auto& s = section("noise");
        cfg.noise_family =
            get_string(s, "noise", "family", cfg.noise_family, {"zero", "power", "gradient"});
        if (cfg.noise_family == "power") {
            reject_unknown_keys(s, "noise", {"family", "b", "m"});
            cfg.b = get_number(s, "noise", "b", cfg.b);
            cfg.m = get_number(s, "noise", "m", cfg.m);
            require(cfg.m >= 1.0, "noise.m", "must be >= 1");
        } else if (cfg.noise_family == "gradient") {
            reject_unknown_keys(s, "noise", {"family", "k"});
            cfg.k = get_number(s, "noise", "k", cfg.k);
        } else {
            reject_unknown_keys(s, "noise", {"family"});
        }
    }
    {
        const auto& s = section("kernel");
        cfg.kernel_type = get_string(s, "kernel", "type", cfg.kernel_type,
                                     {"constant", "exponential", "diagonal"});
        if (cfg.kernel_type == "exponential") {
            reject_unknown_keys(s, "kernel", {"type", "s2", "ell"});
            cfg.s2 = get_number(s, "kernel", "s2", cfg.s2);
            cfg.ell = get_number(s, "kernel", "ell", cfg.ell);
            require(cfg.s2 > 0.0, "kernel.s2", "must be > 0");
            require(cfg.ell > 0.0, "kernel.ell", "must be > 0");
        } else {
            reject_unknown_keys(s, "kernel", {"type", "q0"});
            cfg.q0 = get_number(s, "kernel", "q0", cfg.q0);
            require(cfg.q0 > 0.0, "kernel.q0", "must be > 0");
        }
    }
    {
        const auto& s = section("initial");
        cfg.initial_profile = get_string(s, "initial", "profile", cfg.initial_profile,
                                         {"sine", "scaled_phi", "bump", "constant"});
        if (cfg.initial_profile == "sine" || cfg.initial_profile == "constant") {
            reject_unknown_keys(s, "initial", {"profile", "amplitude"});
            cfg.amplitude = get_number(s, "initial", "amplitude", cfg.amplitude);
        } else if (cfg.initial_profile == "scaled_phi") {
            reject_unknown_keys(s, "initial", {"profile", "mass"});
            cfg.mass = get_number(s, "initial", "mass", cfg.mass);
        } else {
            reject_unknown_keys(s, "initial", {"profile", "amplitude", "center", "width"});
            cfg.amplitude = get_number(s, "initial", "amplitude", cfg.amplitude);
            cfg.center = get_number(s, "initial", "center", cfg.center);
            cfg.width = get_number(s, "initial", "width", cfg.width);
            require(cfg.width > 0.0, "initial.width", "must be > 0");
        }
    }
    {
        const auto& s = section("time");
        reject_unknown_keys(s, "time",
                            {"dt", "t_max", "blowup_threshold", "record_stride", "scheme"});
        cfg.dt = get_number(s, "time", "dt", cfg.dt);
        cfg.t_max = get_number(s, "time", "t_max", cfg.t_max);
        cfg.blowup_threshold = get_number(s, "time", "blowup_threshold", cfg.blowup_threshold);
        cfg.record_stride = get_integer(s, "time", "record_stride", cfg.record_stride);
        const std::string default_scheme =
            cfg.operator_type == "p_laplacian" ? "tamed_explicit" : "semi_implicit";
        cfg.scheme =
            get_string(s, "time", "scheme", default_scheme, {"semi_implicit", "tamed_explicit"});
        require(cfg.dt > 0.0, "time.dt", "must be > 0");
        require(cfg.dt < cfg.t_max, "time.dt", "must be < time.t_max");
        require(cfg.blowup_threshold > 0.0, "time.blowup_threshold", "must be > 0");
        require(cfg.record_stride >= 1, "time.record_stride", "must be >= 1");
        require(!(cfg.operator_type == "p_laplacian" && cfg.scheme == "semi_implicit"),
                "time.scheme", "the p_laplacian operator requires tamed_explicit");
    }
    {
        const auto& s = section("mc");
        reject_unknown_keys(s, "mc", {"paths", "seed"});
        cfg.paths = get_integer(s, "mc", "paths", cfg.paths);
        cfg.seed = get_u64(s, "mc", "seed", cfg.seed);
        require(cfg.paths >= 1, "mc.paths", "must be >= 1");
    }
    return cfg;
}

// Applies one --set dotted.key=value override onto the raw document.
inline void apply_override(nlohmann::json& doc, const std::string& spec) {
    const std::size_t eq = spec.find('=');
    if (eq == std::string::npos)
        throw ConfigError("--set expects dotted.key=value, got '" + spec + "'");
    const std::string path = spec.substr(0, eq);
    const std::string raw = spec.substr(eq + 1);
    const std::size_t dot = path.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 >= path.size())
        throw ConfigError("--set key must look like section.key, got '" + path + "'");
    const std::string section = path.substr(0, dot);
    const std::string key = path.substr(dot + 1);

    nlohmann::json value;
    try {
        value = nlohmann::json::parse(raw);
        if (value.is_object() || value.is_array())
            value = raw;  // structured values are not valid overrides; keep as string
    } catch (const nlohmann::json::parse_error&) {
        value = raw;  // bare strings like "power" arrive unquoted
    }
    doc[section][key] = value;
}

// Normalized document: every section present, every effective key stated.
inline nlohmann::json echo(const RunConfig& cfg) {
    nlohmann::json doc;
    doc["domain"] = {{"length", cfg.length}, {"n", cfg.n}};
    if (cfg.operator_type == "laplacian")
        doc["operator"] = {{"type", cfg.operator_type}, {"nu", cfg.nu}};
    else
        doc["operator"] = {{"type", cfg.operator_type}, {"p", cfg.p}};

    doc["drift"]["family"] = cfg.drift_family;
    if (cfg.drift_family == "power") {
        doc["drift"]["a1"] = cfg.a1;
        doc["drift"]["a2"] = cfg.a2;
        doc["drift"]["beta"] = cfg.beta;
    } else if (cfg.drift_family == "fujita") {
        doc["drift"]["alpha"] = cfg.alpha;
    } else if (cfg.drift_family == "power_decay") {
        doc["drift"]["gamma"] = cfg.gamma;
    }

    doc["noise"]["family"] = cfg.noise_family;
    if (cfg.noise_family == "power") {
        doc["noise"]["b"] = cfg.b;
        doc["noise"]["m"] = cfg.m;
    } else if (cfg.noise_family == "gradient") {
        doc["noise"]["k"] = cfg.k;
    }

    doc["kernel"]["type"] = cfg.kernel_type;
    if (cfg.kernel_type == "exponential") {
        doc["kernel"]["s2"] = cfg.s2;
        doc["kernel"]["ell"] = cfg.ell;
    } else {
        doc["kernel"]["q0"] = cfg.q0;
    }

    doc["initial"]["profile"] = cfg.initial_profile;
    if (cfg.initial_profile == "sine" || cfg.initial_profile == "constant") {
        doc["initial"]["amplitude"] = cfg.amplitude;
    } else if (cfg.initial_profile == "scaled_phi") {
        doc["initial"]["mass"] = cfg.mass;
    } else {
        doc["initial"]["amplitude"] = cfg.amplitude;
        doc["initial"]["center"] = cfg.center;
        doc["initial"]["width"] = cfg.width;
    }

    doc["time"] = {{"dt", cfg.dt},
                   {"t_max", cfg.t_max},
                   {"blowup_threshold", cfg.blowup_threshold},
                   {"record_stride", cfg.record_stride},
                   {"scheme", cfg.scheme}};
    doc["mc"] = {{"paths", cfg.paths}, {"seed", cfg.seed}};
    return doc;
}

inline ProblemSpec build_problem(const RunConfig& cfg) {
    Domain1D domain(cfg.length, cfg.n);

    SpatialOperator op = cfg.operator_type == "laplacian"
                             ? SpatialOperator::laplacian(cfg.nu)
                             : SpatialOperator::p_laplacian(cfg.p);

    DriftSpec drift;
    if (cfg.drift_family == "power")
        drift = DriftSpec::power(cfg.a1, cfg.a2, cfg.beta);
    else if (cfg.drift_family == "fujita")
        drift = DriftSpec::fujita(cfg.alpha);
    else if (cfg.drift_family == "allen_cahn")
        drift = DriftSpec::allen_cahn();
    else if (cfg.drift_family == "power_decay")
        drift = DriftSpec::power_decay(cfg.gamma);

    DiffusionSpec diffusion;
    if (cfg.noise_family == "power")
        diffusion = DiffusionSpec::power(cfg.b, cfg.m);
    else if (cfg.noise_family == "gradient")
        diffusion = DiffusionSpec::gradient(cfg.k);

    Kernel kernel = Kernel::constant(1.0);
    if (cfg.kernel_type == "constant")
        kernel = Kernel::constant(cfg.q0);
    else if (cfg.kernel_type == "exponential")
        kernel = Kernel::exponential(cfg.s2, cfg.ell);
    else
        kernel = Kernel::diagonal(cfg.q0);

    InitialProfile initial = InitialProfile::sine(1.0);
    if (cfg.initial_profile == "sine")
        initial = InitialProfile::sine(cfg.amplitude);
    else if (cfg.initial_profile == "scaled_phi")
        initial = InitialProfile::scaled_phi(cfg.mass);
    else if (cfg.initial_profile == "bump")
        initial = InitialProfile::bump(cfg.center, cfg.width, cfg.amplitude);
    else
        initial = InitialProfile::constant(cfg.amplitude);

    return ProblemSpec{domain, op, drift, diffusion, kernel, initial};
}

inline SolverConfig build_solver(const RunConfig& cfg) {
    SolverConfig s;
    s.dt = cfg.dt;
    s.t_max = cfg.t_max;
    s.blowup_threshold = cfg.blowup_threshold;
    s.record_stride = cfg.record_stride;
    s.scheme = cfg.scheme == "tamed_explicit" ? Scheme::tamed_explicit : Scheme::semi_implicit;
    return s;
}

inline EnsembleConfig build_ensemble(const RunConfig& cfg, int max_workers) {
    EnsembleConfig e;
    e.n_paths = cfg.paths;
    e.base_seed = cfg.seed;
    e.max_workers = max_workers;
    return e;
}

}  // namespace spdelab
