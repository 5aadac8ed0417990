// config.hpp — experiment configuration: JSON schema, validation, echo.
//
// One human-readable config file drives every CLI mode. All physical
// quantities are in units of J = 1 unless overridden. Sample counts accept
// the string "inf" (or null) for the ideal, noise-free readout.

#pragma once

#include "lskin/liouvillian.hpp"
#include "lskin/reservoir.hpp"
#include "lskin/tasks.hpp"

#include <json.hpp>

#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace lskin {

inline constexpr const char* kVersion = "0.1.0";

enum class Mode { SteadyProfile, Spectrum, Esp, RunTask, SweepEps, SweepNoise, DisorderCompare };

inline const char* mode_name(Mode m) {
    switch (m) {
        case Mode::SteadyProfile: return "steady-profile";
        case Mode::Spectrum: return "spectrum";
        case Mode::Esp: return "esp";
        case Mode::RunTask: return "run-task";
        case Mode::SweepEps: return "sweep-eps";
        case Mode::SweepNoise: return "sweep-noise";
        case Mode::DisorderCompare: return "disorder-compare";
    }
    return "?";
}

inline Mode mode_from_name(const std::string& name) {
    for (Mode m : {Mode::SteadyProfile, Mode::Spectrum, Mode::Esp, Mode::RunTask, Mode::SweepEps,
                   Mode::SweepNoise, Mode::DisorderCompare}) {
        if (name == mode_name(m)) return m;
    }
    throw std::invalid_argument("mode: unknown mode \"" + name + "\"");
}

// Partial overrides applied on top of the base network, one per compared variant.
struct VariantSpec {
    std::string name;
    std::optional<Topology> topology;
    std::optional<double> W;
    std::optional<double> epsilon;
    std::optional<int> edge_count;
};

struct ExperimentConfig {
    Mode mode{Mode::RunTask};
    std::uint64_t seed{1};
    std::string out{"out"};
    int jobs{1};

    NetworkSpec network;
    DissipatorSpec dissipator;

    int bosons{1};
    double dt{1.0};
    double samples{kIdealSamples};
    bool noise_on_train{true};
    int washout{1000};
    int train{1000};
    int test{1000};
    int realizations{100};
    double svd_cutoff{1e-10};
    double ridge{0.0};

    TaskKind task_kind{TaskKind::Stm};
    int tau{1};

    std::vector<double> eps_grid;
    std::vector<double> s_grid;
    std::vector<double> samples_grid;
    std::vector<int> tau_grid;
    std::vector<VariantSpec> variants;

    int esp_steps{200};
    bool record_trajectory{false};
    int trajectory_steps{100};
    int pattern_steps{300};
    bool dump_superoperator{false};
    bool dump_series{false};

    ReservoirConfig reservoir_config() const {
        ReservoirConfig rc;
        rc.network = network;
        rc.dissipator = dissipator;
        rc.bosons = bosons;
        rc.dt = dt;
        rc.samples = samples;
        rc.noise_on_train = noise_on_train;
        rc.realizations = realizations;
        rc.seed = seed;
        rc.svd_cutoff = svd_cutoff;
        rc.ridge = ridge;
        return rc;
    }

    TaskSpec task_spec() const {
        TaskSpec t;
        t.kind = task_kind;
        t.tau = tau;
        t.washout = washout;
        t.train = train;
        t.test = test;
        t.seed = seed;
        return t;
    }
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::vector<std::string>& problems)
        : std::runtime_error(join(problems)), errors(problems) {}
    std::vector<std::string> errors;

    static std::string join(const std::vector<std::string>& problems) {
        std::string msg = "configuration invalid:";
        for (const auto& p : problems) msg += "\n  - " + p;
        return msg;
    }
};

namespace detail {

using nlohmann::json;

inline double parse_samples_value(const json& v, const std::string& where) {
    if (v.is_null()) return kIdealSamples;
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf" || s == "ideal") return kIdealSamples;
        throw std::invalid_argument(where + ": expected a number or \"inf\"");
    }
    if (v.is_number()) {
        const double x = v.get<double>();
        if (!(x >= 1.0)) throw std::invalid_argument(where + ": must be >= 1");
        return x;
    }
    throw std::invalid_argument(where + ": expected a number or \"inf\"");
}

template <typename T>
void read_field(const json& obj, const char* key, T& out) {
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

}  // namespace detail

// ------------------------------ serialization --------------------------------

inline nlohmann::json to_json(const NetworkSpec& spec) {
    nlohmann::json j{{"sites", spec.sites},       {"topology", topology_name(spec.topology)},
                     {"J", spec.J},               {"W", spec.W},
                     {"epsilon", spec.epsilon},   {"edge_count", spec.edge_count},
                     {"seed", spec.seed}};
    if (spec.realized()) {
        j["onsite"] = spec.onsite;
        nlohmann::json edges = nlohmann::json::array();
        for (const auto& e : spec.edges) edges.push_back({e.i, e.j, e.amplitude});
        j["edges"] = edges;
    }
    return j;
}

inline NetworkSpec network_from_json(const nlohmann::json& j) {
    NetworkSpec spec;
    if (j.contains("sites")) spec.sites = j.at("sites").get<int>();
    if (j.contains("topology")) spec.topology = topology_from_name(j.at("topology").get<std::string>());
    detail::read_field(j, "J", spec.J);
    detail::read_field(j, "W", spec.W);
    detail::read_field(j, "epsilon", spec.epsilon);
    detail::read_field(j, "seed", spec.seed);
    spec.edge_count = spec.topology == Topology::Irregular ? default_edge_count(spec.sites) : 0;
    detail::read_field(j, "edge_count", spec.edge_count);
    // Realized arrays make a run replayable verbatim: when present, the
    // network is used exactly as given instead of being resampled.
    if (j.contains("onsite")) spec.onsite = j.at("onsite").get<std::vector<double>>();
    if (j.contains("edges")) {
        for (const auto& e : j.at("edges")) {
            spec.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
        }
    }
    if (!spec.onsite.empty() && static_cast<int>(spec.onsite.size()) != spec.sites) {
        throw std::invalid_argument("network.onsite: length must equal sites");
    }
    return spec;
}

inline nlohmann::json to_json(const DissipatorSpec& spec) {
    nlohmann::json j{{"gamma", spec.gamma},
                     {"epsilon", spec.epsilon},
                     {"dephasing", spec.dephasing_enabled}};
    if (spec.dephasing_gamma) j["dephasing_gamma"] = *spec.dephasing_gamma;
    return j;
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["mode"] = mode_name(c.mode);
    j["seed"] = c.seed;
    j["out"] = c.out;
    j["jobs"] = c.jobs;
    j["network"] = to_json(c.network);
    j["dissipator"] = to_json(c.dissipator);
    j["reservoir"] = {{"bosons", c.bosons},
                      {"dt", c.dt},
                      {"samples", std::isinf(c.samples) ? nlohmann::json("inf") : nlohmann::json(c.samples)},
                      {"noise_on_train", c.noise_on_train},
                      {"washout", c.washout},
                      {"train", c.train},
                      {"test", c.test},
                      {"realizations", c.realizations},
                      {"svd_cutoff", c.svd_cutoff},
                      {"ridge", c.ridge}};
    j["task"] = {{"kind", task_name(c.task_kind)}, {"tau", c.tau}};
    nlohmann::json sweep;
    if (!c.eps_grid.empty()) sweep["epsilon"] = c.eps_grid;
    if (!c.s_grid.empty()) sweep["s"] = c.s_grid;
    if (!c.samples_grid.empty()) {
        nlohmann::json grid = nlohmann::json::array();
        for (double v : c.samples_grid) grid.push_back(std::isinf(v) ? nlohmann::json("inf") : nlohmann::json(v));
        sweep["samples"] = grid;
    }
    if (!c.tau_grid.empty()) sweep["tau"] = c.tau_grid;
    if (!sweep.is_null()) j["sweep"] = sweep;
    if (!c.variants.empty()) {
        nlohmann::json vars = nlohmann::json::array();
        for (const auto& v : c.variants) {
            nlohmann::json jv{{"name", v.name}};
            if (v.topology) jv["topology"] = topology_name(*v.topology);
            if (v.W) jv["W"] = *v.W;
            if (v.epsilon) jv["epsilon"] = *v.epsilon;
            if (v.edge_count) jv["edge_count"] = *v.edge_count;
            vars.push_back(jv);
        }
        j["variants"] = vars;
    }
    j["esp_steps"] = c.esp_steps;
    j["record_trajectory"] = c.record_trajectory;
    j["trajectory_steps"] = c.trajectory_steps;
    j["pattern_steps"] = c.pattern_steps;
    j["dump_superoperator"] = c.dump_superoperator;
    j["dump_series"] = c.dump_series;
    return j;
}

// ------------------------------- parsing -------------------------------------

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    std::vector<std::string> problems;
    ExperimentConfig c;

    auto attempt = [&](const char* field, auto&& fn) {
        try {
            fn();
        } catch (const std::exception& ex) {
            problems.push_back(std::string(field) + ": " + ex.what());
        }
    };

    attempt("mode", [&] {
        if (j.contains("mode")) c.mode = mode_from_name(j.at("mode").get<std::string>());
    });
    attempt("seed", [&] { detail::read_field(j, "seed", c.seed); });
    attempt("out", [&] { detail::read_field(j, "out", c.out); });
    attempt("jobs", [&] {
        detail::read_field(j, "jobs", c.jobs);
        if (c.jobs < 1) throw std::invalid_argument("must be >= 1");
    });

    attempt("network", [&] {
        if (!j.contains("network")) throw std::invalid_argument("section missing");
        c.network = network_from_json(j.at("network"));
        c.network.validate();
    });

    attempt("dissipator", [&] {
        if (j.contains("dissipator")) {
            const auto& d = j.at("dissipator");
            detail::read_field(d, "gamma", c.dissipator.gamma);
            detail::read_field(d, "epsilon", c.dissipator.epsilon);
            if (d.contains("dephasing")) c.dissipator.dephasing_enabled = d.at("dephasing").get<bool>();
            if (d.contains("dephasing_gamma") && !d.at("dephasing_gamma").is_null()) {
                c.dissipator.dephasing_gamma = d.at("dephasing_gamma").get<double>();
            }
        } else {
            c.dissipator.epsilon = c.network.epsilon;
        }
        c.dissipator.validate();
    });
    // The boundary parameter is one knob; keep the Hamiltonian and dissipator
    // sides in lockstep unless the config says otherwise.
    if (j.contains("network") && !(j.contains("dissipator") && j.at("dissipator").contains("epsilon"))) {
        c.dissipator.epsilon = c.network.epsilon;
    }

    attempt("reservoir", [&] {
        if (!j.contains("reservoir")) return;
        const auto& r = j.at("reservoir");
        detail::read_field(r, "bosons", c.bosons);
        detail::read_field(r, "dt", c.dt);
        if (r.contains("samples")) c.samples = detail::parse_samples_value(r.at("samples"), "reservoir.samples");
        detail::read_field(r, "noise_on_train", c.noise_on_train);
        detail::read_field(r, "washout", c.washout);
        detail::read_field(r, "train", c.train);
        detail::read_field(r, "test", c.test);
        detail::read_field(r, "realizations", c.realizations);
        detail::read_field(r, "svd_cutoff", c.svd_cutoff);
        detail::read_field(r, "ridge", c.ridge);
        if (c.bosons < 0) throw std::invalid_argument("bosons must be >= 0");
        if (!(c.dt > 0.0)) throw std::invalid_argument("dt must be > 0");
        if (c.realizations < 1) throw std::invalid_argument("realizations must be >= 1");
    });

    attempt("task", [&] {
        if (!j.contains("task")) return;
        const auto& t = j.at("task");
        if (t.contains("kind")) c.task_kind = task_from_name(t.at("kind").get<std::string>());
        detail::read_field(t, "tau", c.tau);
    });

    attempt("sweep", [&] {
        if (!j.contains("sweep")) return;
        const auto& s = j.at("sweep");
        if (s.contains("epsilon")) c.eps_grid = s.at("epsilon").get<std::vector<double>>();
        if (s.contains("s")) c.s_grid = s.at("s").get<std::vector<double>>();
        if (s.contains("tau")) c.tau_grid = s.at("tau").get<std::vector<int>>();
        if (s.contains("samples")) {
            for (const auto& v : s.at("samples")) {
                c.samples_grid.push_back(detail::parse_samples_value(v, "sweep.samples"));
            }
        }
    });

    attempt("variants", [&] {
        if (!j.contains("variants")) return;
        for (const auto& jv : j.at("variants")) {
            VariantSpec v;
            v.name = jv.at("name").get<std::string>();
            if (jv.contains("topology")) v.topology = topology_from_name(jv.at("topology").get<std::string>());
            if (jv.contains("W")) v.W = jv.at("W").get<double>();
            if (jv.contains("epsilon")) v.epsilon = jv.at("epsilon").get<double>();
            if (jv.contains("edge_count")) v.edge_count = jv.at("edge_count").get<int>();
            c.variants.push_back(std::move(v));
        }
    });

    attempt("esp_steps", [&] {
        detail::read_field(j, "esp_steps", c.esp_steps);
        if (c.esp_steps < 1) throw std::invalid_argument("must be >= 1");
    });
    attempt("record_trajectory", [&] { detail::read_field(j, "record_trajectory", c.record_trajectory); });
    attempt("trajectory_steps", [&] { detail::read_field(j, "trajectory_steps", c.trajectory_steps); });
    attempt("pattern_steps", [&] { detail::read_field(j, "pattern_steps", c.pattern_steps); });
    attempt("dump_superoperator", [&] { detail::read_field(j, "dump_superoperator", c.dump_superoperator); });
    attempt("dump_series", [&] { detail::read_field(j, "dump_series", c.dump_series); });

    // Mode-specific requirements.
    const bool needs_eps_grid = c.mode == Mode::SweepEps;
    const bool needs_s_grid = c.mode == Mode::SteadyProfile || c.mode == Mode::Spectrum;
    if (needs_eps_grid && c.eps_grid.empty()) problems.push_back("sweep.epsilon: required for mode sweep-eps");
    if (needs_s_grid && c.s_grid.empty()) problems.push_back("sweep.s: required for this mode");
    if ((c.mode == Mode::SteadyProfile || c.mode == Mode::Spectrum) && c.eps_grid.empty()) {
        c.eps_grid = {c.network.epsilon};
    }
    if (c.mode == Mode::SweepNoise && c.samples_grid.empty()) {
        problems.push_back("sweep.samples: required for mode sweep-noise");
    }
    if (c.mode == Mode::DisorderCompare) {
        if (c.tau_grid.empty()) problems.push_back("sweep.tau: required for mode disorder-compare");
        if (c.variants.empty()) problems.push_back("variants: required for mode disorder-compare");
    }
    if (c.samples_grid.empty()) c.samples_grid = {c.samples};

    if (!problems.empty()) throw ConfigError(problems);
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& ex) {
        throw std::runtime_error("config parse error in " + path + ": " + ex.what());
    }
    return config_from_json(j);
}

}  // namespace lskin
