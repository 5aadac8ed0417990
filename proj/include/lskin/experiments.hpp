// experiments.hpp — figure-level experiment modes behind the CLI.
//
// Every mode writes CSV artifacts with a documented header plus a JSON run
// manifest (config echo, version, timings). Outputs are deterministic under a
// fixed master seed; partially written files are removed if a mode fails.

#pragma once

#include "lskin/config.hpp"
#include "lskin/dynamics.hpp"
#include "lskin/io.hpp"
#include "lskin/parallel.hpp"
#include "lskin/reservoir.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

namespace lskin {

struct RunArtifacts {
    std::vector<std::string> files;
    nlohmann::json manifest;
};

namespace detail {

class ArtifactTracker {
public:
    explicit ArtifactTracker(std::string dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    std::string path(const std::string& name) {
        std::string full = (std::filesystem::path(dir_) / name).string();
        files_.push_back(full);
        return full;
    }

    const std::vector<std::string>& files() const { return files_; }

    void discard_all() {
        for (const auto& f : files_) {
            std::error_code ec;
            std::filesystem::remove(f, ec);
        }
        files_.clear();
    }

private:
    std::string dir_;
    std::vector<std::string> files_;
};

inline std::string sample_label(double v) {
    if (std::isinf(v)) return "inf";
    return CsvWriter::field(v);
}

inline std::string grid_tag(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    std::string s = buf;
    for (auto& ch : s) {
        if (ch == '.') ch = 'p';
        if (ch == '+') ch = '_';
    }
    return s;
}

// Network + dissipator with the boundary parameter pinned to eps on both the
// Hamiltonian and dissipative sides.
inline ReservoirConfig with_epsilon(ReservoirConfig rc, double eps) {
    rc.network.epsilon = eps;
    rc.dissipator.epsilon = eps;
    return rc;
}

inline void apply_variant(ReservoirConfig& rc, const VariantSpec& v) {
    if (v.topology) {
        rc.network.topology = *v.topology;
        if (rc.network.topology == Topology::Irregular && rc.network.edge_count == 0) {
            rc.network.edge_count = default_edge_count(rc.network.sites);
        }
    }
    if (v.W) rc.network.W = *v.W;
    if (v.epsilon) {
        rc.network.epsilon = *v.epsilon;
        rc.dissipator.epsilon = *v.epsilon;
    }
    if (v.edge_count) rc.network.edge_count = *v.edge_count;
}

// First-site population trace of realization 0, shared inputs across calls.
inline void write_trajectory_rows(CsvWriter& csv, const ReservoirConfig& rc, const TaskSpec& task,
                                  double eps_column, int max_steps) {
    const BasisPtr basis = enumerate_sector(rc.network.sites, rc.bosons);
    const NetworkSpec net = realize_network(rc, 0);
    TaskSpec seeded = task;
    seeded.seed = derive_seed(rc.seed, 0, Stream::Inputs);
    const std::vector<double> inputs = generate_inputs(seeded);
    Rng init_rng(derive_seed(rc.seed, 0, Stream::InitialState));
    const DensityMatrix initial = random_pure_state(basis, init_rng);

    const Matrix n1 = number_operator(basis, 1).matrix;
    StepEvolver evolver(net, rc.dissipator, basis, rc.dt);
    Vector v = vec(initial.rho);
    const int steps = std::min<int>(static_cast<int>(inputs.size()), max_steps);
    for (int k = 0; k < steps; ++k) {
        evolver.step(inputs[static_cast<std::size_t>(k)], v);
        const double population = (unvec(v, basis->size()) * n1).trace().real();
        csv.row(eps_column, k, inputs[static_cast<std::size_t>(k)], population);
    }
}

}  // namespace detail

// ------------------------------ mode bodies ----------------------------------

inline void run_steady_profile(const ExperimentConfig& cfg, detail::ArtifactTracker& tracker,
                               nlohmann::json& manifest) {
    const BasisPtr basis = enumerate_sector(cfg.network.sites, cfg.bosons);
    CsvWriter csv(tracker.path("steady_profile.csv"));
    csv.comment(std::string("lskin-qrc v") + kVersion + " steady-profile v1");
    csv.header({"epsilon", "s", "site", "population", "coherence_re", "coherence_im"});

    const std::uint64_t disorder_seed = derive_seed(cfg.seed, 0, Stream::Disorder);
    for (double eps : cfg.eps_grid) {
        const NetworkSpec net = sample_network(cfg.network.sites, cfg.network.topology, cfg.network.J,
                                               cfg.network.W, eps, cfg.network.edge_count, disorder_seed);
        DissipatorSpec dis = cfg.dissipator;
        dis.epsilon = eps;
        for (double s : cfg.s_grid) {
            const SteadyState ss = steady_state(assemble_liouvillian(net, dis.with_input(s), basis));
            const SiteProfile profile = population_profile(ss.rho);
            for (int site = 1; site <= cfg.network.sites; ++site) {
                csv.row(eps, s, site, profile.populations[site - 1], profile.coherences[site - 1].real(),
                        profile.coherences[site - 1].imag());
            }
        }
        std::cerr << "[lskin] steady-profile eps=" << eps << " done\n";
    }
    manifest["disorder_seed"] = disorder_seed;
}

inline void run_spectrum(const ExperimentConfig& cfg, detail::ArtifactTracker& tracker,
                         nlohmann::json& manifest) {
    const BasisPtr basis = enumerate_sector(cfg.network.sites, cfg.bosons);
    CsvWriter eig_csv(tracker.path("eigenvalues.csv"));
    eig_csv.comment(std::string("lskin-qrc v") + kVersion + " spectrum v1");
    eig_csv.header({"epsilon", "s", "index", "real", "imag"});
    CsvWriter gap_csv(tracker.path("gaps.csv"));
    gap_csv.comment(std::string("lskin-qrc v") + kVersion + " spectrum gaps v1");
    gap_csv.header({"epsilon", "s", "gap", "t_mix", "zero_modes"});

    const std::uint64_t disorder_seed = derive_seed(cfg.seed, 0, Stream::Disorder);
    for (double eps : cfg.eps_grid) {
        const NetworkSpec net = sample_network(cfg.network.sites, cfg.network.topology, cfg.network.J,
                                               cfg.network.W, eps, cfg.network.edge_count, disorder_seed);
        DissipatorSpec dis = cfg.dissipator;
        dis.epsilon = eps;
        for (double s : cfg.s_grid) {
            const Liouvillian lio = assemble_liouvillian(net, dis.with_input(s), basis);
            const Spectrum spec = spectrum(lio);
            for (Eigen::Index k = 0; k < spec.eigenvalues.size(); ++k) {
                eig_csv.row(eps, s, static_cast<int>(k), spec.eigenvalues[k].real(),
                            spec.eigenvalues[k].imag());
            }
            gap_csv.row(eps, s, spec.gap, spec.t_mix, spec.zero_modes);
            if (cfg.dump_superoperator) {
                const std::string name =
                    "superop_eps" + detail::grid_tag(eps) + "_s" + detail::grid_tag(s) + ".bin";
                write_superoperator(tracker.path(name), lio.matrix,
                                    static_cast<std::uint32_t>(basis->size()));
            }
        }
    }
    manifest["disorder_seed"] = disorder_seed;
}

inline void run_esp(const ExperimentConfig& cfg, detail::ArtifactTracker& tracker,
                    nlohmann::json& manifest) {
    const BasisPtr basis = enumerate_sector(cfg.network.sites, cfg.bosons);
    const ReservoirConfig rc = cfg.reservoir_config();
    const NetworkSpec net = realize_network(rc, 0);

    Rng input_rng(derive_seed(cfg.seed, 0, Stream::Inputs));
    std::vector<double> inputs(static_cast<std::size_t>(cfg.esp_steps));
    for (auto& s : inputs) s = input_rng.uniform();

    Rng rng1(derive_seed(cfg.seed, 0, Stream::InitialState));
    Rng rng2(derive_seed(cfg.seed, 1, Stream::InitialState));
    const DensityMatrix rho1 = random_pure_state(basis, rng1);
    const DensityMatrix rho2 = random_pure_state(basis, rng2);

    StepEvolver evolver(net, cfg.dissipator, basis, cfg.dt);
    const std::vector<double> distances = esp_distance_trace(evolver, rho1, rho2, inputs);

    CsvWriter csv(tracker.path("esp.csv"));
    csv.comment(std::string("lskin-qrc v") + kVersion + " esp v1");
    csv.header({"step", "input", "trace_distance"});
    for (std::size_t k = 0; k < distances.size(); ++k) {
        csv.row(static_cast<int>(k), inputs[k], distances[k]);
    }
    manifest["final_distance"] = distances.empty() ? 0.0 : distances.back();
}

// Shared by run-task, sweep-eps, and sweep-noise: evolve each realization
// once, then score every requested noise level on the same clean features.
inline void run_sweep(const ExperimentConfig& cfg, detail::ArtifactTracker& tracker,
                      nlohmann::json& manifest, const std::vector<double>& eps_grid) {
    const TaskSpec task = cfg.task_spec();
    const ReservoirConfig base = cfg.reservoir_config();
    const BasisPtr basis = enumerate_sector(base.network.sites, base.bosons);
    const std::vector<double>& ns_grid = cfg.samples_grid;

    CsvWriter sweep_csv(tracker.path("sweep.csv"));
    sweep_csv.comment(std::string("lskin-qrc v") + kVersion + " sweep v1");
    sweep_csv.header({"epsilon", "samples", "realizations", "mean_capacity", "std_capacity"});
    CsvWriter real_csv(tracker.path("realizations.csv"));
    real_csv.comment(std::string("lskin-qrc v") + kVersion + " sweep realizations v1");
    real_csv.header({"epsilon", "samples", "realization", "seed", "W", "task", "tau", "capacity"});

    std::unique_ptr<CsvWriter> traj_csv;
    if (cfg.record_trajectory) {
        traj_csv = std::make_unique<CsvWriter>(tracker.path("trajectory.csv"));
        traj_csv->comment(std::string("lskin-qrc v") + kVersion + " trajectory v1 (realization 0, site 1)");
        traj_csv->header({"epsilon", "step", "input", "population"});
    }

    nlohmann::json summary = nlohmann::json::array();
    for (double eps : eps_grid) {
        const auto t0 = std::chrono::steady_clock::now();
        const ReservoirConfig rc = detail::with_epsilon(base, eps);

        // Workers fill indexed slots; rows are written afterwards in
        // realization order so CSV bytes do not depend on scheduling.
        struct Slot {
            bool ok{false};
            std::vector<double> capacities;
            std::string error;
        };
        std::vector<Slot> slots(static_cast<std::size_t>(rc.realizations));
        parallel_for(rc.realizations, cfg.jobs, [&](int r) {
            auto& slot = slots[static_cast<std::size_t>(r)];
            const auto r0 = std::chrono::steady_clock::now();
            try {
                const RealizationData data =
                    realize_features(rc, task, static_cast<std::uint64_t>(r), basis);
                slot.capacities.resize(ns_grid.size());
                for (std::size_t n = 0; n < ns_grid.size(); ++n) {
                    slot.capacities[n] = evaluate_realization(data, task, rc, ns_grid[n],
                                                              static_cast<std::uint64_t>(r));
                }
                slot.ok = true;
            } catch (const std::exception& ex) {
                slot.error = ex.what();
            }
            const double rsecs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - r0).count();
            std::fprintf(stderr, "[lskin] eps=%g realization %d/%d took %.2f s\n", eps, r + 1,
                         rc.realizations, rsecs);
        });

        std::vector<std::vector<double>> caps(ns_grid.size());
        std::vector<std::string> failures;
        for (int r = 0; r < rc.realizations; ++r) {
            const auto& slot = slots[static_cast<std::size_t>(r)];
            if (!slot.ok) {
                failures.push_back("eps=" + CsvWriter::field(eps) + " realization " +
                                   std::to_string(r) + ": " + slot.error);
                std::cerr << "[lskin] " << failures.back() << "\n";
                continue;
            }
            for (std::size_t n = 0; n < ns_grid.size(); ++n) {
                caps[n].push_back(slot.capacities[n]);
                real_csv.row(eps, detail::sample_label(ns_grid[n]), r,
                             derive_seed(rc.seed, static_cast<std::uint64_t>(r), Stream::Disorder),
                             rc.network.W, task_name(task.kind), task.tau, slot.capacities[n]);
            }
        }

        for (std::size_t n = 0; n < ns_grid.size(); ++n) {
            RunResult stats;
            stats.capacities = caps[n];
            finalize_statistics(stats);
            sweep_csv.row(eps, detail::sample_label(ns_grid[n]), static_cast<int>(caps[n].size()),
                          stats.mean_capacity, stats.std_capacity);
            summary.push_back({{"epsilon", eps},
                               {"samples", detail::sample_label(ns_grid[n])},
                               {"mean_capacity", stats.mean_capacity},
                               {"std_capacity", stats.std_capacity},
                               {"realizations", caps[n].size()},
                               {"failures", failures.size()}});
        }
        if (traj_csv) {
            detail::write_trajectory_rows(*traj_csv, rc, task, eps,
                                          task.washout + cfg.trajectory_steps);
        }
        if (cfg.dump_series && eps == eps_grid.front()) {
            TaskSpec seeded = task;
            seeded.seed = derive_seed(rc.seed, 0, Stream::Inputs);
            const std::vector<double> inputs = generate_inputs(seeded);
            write_series_csv(tracker.path("series.csv"), inputs, target_series(seeded, inputs));
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cerr << "[lskin] " << mode_name(cfg.mode) << " eps=" << eps << " took " << secs << " s ("
                  << rc.realizations << " realizations)\n";
    }
    manifest["summary"] = summary;
}

inline void run_disorder_compare(const ExperimentConfig& cfg, detail::ArtifactTracker& tracker,
                                 nlohmann::json& manifest) {
    const ReservoirConfig base = cfg.reservoir_config();

    CsvWriter cmp_csv(tracker.path("compare.csv"));
    cmp_csv.comment(std::string("lskin-qrc v") + kVersion + " disorder-compare v1");
    cmp_csv.header({"variant", "tau", "realizations", "mean_capacity", "std_capacity"});
    CsvWriter real_csv(tracker.path("realizations.csv"));
    real_csv.comment(std::string("lskin-qrc v") + kVersion + " disorder-compare realizations v1");
    real_csv.header({"variant", "tau", "realization", "capacity"});
    CsvWriter pat_csv(tracker.path("patterns.csv"));
    pat_csv.comment(std::string("lskin-qrc v") + kVersion + " density-matrix patterns v1");
    pat_csv.comment("value = log10|Re rho_ij| for i >= j, log10|Im rho_ij| for i < j");
    pat_csv.header({"variant", "i", "j", "value"});

    nlohmann::json summary = nlohmann::json::array();
    for (const auto& variant : cfg.variants) {
        ReservoirConfig rc = base;
        detail::apply_variant(rc, variant);
        rc.validate();
        const BasisPtr basis = enumerate_sector(rc.network.sites, rc.bosons);
        const auto t0 = std::chrono::steady_clock::now();

        // One evolution per realization serves every delay in the grid.
        // Indexed slots keep CSV bytes independent of thread scheduling.
        struct Slot {
            bool ok{false};
            std::vector<double> capacities;
            std::string error;
        };
        std::vector<Slot> slots(static_cast<std::size_t>(rc.realizations));
        parallel_for(rc.realizations, cfg.jobs, [&](int r) {
            auto& slot = slots[static_cast<std::size_t>(r)];
            const auto r0 = std::chrono::steady_clock::now();
            TaskSpec probe = cfg.task_spec();
            probe.tau = cfg.tau_grid.empty() ? cfg.tau : *std::max_element(cfg.tau_grid.begin(),
                                                                           cfg.tau_grid.end());
            try {
                const RealizationData data =
                    realize_features(rc, probe, static_cast<std::uint64_t>(r), basis);
                slot.capacities.resize(cfg.tau_grid.size());
                for (std::size_t t = 0; t < cfg.tau_grid.size(); ++t) {
                    TaskSpec task = cfg.task_spec();
                    task.tau = cfg.tau_grid[t];
                    slot.capacities[t] = evaluate_realization(data, task, rc, rc.samples,
                                                              static_cast<std::uint64_t>(r));
                }
                slot.ok = true;
            } catch (const std::exception& ex) {
                slot.error = ex.what();
            }
            const double rsecs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - r0).count();
            std::fprintf(stderr, "[lskin] %s realization %d/%d took %.2f s\n", variant.name.c_str(),
                         r + 1, rc.realizations, rsecs);
        });

        std::vector<std::vector<double>> caps(cfg.tau_grid.size());
        for (int r = 0; r < rc.realizations; ++r) {
            const auto& slot = slots[static_cast<std::size_t>(r)];
            if (!slot.ok) {
                std::cerr << "[lskin] disorder-compare " << variant.name << " realization " << r
                          << ": " << slot.error << "\n";
                continue;
            }
            for (std::size_t t = 0; t < cfg.tau_grid.size(); ++t) {
                caps[t].push_back(slot.capacities[t]);
                real_csv.row(variant.name, cfg.tau_grid[t], r, slot.capacities[t]);
            }
        }

        for (std::size_t t = 0; t < cfg.tau_grid.size(); ++t) {
            RunResult stats;
            stats.capacities = caps[t];
            finalize_statistics(stats);
            cmp_csv.row(variant.name, cfg.tau_grid[t], static_cast<int>(caps[t].size()),
                        stats.mean_capacity, stats.std_capacity);
            summary.push_back({{"variant", variant.name},
                               {"tau", cfg.tau_grid[t]},
                               {"mean_capacity", stats.mean_capacity},
                               {"std_capacity", stats.std_capacity}});
        }

        // Density-matrix magnitude pattern after pattern_steps inputs
        // (realization 0, shared inputs across variants).
        {
            const NetworkSpec net = realize_network(rc, 0);
            Rng input_rng(derive_seed(rc.seed, 0, Stream::Inputs));
            std::vector<double> inputs(static_cast<std::size_t>(cfg.pattern_steps));
            for (auto& s : inputs) {
                s = cfg.task_kind == TaskKind::Xor ? static_cast<double>(input_rng.coin())
                                                   : input_rng.uniform();
            }
            Rng init_rng(derive_seed(rc.seed, 0, Stream::InitialState));
            const DensityMatrix initial = random_pure_state(basis, init_rng);
            StepEvolver evolver(net, rc.dissipator, basis, rc.dt);
            Vector v = vec(initial.rho);
            for (double s : inputs) evolver.step(s, v);
            const Matrix rho = unvec(v, basis->size());
            for (int i = 0; i < basis->size(); ++i) {
                for (int j = 0; j < basis->size(); ++j) {
                    const double mag = i >= j ? std::abs(rho(i, j).real()) : std::abs(rho(i, j).imag());
                    pat_csv.row(variant.name, i + 1, j + 1, std::log10(std::max(mag, 1e-300)));
                }
            }
        }

        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cerr << "[lskin] disorder-compare variant=" << variant.name << " took " << secs << " s\n";
    }
    manifest["summary"] = summary;
}

// ------------------------------- dispatcher ----------------------------------

inline RunArtifacts run_mode(const ExperimentConfig& cfg) {
    detail::ArtifactTracker tracker(cfg.out);
    const auto t0 = std::chrono::steady_clock::now();

    RunArtifacts artifacts;
    nlohmann::json& manifest = artifacts.manifest;
    manifest["mode"] = mode_name(cfg.mode);
    manifest["version"] = kVersion;
    manifest["config"] = to_json(cfg);

    try {
        switch (cfg.mode) {
            case Mode::SteadyProfile: run_steady_profile(cfg, tracker, manifest); break;
            case Mode::Spectrum: run_spectrum(cfg, tracker, manifest); break;
            case Mode::Esp: run_esp(cfg, tracker, manifest); break;
            case Mode::RunTask: run_sweep(cfg, tracker, manifest, {cfg.network.epsilon}); break;
            case Mode::SweepEps: run_sweep(cfg, tracker, manifest, cfg.eps_grid); break;
            case Mode::SweepNoise: run_sweep(cfg, tracker, manifest, {cfg.network.epsilon}); break;
            case Mode::DisorderCompare: run_disorder_compare(cfg, tracker, manifest); break;
        }
    } catch (...) {
        tracker.discard_all();
        throw;
    }

    manifest["wall_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest["files"] = tracker.files();

    const std::string manifest_path = tracker.path("manifest.json");
    std::ofstream out(manifest_path);
    if (!out) throw std::runtime_error("cannot write manifest " + manifest_path);
    out << manifest.dump(2) << "\n";

    artifacts.files = tracker.files();
    return artifacts;
}

}  // namespace lskin
