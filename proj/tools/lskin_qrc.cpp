// lskin-qrc — run figure-level experiments from a config file.
//
// Usage: lskin-qrc <mode> --config <path> [--jobs N] [--seed S] [--out DIR]
// Progress goes to stderr; stdout carries one machine-parseable JSON line.

#include "lskin/experiments.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"lskin-qrc: dissipative bosonic-network reservoir simulator"};
    app.require_subcommand(1);

    struct Options {
        std::string config_path;
        std::optional<int> jobs;
        std::optional<std::uint64_t> seed;
        std::optional<std::string> out;
    };

    std::vector<std::pair<lskin::Mode, CLI::App*>> subcommands;
    std::map<const CLI::App*, Options> options;
    for (lskin::Mode mode :
         {lskin::Mode::SteadyProfile, lskin::Mode::Spectrum, lskin::Mode::Esp, lskin::Mode::RunTask,
          lskin::Mode::SweepEps, lskin::Mode::SweepNoise, lskin::Mode::DisorderCompare}) {
        CLI::App* sub = app.add_subcommand(lskin::mode_name(mode), "");
        auto& opt = options[sub];
        sub->add_option("--config", opt.config_path, "experiment config file (JSON)")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--jobs", opt.jobs, "worker thread count");
        sub->add_option("--seed", opt.seed, "master seed override");
        sub->add_option("--out", opt.out, "output directory override");
        subcommands.emplace_back(mode, sub);
    }

    CLI11_PARSE(app, argc, argv);

    for (const auto& [mode, sub] : subcommands) {
        if (!sub->parsed()) continue;
        const Options& opt = options[sub];
        try {
            lskin::ExperimentConfig cfg = lskin::load_config(opt.config_path);
            cfg.mode = mode;  // the subcommand is authoritative
            if (opt.jobs) cfg.jobs = *opt.jobs;
            if (opt.seed) cfg.seed = *opt.seed;
            if (opt.out) cfg.out = *opt.out;

            const lskin::RunArtifacts artifacts = lskin::run_mode(cfg);

            nlohmann::json status{{"status", "ok"},
                                  {"mode", lskin::mode_name(mode)},
                                  {"out", cfg.out},
                                  {"files", artifacts.files}};
            std::cout << status.dump() << "\n";
            return 0;
        } catch (const lskin::ConfigError& ex) {
            std::cerr << "lskin-qrc: " << ex.what() << "\n";
            return 2;
        } catch (const std::exception& ex) {
            std::cerr << "lskin-qrc: " << ex.what() << "\n";
            return 1;
        }
    }
    return 1;
}
