// optbench <experiment> --config <path> [overrides]
//
// Exit codes: 0 success, 2 configuration or parameter error, 3 numerical failure, 1 anything else.

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "optbench/errors.hpp"
#include "optbench/experiments/commands.hpp"
#include "optbench/experiments/config.hpp"

namespace ex = optbench::experiments;

int main(int argc, char** argv) {
    CLI::App app{"Continuized Nesterov benchmark harness"};
    std::string experiment;
    std::string config_path;
    std::optional<std::size_t> n, trials, threads;
    std::optional<std::uint64_t> seed;
    std::optional<double> C, alpha;
    std::optional<std::string> out_dir, preset;

    std::string names;
    for (const auto& [name, _] : ex::kExperimentNames) names += (names.empty() ? "" : ", ") + std::string(name);
    app.add_option("experiment", experiment, "one of: " + names)->required();
    app.add_option("--config", config_path, "key = value config file");
    app.add_option("--n", n, "horizon");
    app.add_option("--trials", trials, "Monte Carlo trials or runs");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--C", C, "membership constant");
    app.add_option("--alpha", alpha, "rate alpha (default n^(-1/7))");
    app.add_option("--out-dir", out_dir, "output directory");
    app.add_option("--preset", preset, "desk or paper")->check(CLI::IsMember({"desk", "paper"}));
    app.add_option("--threads", threads, "worker threads (0: all cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        ex::ExperimentConfig cfg;
        const ex::Experiment which = ex::parse_experiment(experiment);
        if (!config_path.empty()) {
            const ex::KeyValues kv = ex::read_config_file(config_path);
            ex::apply_config(cfg, kv);
            if (cfg.experiment && *cfg.experiment != which)
                throw optbench::ConfigError("key 'experiment': config names '" +
                                            std::string(ex::to_string(*cfg.experiment)) + "' but command line asks for '" +
                                            experiment + "'");
        }
        cfg.experiment = which;
        if (preset) cfg.preset = *preset == "paper" ? ex::Preset::paper : ex::Preset::desk;
        if (n) cfg.n = *n;
        if (trials) cfg.trials = *trials;
        if (seed) cfg.seed = *seed;
        if (C) cfg.C = *C;
        if (alpha) cfg.alpha = *alpha;
        if (out_dir) cfg.out_dir = *out_dir;
        if (threads) cfg.threads = *threads;

        const ex::CommandResult res = ex::dispatch(which, cfg);
        for (const auto& [k, v] : res.summary) fmt::print("{} = {}\n", k, v);
        for (const auto& f : res.files) fmt::print("wrote {}\n", f.string());
        return 0;
    } catch (const optbench::ConfigError& e) {
        fmt::print(stderr, "config error: {}\n", e.what());
        return 2;
    } catch (const optbench::NumericalFailure& e) {
        fmt::print(stderr, "numerical failure: {}\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        fmt::print(stderr, "invalid parameter: {}\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
}
