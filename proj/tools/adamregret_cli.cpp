// Command-line front end: run, race, fuzz and replay.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adamregret/commands.hpp"
#include "adamregret/errors.hpp"

namespace ar = adamregret;

int main(int argc, char** argv) {
    CLI::App app{"ADAM optimizer with empirical regret-bound and moment-ratio checks"};
    app.require_subcommand(1);

    std::string out_dir = "out";
    std::optional<std::uint64_t> seed_override;

    auto* run = app.add_subcommand("run", "run ADAM on a problem and evaluate the regret bound");
    std::string run_config;
    run->add_option("--config", run_config, "run config file")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--seed", seed_override, "override the config seed");

    auto* race = app.add_subcommand("race", "training curves of several optimizers on one problem");
    std::vector<std::string> race_configs;
    race->add_option("--config", race_configs, "run config file (repeat for each member)")->required();
    race->add_option("--out", out_dir, "output directory");
    race->add_option("--seed", seed_override, "override every member's seed");

    auto* fuzz = app.add_subcommand("fuzz", "randomized search for moment-ratio inequality violations");
    ar::FuzzOptions fopts;
    std::string grid_path;
    std::vector<std::string> inject;
    fuzz->add_option("--trials", fopts.trials, "number of generated trials");
    fuzz->add_option("--tmax", fopts.T_max, "maximum sequence length");
    fuzz->add_option("--d", fopts.d, "coordinates per sequence");
    fuzz->add_option("--seed", fopts.seed, "base seed");
    fuzz->add_option("--grid", grid_path, "grid file with beta1/beta2/lambda lists");
    fuzz->add_option("--inject", inject, "counterexample file to screen after the trials");
    fuzz->add_option("--max-counterexamples", fopts.max_counterexamples,
                     "cap on serialized counterexample files");
    fuzz->add_option("--out", out_dir, "output directory");

    auto* replay = app.add_subcommand("replay", "re-evaluate a serialized counterexample");
    std::string replay_file;
    replay->add_option("--file", replay_file, "counterexample file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // usage errors share the config-error exit code
        return app.exit(e) == 0 ? 0 : static_cast<int>(ar::ExitCode::config_error);
    }

    try {
        if (run->parsed()) {
            ar::RunConfig cfg = ar::load_run_config(run_config);
            if (seed_override) cfg.seed = *seed_override;
            return static_cast<int>(ar::cmd_run(cfg, out_dir, std::cerr));
        }
        if (race->parsed()) {
            std::vector<ar::RunConfig> cfgs;
            for (const auto& path : race_configs) {
                cfgs.push_back(ar::load_run_config(path));
                if (seed_override) cfgs.back().seed = *seed_override;
            }
            return static_cast<int>(ar::cmd_race(cfgs, out_dir, std::cerr));
        }
        if (fuzz->parsed()) {
            if (!grid_path.empty()) fopts.grid_path = grid_path;
            for (const auto& p : inject) fopts.inject.emplace_back(p);
            return static_cast<int>(ar::cmd_fuzz(fopts, out_dir, std::cerr));
        }
        if (replay->parsed()) {
            return static_cast<int>(ar::cmd_replay(replay_file, std::cout, std::cerr));
        }
    } catch (const ar::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(ar::ExitCode::config_error);
    }
    return static_cast<int>(ar::ExitCode::config_error);
}
