// Command line front end. Subcommands: run, summarize, plot.

#include <CLI11.hpp>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "releap/releap.hpp"

int main(int argc, char** argv) {
    CLI::App app{"releap: adaptive label-correction experiments"};
    app.require_subcommand(1);

    std::string config_path, mode, strategies, out_dir, reward_mode, in_dir;
    long long runs = 0;
    unsigned long long seed = 0;
    bool no_mirror = false, verbose = false;

    auto* run = app.add_subcommand("run", "run an experiment and export csv results");
    run->add_option("--config", config_path, "experiment config file (key = value lines)")
        ->required();
    auto* mode_opt = run->add_option("--mode", mode, "override mode: logistic|survival");
    auto* strat_opt =
        run->add_option("--strategies", strategies, "override comma-separated strategy list");
    auto* runs_opt = run->add_option("--runs", runs, "override replication count");
    auto* seed_opt = run->add_option("--seed", seed, "override master seed");
    auto* out_opt = run->add_option("--out", out_dir, "override output directory");
    run->add_flag("--no-mirror", no_mirror, "disable mirrored validation labeling");
    auto* reward_opt =
        run->add_option("--reward-mode", reward_mode, "override reward mode: shaped|lookahead");
    run->add_flag("--verbose", verbose, "log per-replication progress to stderr");

    auto* summarize = app.add_subcommand("summarize", "recompute summary.csv from runs.csv");
    summarize->add_option("--in", in_dir, "results directory containing runs.csv")->required();

    auto* plot = app.add_subcommand("plot", "render svg charts from summary.csv");
    plot->add_option("--in", in_dir, "results directory containing summary.csv")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(run)) {
            releap::ExperimentConfig cfg = releap::load_config(config_path);
            // guard on count(), not emptiness: --strategies '' should fail
            // loudly, not silently fall back to the config value
            if (mode_opt->count()) releap::apply_config_key(cfg, "mode", mode);
            if (strat_opt->count()) releap::apply_config_key(cfg, "strategies", strategies);
            if (runs_opt->count()) releap::apply_config_key(cfg, "n_replications", std::to_string(runs));
            if (seed_opt->count()) releap::apply_config_key(cfg, "master_seed", std::to_string(seed));
            if (out_opt->count()) releap::apply_config_key(cfg, "output_dir", out_dir);
            if (no_mirror) releap::apply_config_key(cfg, "mirror_validation", "false");
            if (reward_opt->count()) releap::apply_config_key(cfg, "reward_mode", reward_mode);
            cfg.validate();

            const releap::ExperimentResults results =
                releap::run_experiment(cfg, verbose, &std::cerr);
            const std::vector<releap::SummaryRow> rows =
                releap::summarize(results, cfg.strategies);
            releap::export_experiment(cfg, results, rows);
            std::cout << "wrote results to " << cfg.output_dir << "\n";
            if (results.n_failures > 0) {
                std::cerr << "error: " << results.n_failures
                          << " episode(s) failed; completed rows are in runs.csv\n";
                return 1;
            }
        } else if (app.got_subcommand(summarize)) {
            const std::vector<releap::SummaryRow> rows =
                releap::summarize_runs_csv(in_dir + "/runs.csv");
            releap::write_summary_csv(rows, in_dir + "/summary.csv");
            std::cout << "wrote " << in_dir << "/summary.csv\n";
        } else {
            const std::vector<releap::SummaryRow> rows =
                releap::read_summary_csv(in_dir + "/summary.csv");
            for (const std::string& path : releap::emit_plots(rows, in_dir))
                std::cout << "wrote " << path << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
