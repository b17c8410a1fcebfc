// Command-line front end for the courier shift-extension simulator: trains a
// DQN dispatch policy, compares it with the no-extension baseline, runs
// sensitivity grids, and replays episode traces.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "courier/experiments.hpp"

namespace {

// Shared --config/--seed/--runs/... handling; flags override file values.
struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> runs;
    std::optional<int> episodes_per_run;
    std::string out_dir;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path,
                        "Scenario config JSON (or a manifest.json from a previous run)");
        cmd->add_option("--seed", seed, "Master seed override");
        cmd->add_option("--runs", runs, "Number of evaluation replications");
        cmd->add_option("--episodes-per-run", episodes_per_run,
                        "Episodes per evaluation replication");
        cmd->add_option("--out", out_dir, "Output directory");
    }

    courier::ScenarioConfig resolve() const {
        courier::ScenarioConfig cfg;
        if (!config_path.empty()) cfg = courier::ScenarioConfig::load(config_path);
        if (seed) cfg.seed = *seed;
        if (runs) cfg.runs = *runs;
        if (episodes_per_run) cfg.episodes_per_run = *episodes_per_run;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        return cfg;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Crowdsourced courier shift-extension simulator and DQN trainer"};
    app.require_subcommand(1);

    CommonArgs train_args;
    std::optional<int> train_episodes;
    std::string train_trace;
    int train_checkpoint_every = 0;
    auto* train_cmd = app.add_subcommand("train", "Train a DQN policy");
    train_args.attach(train_cmd);
    train_cmd->add_option("--episodes", train_episodes, "Training episodes override");
    train_cmd->add_option("--trace", train_trace,
                          "Write a greedy-policy episode trace after training");
    train_cmd->add_option("--checkpoint-every", train_checkpoint_every,
                          "Also write a checkpoint every N episodes");

    CommonArgs compare_args;
    std::string compare_checkpoint;
    std::string compare_trace;
    auto* compare_cmd = app.add_subcommand(
        "compare", "Evaluate a trained policy against the no-extension baseline");
    compare_args.attach(compare_cmd);
    compare_cmd->add_option("--checkpoint", compare_checkpoint, "Trained checkpoint")
        ->required();
    compare_cmd->add_option("--trace", compare_trace,
                            "Write the first evaluated episode as a trace");

    CommonArgs sens_args;
    std::string sens_grid;
    std::string sens_checkpoint;
    bool sens_retrain = false;
    std::optional<int> sens_train_episodes;
    auto* sens_cmd = app.add_subcommand("sensitivity", "Run a sensitivity grid");
    sens_args.attach(sens_cmd);
    sens_cmd->add_option("--grid", sens_grid,
                         "request-rate, occasional-rate or compensation")
        ->required();
    sens_cmd->add_option("--checkpoint", sens_checkpoint,
                         "Checkpoint evaluated in every cell (unless retraining)");
    sens_cmd->add_flag("--retrain", sens_retrain, "Retrain per cell");
    sens_cmd->add_option("--episodes", sens_train_episodes,
                         "Training episodes per retrained cell");

    std::string replay_trace;
    std::string replay_csv;
    auto* replay_cmd =
        app.add_subcommand("replay", "Replay a trace file's reward breakdown");
    replay_cmd->add_option("trace", replay_trace, "Trace CSV file")->required();
    replay_cmd->add_option("--csv", replay_csv, "Re-export data rows to this path");

    CommonArgs arrivals_args;
    std::string arrivals_out = "arrivals.csv";
    auto* arrivals_cmd = app.add_subcommand(
        "arrivals", "Export one episode's arrival streams to CSV");
    arrivals_args.attach(arrivals_cmd);
    arrivals_cmd->add_option("--file", arrivals_out, "Output CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train_cmd->parsed()) {
            courier::TrainOptions opts;
            opts.scenario = train_args.resolve();
            opts.episodes_override = train_episodes;
            opts.trace_path = train_trace;
            opts.checkpoint_every = train_checkpoint_every;
            return courier::run_train(opts);
        }
        if (compare_cmd->parsed()) {
            courier::CompareOptions opts;
            opts.scenario = compare_args.resolve();
            opts.checkpoint_path = compare_checkpoint;
            opts.trace_path = compare_trace;
            return courier::run_compare(opts);
        }
        if (sens_cmd->parsed()) {
            courier::SensitivityOptions opts;
            opts.scenario = sens_args.resolve();
            opts.grid = courier::parse_grid(sens_grid);
            opts.checkpoint_path = sens_checkpoint;
            opts.retrain = sens_retrain;
            opts.train_episodes = sens_train_episodes;
            if (!opts.retrain && opts.grid != courier::SensitivityGrid::Compensation &&
                opts.checkpoint_path.empty()) {
                std::cerr << "config error: --checkpoint is required unless --retrain "
                             "is set\n";
                return courier::kExitConfigError;
            }
            return courier::run_sensitivity(opts);
        }
        if (replay_cmd->parsed()) {
            courier::ReplayOptions opts;
            opts.trace_path = replay_trace;
            opts.csv_out = replay_csv;
            return courier::run_replay(opts);
        }
        if (arrivals_cmd->parsed()) {
            courier::ArrivalsOptions opts;
            opts.scenario = arrivals_args.resolve();
            opts.out_path = arrivals_out;
            return courier::run_arrivals(opts);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return courier::kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return courier::kExitRuntimeError;
    }
    return courier::kExitOk;
}
