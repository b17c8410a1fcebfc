#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "courier/config.hpp"

namespace courier {

// Process exit codes shared by every subcommand.
constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitRuntimeError = 2;

struct ScenarioConfig {
    EpisodeConfig episode;
    AgentConfig agent;
    std::uint64_t seed = 1;
    int runs = 30;
    int episodes_per_run = 1000;
    std::string out_dir = "out";

    std::string to_json_string() const;
    static ScenarioConfig from_json_string(const std::string& text);
    // Loads either a scenario config or a manifest written by a previous run.
    static ScenarioConfig load(const std::string& path);
};

struct TrainOptions {
    ScenarioConfig scenario;
    std::optional<int> episodes_override;
    std::string trace_path;    // optional: per-epoch trace of a greedy episode after training
    int checkpoint_every = 0;  // also write checkpoint_ep<N>.json every N episodes
};

struct CompareOptions {
    ScenarioConfig scenario;
    std::string checkpoint_path;
    std::string trace_path;  // optional: trace of the first evaluated episode
};

enum class SensitivityGrid { RequestRate, OccasionalRate, Compensation };

struct SensitivityOptions {
    ScenarioConfig scenario;
    SensitivityGrid grid = SensitivityGrid::RequestRate;
    std::string checkpoint_path;  // required unless retrain is set
    bool retrain = false;         // compensation cells always retrain
    std::optional<int> train_episodes;  // episodes for per-cell retraining
};

struct ReplayOptions {
    std::string trace_path;
    std::string csv_out;  // optional re-export
};

struct ArrivalsOptions {
    ScenarioConfig scenario;
    std::string out_path;
};

int run_train(const TrainOptions& opts);
int run_compare(const CompareOptions& opts);
int run_sensitivity(const SensitivityOptions& opts);
int run_replay(const ReplayOptions& opts);
// Dumps one episode's exogenous arrival streams (requests and occasional
// couriers) to CSV for debugging.
int run_arrivals(const ArrivalsOptions& opts);

// Canonical config hash recorded in manifests and output headers.
std::string config_hash(const ScenarioConfig& cfg);

SensitivityGrid parse_grid(const std::string& name);  // throws on unknown name

}  // namespace courier
