#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <filesystem>

#include "courier/dqn.hpp"
#include "courier/experiments.hpp"
#include "courier/util.hpp"

using namespace courier;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) {
        path = fs::temp_directory_path() / ("courier_test_" + name);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str(const std::string& child = "") const {
        return child.empty() ? path.string() : (path / child).string();
    }
};

ScenarioConfig smoke_scenario(const std::string& out_dir) {
    ScenarioConfig cfg;
    cfg.episode.horizon = 25;
    cfg.episode.schedule.n_couriers = 6;
    cfg.episode.schedule.shift_length = 10;
    cfg.agent.episodes = 3;
    cfg.agent.batch_size = 16;
    cfg.agent.replay_capacity = 32;
    cfg.agent.hidden_layers = {12, 12};
    cfg.seed = 314;
    cfg.runs = 2;
    cfg.episodes_per_run = 2;
    cfg.out_dir = out_dir;
    return cfg;
}

}  // namespace

TEST_CASE("scenario config json round trip") {
    ScenarioConfig cfg = smoke_scenario("x");
    cfg.episode.arrivals.request_rate = 2.5;
    cfg.agent.gamma = 0.6;
    const auto restored = ScenarioConfig::from_json_string(cfg.to_json_string());
    CHECK(restored.episode.arrivals.request_rate == 2.5);
    CHECK(restored.agent.gamma == 0.6);
    CHECK(restored.seed == cfg.seed);
    CHECK(config_hash(restored) == config_hash(cfg));
}

TEST_CASE("invalid configs name the offending field") {
    CHECK_THROWS_WITH_AS(
        ScenarioConfig::from_json_string("{\"agent\": {\"gamma\": 0.0}}"),
        doctest::Contains("agent.gamma"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(
        ScenarioConfig::from_json_string(
            "{\"episode\": {\"extension\": {\"accept_prob\": 1.5}}}"),
        doctest::Contains("accept_prob"), std::invalid_argument);
    CHECK_THROWS_AS(ScenarioConfig::from_json_string("{nope"), std::invalid_argument);
}

TEST_CASE("train command writes reproducible artifacts") {
    TempDir dir_a("train_a"), dir_b("train_b");

    TrainOptions opts;
    opts.scenario = smoke_scenario(dir_a.str());
    opts.trace_path = dir_a.str("trace.csv");
    REQUIRE(run_train(opts) == kExitOk);

    CHECK(fs::exists(dir_a.str("training.csv")));
    CHECK(fs::exists(dir_a.str("checkpoint.json")));
    CHECK(fs::exists(dir_a.str("manifest.json")));
    CHECK(fs::exists(dir_a.str("trace.csv")));

    const auto csv = read_text_file(dir_a.str("training.csv"));
    // Header plus one row per episode.
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

    const auto ckpt = load_checkpoint(dir_a.str("checkpoint.json"));
    CHECK(ckpt.fingerprint ==
          network_fingerprint(opts.scenario.episode.extension.max_notified));

    // Rerunning from the manifest reproduces the CSV byte for byte.
    TrainOptions rerun;
    rerun.scenario = ScenarioConfig::load(dir_a.str("manifest.json"));
    rerun.scenario.out_dir = dir_b.str();
    REQUIRE(run_train(rerun) == kExitOk);
    CHECK(read_text_file(dir_b.str("training.csv")) == csv);
}

TEST_CASE("compare command emits aligned per-run rows and a summary") {
    TempDir dir("compare");
    TrainOptions topts;
    topts.scenario = smoke_scenario(dir.str());
    REQUIRE(run_train(topts) == kExitOk);

    CompareOptions copts;
    copts.scenario = smoke_scenario(dir.str());
    copts.checkpoint_path = dir.str("checkpoint.json");
    copts.trace_path = dir.str("episode_trace.csv");
    REQUIRE(run_compare(copts) == kExitOk);

    const auto csv = read_text_file(dir.str("comparison.csv"));
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 2);
    CHECK(csv.find("extension_dqn") != std::string::npos);
    CHECK(csv.find("no_extension") != std::string::npos);
    CHECK(fs::exists(dir.str("summary.json")));

    // A corrupted checkpoint fingerprint is a config error.
    auto ckpt = load_checkpoint(dir.str("checkpoint.json"));
    ckpt.fingerprint = "0000000000000000";
    save_checkpoint(dir.str("bad.json"), ckpt);
    copts.checkpoint_path = dir.str("bad.json");
    copts.trace_path.clear();
    CHECK(run_compare(copts) == kExitConfigError);
}

TEST_CASE("replay validates trace totals") {
    TempDir dir("replay");
    TrainOptions topts;
    topts.scenario = smoke_scenario(dir.str());
    topts.trace_path = dir.str("trace.csv");
    REQUIRE(run_train(topts) == kExitOk);

    ReplayOptions ropts;
    ropts.trace_path = dir.str("trace.csv");
    ropts.csv_out = dir.str("replayed.csv");
    CHECK(run_replay(ropts) == kExitOk);
    CHECK(fs::exists(dir.str("replayed.csv")));

    // Corrupt one reward cell: replay must fail and name the row.
    auto text = read_text_file(dir.str("trace.csv"));
    const auto pos = text.find("\n0,");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 3, "\n0,999999");
    write_text_file(dir.str("bad_trace.csv"), text);
    ropts.trace_path = dir.str("bad_trace.csv");
    ropts.csv_out.clear();
    CHECK(run_replay(ropts) == kExitRuntimeError);

    // Empty trace: header only, zero total.
    write_text_file(dir.str("empty.csv"),
                    "# trace:v1\n# episode_reward=0\nepoch,revenue,wage_cost,"
                    "committed_distance_cost,occasional_fixed_cost,"
                    "occasional_distance_cost,lost_penalty,extension_pay,reward\n");
    ropts.trace_path = dir.str("empty.csv");
    CHECK(run_replay(ropts) == kExitOk);
}

TEST_CASE("periodic checkpoints and arrival traces") {
    TempDir dir("extras");
    TrainOptions topts;
    topts.scenario = smoke_scenario(dir.str());
    topts.checkpoint_every = 1;
    REQUIRE(run_train(topts) == kExitOk);
    CHECK(fs::exists(dir.str("checkpoint_ep1.json")));
    CHECK(fs::exists(dir.str("checkpoint_ep3.json")));
    const auto periodic = load_checkpoint(dir.str("checkpoint_ep2.json"));
    CHECK(periodic.trained_episodes == 2);

    ArrivalsOptions aopts;
    aopts.scenario = smoke_scenario(dir.str());
    aopts.out_path = dir.str("arrivals.csv");
    REQUIRE(run_arrivals(aopts) == kExitOk);
    const auto csv = read_text_file(dir.str("arrivals.csv"));
    CHECK(csv.find("request") != std::string::npos);
    CHECK(csv.find("occasional") != std::string::npos);
    // Initial batch: configured counts arrive at epoch 0.
    CHECK(csv.find("0,request,0,") != std::string::npos);

    // Deterministic per seed.
    ArrivalsOptions again = aopts;
    again.out_path = dir.str("arrivals2.csv");
    REQUIRE(run_arrivals(again) == kExitOk);
    CHECK(read_text_file(again.out_path) == csv);
}

TEST_CASE("sensitivity command evaluates every cell") {
    TempDir dir("sens");
    TrainOptions topts;
    topts.scenario = smoke_scenario(dir.str());
    REQUIRE(run_train(topts) == kExitOk);

    SensitivityOptions sopts;
    sopts.scenario = smoke_scenario(dir.str());
    sopts.grid = SensitivityGrid::RequestRate;
    sopts.checkpoint_path = dir.str("checkpoint.json");
    REQUIRE(run_sensitivity(sopts) == kExitOk);

    const auto csv = read_text_file(dir.str("sensitivity.csv"));
    // Header plus 3 cells x 2 runs.
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 3 * 2);
    for (const char* cell : {"low", "normal", "high"})
        CHECK(csv.find(cell) != std::string::npos);
    CHECK(fs::exists(dir.str("sensitivity_summary.json")));
}
