#include "courier/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "courier/dqn.hpp"
#include "courier/environment.hpp"
#include "courier/policies.hpp"
#include "courier/rng.hpp"
#include "courier/util.hpp"

namespace courier {

namespace fs = std::filesystem;
using nlohmann::json;

std::string ScenarioConfig::to_json_string() const {
    json j;
    j["episode"] = json::parse(episode.to_json_string());
    j["agent"] = json::parse(agent.to_json_string());
    j["seed"] = seed;
    j["runs"] = runs;
    j["episodes_per_run"] = episodes_per_run;
    j["out_dir"] = out_dir;
    return j.dump(2);
}

ScenarioConfig ScenarioConfig::from_json_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    ScenarioConfig cfg;
    if (j.contains("episode")) cfg.episode = EpisodeConfig::from_json_string(j.at("episode").dump());
    if (j.contains("agent")) cfg.agent = AgentConfig::from_json_string(j.at("agent").dump());
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("runs")) cfg.runs = j.at("runs").get<int>();
    if (j.contains("episodes_per_run")) cfg.episodes_per_run = j.at("episodes_per_run").get<int>();
    if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
    if (cfg.runs < 1) throw std::invalid_argument("runs must be >= 1");
    if (cfg.episodes_per_run < 1) throw std::invalid_argument("episodes_per_run must be >= 1");
    cfg.episode.validate();
    cfg.agent.validate();
    return cfg;
}

ScenarioConfig ScenarioConfig::load(const std::string& path) {
    const std::string text = read_text_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(path + " is not valid JSON: " + e.what());
    }
    // Manifests embed the fully resolved scenario; reusing one reruns the
    // original command bit-for-bit.
    if (j.contains("scenario")) return from_json_string(j.at("scenario").dump());
    return from_json_string(text);
}

std::string config_hash(const ScenarioConfig& cfg) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(cfg.to_json_string())));
    return buf;
}

SensitivityGrid parse_grid(const std::string& name) {
    if (name == "request-rate") return SensitivityGrid::RequestRate;
    if (name == "occasional-rate") return SensitivityGrid::OccasionalRate;
    if (name == "compensation") return SensitivityGrid::Compensation;
    throw std::invalid_argument(
        "unknown grid '" + name +
        "' (expected request-rate, occasional-rate or compensation)");
}

namespace {

void write_manifest(const ScenarioConfig& cfg, const std::string& command,
                    const json& extra, const std::vector<std::string>& outputs) {
    json j;
    j["tool"] = "courier_sim";
    j["format_version"] = 1;
    j["command"] = command;
    j["config_hash"] = config_hash(cfg);
    j["scenario"] = json::parse(cfg.to_json_string());
    j["extra"] = extra;
    j["outputs"] = outputs;
    write_text_file((fs::path(cfg.out_dir) / "manifest.json").string(), j.dump(2) + "\n");
}

std::string metrics_header() {
    return "policy,run,seed,episodes,mean_episode_reward,mean_lost_count,"
           "mean_lost_cost,mean_extension_count,mean_extension_cost,"
           "mean_served_committed,mean_served_occasional,mean_arrivals,"
           "mean_arrivals_excl_initial";
}

std::string metrics_row(const std::string& policy, const RunMetrics& m) {
    return join_csv({policy, std::to_string(m.run_index), std::to_string(m.seed),
                     std::to_string(m.episodes), format_double(m.mean_episode_reward),
                     format_double(m.mean_lost_count), format_double(m.mean_lost_cost),
                     format_double(m.mean_extension_count),
                     format_double(m.mean_extension_cost),
                     format_double(m.mean_served_committed),
                     format_double(m.mean_served_occasional),
                     format_double(m.mean_arrivals),
                     format_double(m.mean_arrivals_excl_initial)});
}

json summary_json(const std::vector<RunMetrics>& runs) {
    const auto pull = [&](auto member) {
        std::vector<double> v;
        v.reserve(runs.size());
        for (const auto& m : runs) v.push_back(m.*member);
        return v;
    };
    const auto stat = [&](const MetricSummary& s) {
        return json{{"mean", s.mean},   {"median", s.median}, {"stddev", s.stddev},
                    {"q25", s.q25},     {"q75", s.q75},       {"min", s.min},
                    {"max", s.max}};
    };
    json out;
    out["runs"] = runs.size();
    out["total_reward"] = stat(summarize(pull(&RunMetrics::mean_episode_reward)));
    out["lost_count"] = stat(summarize(pull(&RunMetrics::mean_lost_count)));
    out["lost_cost"] = stat(summarize(pull(&RunMetrics::mean_lost_cost)));
    out["extension_count"] = stat(summarize(pull(&RunMetrics::mean_extension_count)));
    out["extension_cost"] = stat(summarize(pull(&RunMetrics::mean_extension_cost)));
    out["served_committed"] = stat(summarize(pull(&RunMetrics::mean_served_committed)));
    out["served_occasional"] = stat(summarize(pull(&RunMetrics::mean_served_occasional)));
    const double arrivals = summarize(pull(&RunMetrics::mean_arrivals)).mean;
    const double arrivals_excl =
        summarize(pull(&RunMetrics::mean_arrivals_excl_initial)).mean;
    const double lost = summarize(pull(&RunMetrics::mean_lost_count)).mean;
    out["mean_arrivals"] = arrivals;
    out["mean_arrivals_excl_initial"] = arrivals_excl;
    out["lost_fraction_of_arrivals"] = arrivals > 0 ? lost / arrivals : 0.0;
    out["lost_fraction_of_arrivals_excl_initial"] =
        arrivals_excl > 0 ? lost / arrivals_excl : 0.0;
    return out;
}

// Runs one greedy episode and writes the per-epoch reward decomposition.
void write_trace(const std::string& path, const EpisodeConfig& cfg, Policy& policy,
                 std::uint64_t episode_seed) {
    Environment env(cfg);
    env.reset(episode_seed);
    std::string rows;
    double total = 0.0;
    int n_rows = 0;
    while (!env.is_terminal()) {
        const SystemState s = env.state();  // step() invalidates the live snapshot
        const auto features = env.features();
        const auto outcome = env.step(policy.decide(features, s));
        const auto& d = outcome.diag;
        rows += join_csv({std::to_string(s.epoch), format_double(d.revenue),
                          format_double(d.wage_cost),
                          format_double(d.committed_distance_cost),
                          format_double(d.occasional_fixed_cost),
                          format_double(d.occasional_distance_cost),
                          format_double(d.lost_penalty),
                          format_double(d.extension_pay), format_double(outcome.reward),
                          std::to_string(s.present_requests.size()),
                          std::to_string(s.available_committed.size()),
                          std::to_string(s.present_occasional.size()),
                          std::to_string(s.on_shift_count),
                          std::to_string(d.notifications_sent),
                          std::to_string(d.extensions_accepted),
                          std::to_string(d.assignments_committed),
                          std::to_string(d.assignments_occasional),
                          std::to_string(d.lost_now)}) +
                "\n";
        total += outcome.reward;
        ++n_rows;
    }
    std::string text = "# trace:v1\n";
    text += "# episode_reward=" + format_double(total) + "\n";
    text += "# seed=" + std::to_string(episode_seed) + "\n";
    text += "# epochs=" + std::to_string(n_rows) + "\n";
    text +=
        "epoch,revenue,wage_cost,committed_distance_cost,occasional_fixed_cost,"
        "occasional_distance_cost,lost_penalty,extension_pay,reward,"
        "present_requests,available_committed,present_occasional,on_shift,"
        "notifications,extensions_accepted,assignments_committed,"
        "assignments_occasional,lost_now\n";
    text += rows;
    write_text_file(path, text);
}

int guard(const std::function<void()>& body) {
    try {
        body();
        return kExitOk;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntimeError;
    }
}

Checkpoint load_checked_checkpoint(const std::string& path, const EpisodeConfig& cfg) {
    Checkpoint ckpt = load_checkpoint(path);
    const std::string expected = network_fingerprint(cfg.extension.max_notified);
    if (ckpt.fingerprint != expected)
        throw std::invalid_argument("checkpoint fingerprint " + ckpt.fingerprint +
                                    " does not match this configuration's action "
                                    "catalog (" + expected + ")");
    return ckpt;
}

struct Cell {
    std::string label;
    EpisodeConfig episode;
    double request_rate;
    double occasional_rate;
    double extension_pay;
    double accept_prob;
};

std::vector<Cell> build_cells(SensitivityGrid grid, const EpisodeConfig& base) {
    std::vector<Cell> cells;
    const auto add = [&](const std::string& label, EpisodeConfig cfg) {
        cells.push_back({label, cfg, cfg.arrivals.request_rate,
                         cfg.arrivals.occasional_rate,
                         cfg.economics.extension_pay_per_period,
                         cfg.extension.accept_prob});
    };
    switch (grid) {
        case SensitivityGrid::RequestRate:
            for (auto [label, rate] : {std::pair{"low", 1.0}, {"normal", 2.0},
                                       {"high", 3.0}}) {
                EpisodeConfig cfg = base;
                cfg.arrivals.request_rate = rate;
                add(label, cfg);
            }
            break;
        case SensitivityGrid::OccasionalRate:
            for (auto [label, rate] : {std::pair{"low", 0.5}, {"normal", 1.0},
                                       {"high", 2.0}}) {
                EpisodeConfig cfg = base;
                cfg.arrivals.occasional_rate = rate;
                add(label, cfg);
            }
            break;
        case SensitivityGrid::Compensation:
            for (auto [label, pay, prob] :
                 {std::tuple{"low", 1.5, 0.5}, {"normal", 3.0, 0.7}, {"high", 6.0, 0.9}}) {
                EpisodeConfig cfg = base;
                cfg.economics.extension_pay_per_period = pay;
                cfg.extension.accept_prob = prob;
                add(label, cfg);
            }
            break;
    }
    return cells;
}

const char* grid_name(SensitivityGrid grid) {
    switch (grid) {
        case SensitivityGrid::RequestRate: return "request-rate";
        case SensitivityGrid::OccasionalRate: return "occasional-rate";
        case SensitivityGrid::Compensation: return "compensation";
    }
    return "?";
}

}  // namespace

int run_train(const TrainOptions& opts) {
    return guard([&] {
        ScenarioConfig cfg = opts.scenario;
        if (opts.episodes_override) cfg.agent.episodes = *opts.episodes_override;
        cfg.episode.validate();
        cfg.agent.validate();
        fs::create_directories(cfg.out_dir);

        const fs::path out(cfg.out_dir);
        const std::string fingerprint =
            network_fingerprint(cfg.episode.extension.max_notified);
        std::string csv =
            "episode,episode_reward,cumulative_avg_reward,mean_loss,epsilon\n";
        TrainResult result = train(
            cfg.episode, cfg.agent, cfg.seed,
            [&](const EpisodeStats& s, const MlpParams& net) {
                csv += join_csv({std::to_string(s.episode), format_double(s.reward),
                                 format_double(s.cumulative_avg_reward),
                                 format_double(s.mean_loss),
                                 format_double(s.epsilon)}) +
                       "\n";
                if (opts.checkpoint_every > 0 &&
                    (s.episode + 1) % opts.checkpoint_every == 0) {
                    Checkpoint periodic;
                    periodic.params = net;
                    periodic.fingerprint = fingerprint;
                    periodic.trained_episodes = s.episode + 1;
                    save_checkpoint(
                        (out / ("checkpoint_ep" + std::to_string(s.episode + 1) + ".json"))
                            .string(),
                        periodic);
                }
            });
        write_text_file((out / "training.csv").string(), csv);

        Checkpoint ckpt;
        ckpt.params = result.params;
        ckpt.adam = result.adam;
        ckpt.has_adam = true;
        ckpt.fingerprint = result.fingerprint;
        ckpt.trained_episodes = cfg.agent.episodes;
        save_checkpoint((out / "checkpoint.json").string(), ckpt);

        std::vector<std::string> outputs = {"training.csv", "checkpoint.json"};
        if (!opts.trace_path.empty()) {
            DqnPolicy policy(result.params, cfg.episode.extension.max_notified);
            write_trace(opts.trace_path, cfg.episode, policy,
                        derive_seed(cfg.seed, "trace"));
            outputs.push_back(opts.trace_path);
        }
        write_manifest(cfg, "train",
                       json{{"episodes", cfg.agent.episodes},
                            {"trace", opts.trace_path}},
                       outputs);

        const auto& last = result.episodes.back();
        std::cout << "trained " << cfg.agent.episodes << " episodes ("
                  << result.total_epochs << " decision epochs); final cumulative "
                  << "average reward " << format_money(last.cumulative_avg_reward)
                  << " MU, epsilon " << format_double(last.epsilon) << "\n"
                  << "wrote " << (out / "checkpoint.json").string() << "\n";
    });
}

int run_compare(const CompareOptions& opts) {
    return guard([&] {
        const ScenarioConfig& cfg = opts.scenario;
        cfg.episode.validate();
        const Checkpoint ckpt = load_checked_checkpoint(opts.checkpoint_path, cfg.episode);
        fs::create_directories(cfg.out_dir);

        const int max_notified = cfg.episode.extension.max_notified;
        const auto dqn_runs =
            evaluate(dqn_policy_factory(ckpt.params, max_notified), cfg.episode,
                     cfg.runs, cfg.episodes_per_run, cfg.seed);
        const auto baseline_runs =
            evaluate(no_extension_policy_factory(cfg.episode.economics), cfg.episode,
                     cfg.runs, cfg.episodes_per_run, cfg.seed);

        std::string csv = metrics_header() + "\n";
        for (const auto& m : dqn_runs) csv += metrics_row("extension_dqn", m) + "\n";
        for (const auto& m : baseline_runs) csv += metrics_row("no_extension", m) + "\n";
        const fs::path out(cfg.out_dir);
        write_text_file((out / "comparison.csv").string(), csv);

        json summary;
        summary["extension_dqn"] = summary_json(dqn_runs);
        summary["no_extension"] = summary_json(baseline_runs);
        summary["checkpoint"] = opts.checkpoint_path;
        write_text_file((out / "summary.json").string(), summary.dump(2) + "\n");

        std::vector<std::string> outputs = {"comparison.csv", "summary.json"};
        if (!opts.trace_path.empty()) {
            DqnPolicy policy(ckpt.params, max_notified);
            write_trace(opts.trace_path, cfg.episode, policy,
                        derive_seed(derive_seed(cfg.seed, std::uint64_t{0}),
                                    std::uint64_t{0}));
            outputs.push_back(opts.trace_path);
        }
        write_manifest(cfg, "compare",
                       json{{"checkpoint", opts.checkpoint_path},
                            {"trace", opts.trace_path}},
                       outputs);

        std::cout << "policy comparison over " << cfg.runs << " runs x "
                  << cfg.episodes_per_run << " episodes\n"
                  << "  extension_dqn: reward "
                  << format_money(summary["extension_dqn"]["total_reward"]["mean"].get<double>())
                  << " MU, lost "
                  << format_money(summary["extension_dqn"]["lost_count"]["mean"].get<double>())
                  << "\n  no_extension:  reward "
                  << format_money(summary["no_extension"]["total_reward"]["mean"].get<double>())
                  << " MU, lost "
                  << format_money(summary["no_extension"]["lost_count"]["mean"].get<double>()) << "\n";
    });
}

int run_sensitivity(const SensitivityOptions& opts) {
    return guard([&] {
        const ScenarioConfig& cfg = opts.scenario;
        cfg.episode.validate();
        cfg.agent.validate();
        fs::create_directories(cfg.out_dir);

        // Compensation changes the decision problem itself, so those cells are
        // always retrained; the arrival-rate grids reuse the provided
        // checkpoint unless retraining is requested.
        const bool retrain =
            opts.retrain || opts.grid == SensitivityGrid::Compensation;
        Checkpoint base_ckpt;
        if (!retrain)
            base_ckpt = load_checked_checkpoint(opts.checkpoint_path, cfg.episode);

        const auto cells = build_cells(opts.grid, cfg.episode);
        std::string csv = std::string("grid,cell,request_rate,occasional_rate,"
                                      "extension_pay_per_period,accept_prob,") +
                          metrics_header() + "\n";
        json summary;
        summary["grid"] = grid_name(opts.grid);
        summary["retrain"] = retrain;

        for (const auto& cell : cells) {
            MlpParams params;
            if (retrain) {
                AgentConfig agent = cfg.agent;
                if (opts.train_episodes) agent.episodes = *opts.train_episodes;
                params = train(cell.episode, agent,
                               derive_seed(cfg.seed, "train-" + cell.label))
                             .params;
            } else {
                params = base_ckpt.params;
            }
            const auto runs =
                evaluate(dqn_policy_factory(params, cell.episode.extension.max_notified),
                         cell.episode, cfg.runs, cfg.episodes_per_run, cfg.seed);
            const std::string prefix = join_csv(
                {grid_name(opts.grid), cell.label, format_double(cell.request_rate),
                 format_double(cell.occasional_rate), format_double(cell.extension_pay),
                 format_double(cell.accept_prob)});
            for (const auto& m : runs)
                csv += prefix + "," + metrics_row("extension_dqn", m) + "\n";
            summary["cells"][cell.label] = summary_json(runs);
        }

        const fs::path out(cfg.out_dir);
        write_text_file((out / "sensitivity.csv").string(), csv);
        write_text_file((out / "sensitivity_summary.json").string(),
                        summary.dump(2) + "\n");
        write_manifest(cfg, "sensitivity",
                       json{{"grid", grid_name(opts.grid)},
                            {"retrain", retrain},
                            {"checkpoint", opts.checkpoint_path},
                            {"train_episodes",
                             opts.train_episodes ? json(*opts.train_episodes) : json()}},
                       {"sensitivity.csv", "sensitivity_summary.json"});

        for (const auto& cell : cells)
            std::cout << grid_name(opts.grid) << "/" << cell.label
                      << ": mean extension cost "
                      << format_money(summary["cells"][cell.label]["extension_cost"]["mean"].get<double>())
                      << " MU, mean lost "
                      << format_money(summary["cells"][cell.label]["lost_count"]["mean"].get<double>())
                      << "\n";
    });
}

int run_arrivals(const ArrivalsOptions& opts) {
    return guard([&] {
        const ScenarioConfig& cfg = opts.scenario;
        cfg.episode.validate();

        std::string csv = "epoch,kind,id,x,y,deadline_epoch,patience_periods\n";
        const auto request_row = [&](const Request& r) {
            csv += join_csv({std::to_string(r.arrival_epoch), "request",
                             std::to_string(r.id), format_double(r.pickup.x),
                             format_double(r.pickup.y),
                             std::to_string(r.deadline_epoch), ""}) +
                   "\n";
        };
        const auto occasional_row = [&](const OccasionalCourier& c) {
            csv += join_csv({std::to_string(c.arrival_epoch), "occasional",
                             std::to_string(c.id), format_double(c.location.x),
                             format_double(c.location.y), "",
                             std::to_string(c.patience_periods)}) +
                   "\n";
        };
        Environment probe(cfg.episode);
        probe.reset(cfg.seed);
        for (const auto& r : probe.state().present_requests) request_row(r);
        for (const auto& c : probe.state().present_occasional) occasional_row(c);
        while (!probe.is_terminal()) {
            const auto out = probe.step({0, AssignmentRule::DeferAll});
            for (int id : out.diag.requests_arrived)
                for (const auto& r : probe.all_requests())
                    if (r.id == id) request_row(r);
            for (int id : out.diag.occasional_arrived)
                for (const auto& c : out.next_state.present_occasional)
                    if (c.id == id) occasional_row(c);
        }
        write_text_file(opts.out_path, csv);
        std::cout << "wrote arrival trace to " << opts.out_path << "\n";
    });
}

int run_replay(const ReplayOptions& opts) {
    return guard([&] {
        const std::string text = read_text_file(opts.trace_path);
        std::istringstream in(text);
        std::string line;
        double declared_total = 0.0;
        bool have_total = false;
        bool have_header = false;
        double running_total = 0.0;
        int row_number = 0;
        std::string csv_rows;

        while (std::getline(in, line)) {
            if (line.empty()) continue;
            if (line[0] == '#') {
                const auto eq = line.find('=');
                if (eq != std::string::npos &&
                    line.rfind("# episode_reward=", 0) == 0) {
                    declared_total = std::stod(line.substr(eq + 1));
                    have_total = true;
                }
                continue;
            }
            if (!have_header) {  // column header row
                have_header = true;
                continue;
            }
            ++row_number;
            std::vector<double> fields;
            std::stringstream row(line);
            std::string cell;
            while (std::getline(row, cell, ','))
                fields.push_back(std::stod(cell));
            if (fields.size() < 9)
                throw std::runtime_error("trace row " + std::to_string(row_number) +
                                         " is truncated");
            const double recomputed = fields[1] - fields[2] - fields[3] - fields[4] -
                                      fields[5] - fields[6] - fields[7];
            const double stored = fields[8];
            if (std::abs(recomputed - stored) > 1e-9)
                throw std::runtime_error(
                    "trace row " + std::to_string(row_number) +
                    ": reward column does not match its components (stored " +
                    format_double(stored) + ", recomputed " +
                    format_double(recomputed) + ")");
            running_total += stored;
            std::cout << "epoch " << static_cast<long>(fields[0]) << ": reward "
                      << format_money(stored) << " = revenue "
                      << format_money(fields[1]) << " - wages "
                      << format_money(fields[2]) << " - distance "
                      << format_money(fields[3] + fields[5]) << " - occasional fee "
                      << format_money(fields[4]) << " - lost "
                      << format_money(fields[6]) << " - extensions "
                      << format_money(fields[7]) << "\n";
            csv_rows += line + "\n";
        }
        if (have_total && std::abs(running_total - declared_total) > 1e-9)
            throw std::runtime_error("trace totals mismatch: rows sum to " +
                                     format_double(running_total) +
                                     " but header declares " +
                                     format_double(declared_total));
        std::cout << "episode total: " << format_money(running_total) << " MU over "
                  << row_number << " epochs\n";
        if (!opts.csv_out.empty()) write_text_file(opts.csv_out, csv_rows);
    });
}

}  // namespace courier
