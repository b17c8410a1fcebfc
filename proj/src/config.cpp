#include "courier/config.hpp"

#include <stdexcept>

#include <json.hpp>

namespace courier {

namespace {

using nlohmann::json;

void require(bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
}

// Reads a field if present, leaving the default otherwise.
template <typename T>
void get_opt(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

json economics_to_json(const EconomicsConfig& e) {
    return json{{"revenue_per_request", e.revenue_per_request},
                {"committed_wage_per_period", e.committed_wage_per_period},
                {"committed_per_distance", e.committed_per_distance},
                {"occasional_per_request", e.occasional_per_request},
                {"occasional_per_distance", e.occasional_per_distance},
                {"lost_penalty", e.lost_penalty},
                {"extension_pay_per_period", e.extension_pay_per_period}};
}

void economics_from_json(const json& j, EconomicsConfig& e) {
    get_opt(j, "revenue_per_request", e.revenue_per_request);
    get_opt(j, "committed_wage_per_period", e.committed_wage_per_period);
    get_opt(j, "committed_per_distance", e.committed_per_distance);
    get_opt(j, "occasional_per_request", e.occasional_per_request);
    get_opt(j, "occasional_per_distance", e.occasional_per_distance);
    get_opt(j, "lost_penalty", e.lost_penalty);
    get_opt(j, "extension_pay_per_period", e.extension_pay_per_period);
}

}  // namespace

void EpisodeConfig::validate() const {
    require(horizon >= 0, "episode.horizon must be >= 0");
    require(period_minutes > 0.0, "episode.period_minutes must be > 0");
    require(assignment_window >= 0, "episode.assignment_window must be >= 0");
    require(arrivals.request_rate >= 0.0, "episode.arrivals.request_rate must be >= 0");
    require(arrivals.occasional_rate >= 0.0,
            "episode.arrivals.occasional_rate must be >= 0");
    require(arrivals.patience_mean >= 0.0,
            "episode.arrivals.patience_mean must be >= 0");
    require(extension.periods >= 1, "episode.extension.periods must be >= 1");
    require(extension.max_notified >= 0,
            "episode.extension.max_notified must be >= 0");
    require(extension.accept_prob >= 0.0 && extension.accept_prob <= 1.0,
            "episode.extension.accept_prob must be in [0, 1]");
    require(world.n_pickup > 0, "episode.world.n_pickup must be > 0");
    require(world.n_delivery > 0, "episode.world.n_delivery must be > 0");
    require(world.extent > 0.0, "episode.world.extent must be > 0");
    require(world.speed > 0.0, "episode.world.speed must be > 0");
    require(schedule.n_couriers > 0, "episode.schedule.n_couriers must be > 0");
    require(schedule.shift_length > 0, "episode.schedule.shift_length must be > 0");
    require(schedule.shift_length <= horizon || horizon == 0,
            "episode.schedule.shift_length must not exceed episode.horizon");
    require(initial.requests >= 0, "episode.initial.requests must be >= 0");
    require(initial.committed >= 0, "episode.initial.committed must be >= 0");
    require(initial.committed <= schedule.n_couriers,
            "episode.initial.committed must not exceed schedule.n_couriers");
    require(initial.occasional >= 0, "episode.initial.occasional must be >= 0");
}

std::string EpisodeConfig::to_json_string() const {
    json j;
    j["horizon"] = horizon;
    j["period_minutes"] = period_minutes;
    j["assignment_window"] = assignment_window;
    j["economics"] = economics_to_json(economics);
    j["extension"] = {{"periods", extension.periods},
                      {"max_notified", extension.max_notified},
                      {"accept_prob", extension.accept_prob},
                      {"allow_reextension", extension.allow_reextension}};
    j["arrivals"] = {{"request_rate", arrivals.request_rate},
                     {"occasional_rate", arrivals.occasional_rate},
                     {"patience_mean", arrivals.patience_mean}};
    j["world"] = {{"seed", world.seed},
                  {"n_pickup", world.n_pickup},
                  {"n_delivery", world.n_delivery},
                  {"extent", world.extent},
                  {"speed", world.speed}};
    j["schedule"] = {{"seed", schedule.seed},
                     {"n_couriers", schedule.n_couriers},
                     {"shift_length", schedule.shift_length}};
    j["initial"] = {{"requests", initial.requests},
                    {"committed", initial.committed},
                    {"occasional", initial.occasional}};
    return j.dump(2);
}

EpisodeConfig EpisodeConfig::from_json_string(const std::string& text) {
    const auto j = json::parse(text);
    EpisodeConfig cfg;
    get_opt(j, "horizon", cfg.horizon);
    get_opt(j, "period_minutes", cfg.period_minutes);
    get_opt(j, "assignment_window", cfg.assignment_window);
    if (j.contains("economics")) economics_from_json(j.at("economics"), cfg.economics);
    if (j.contains("extension")) {
        const auto& e = j.at("extension");
        get_opt(e, "periods", cfg.extension.periods);
        get_opt(e, "max_notified", cfg.extension.max_notified);
        get_opt(e, "accept_prob", cfg.extension.accept_prob);
        get_opt(e, "allow_reextension", cfg.extension.allow_reextension);
    }
    if (j.contains("arrivals")) {
        const auto& a = j.at("arrivals");
        get_opt(a, "request_rate", cfg.arrivals.request_rate);
        get_opt(a, "occasional_rate", cfg.arrivals.occasional_rate);
        get_opt(a, "patience_mean", cfg.arrivals.patience_mean);
    }
    if (j.contains("world")) {
        const auto& w = j.at("world");
        get_opt(w, "seed", cfg.world.seed);
        get_opt(w, "n_pickup", cfg.world.n_pickup);
        get_opt(w, "n_delivery", cfg.world.n_delivery);
        get_opt(w, "extent", cfg.world.extent);
        get_opt(w, "speed", cfg.world.speed);
    }
    if (j.contains("schedule")) {
        const auto& s = j.at("schedule");
        get_opt(s, "seed", cfg.schedule.seed);
        get_opt(s, "n_couriers", cfg.schedule.n_couriers);
        get_opt(s, "shift_length", cfg.schedule.shift_length);
    }
    if (j.contains("initial")) {
        const auto& i = j.at("initial");
        get_opt(i, "requests", cfg.initial.requests);
        get_opt(i, "committed", cfg.initial.committed);
        get_opt(i, "occasional", cfg.initial.occasional);
    }
    cfg.validate();
    return cfg;
}

void AgentConfig::validate() const {
    require(epsilon_start >= 0.0 && epsilon_start <= 1.0,
            "agent.epsilon_start must be in [0, 1]");
    require(min_epsilon >= 0.0 && min_epsilon <= epsilon_start,
            "agent.min_epsilon must be in [0, epsilon_start]");
    require(epsilon_decay > 0.0 && epsilon_decay <= 1.0,
            "agent.epsilon_decay must be in (0, 1]");
    require(gamma > 0.0 && gamma <= 1.0, "agent.gamma must be in (0, 1]");
    require(learning_rate > 0.0, "agent.learning_rate must be > 0");
    require(target_sync_interval >= 1, "agent.target_sync_interval must be >= 1");
    require(batch_size >= 1, "agent.batch_size must be >= 1");
    require(replay_capacity >= batch_size,
            "agent.replay_capacity must be >= agent.batch_size");
    require(episodes >= 1, "agent.episodes must be >= 1");
    require(!hidden_layers.empty(), "agent.hidden_layers must not be empty");
    for (int width : hidden_layers)
        require(width >= 1, "agent.hidden_layers entries must be >= 1");
}

std::string AgentConfig::to_json_string() const {
    json j;
    j["epsilon_start"] = epsilon_start;
    j["epsilon_decay"] = epsilon_decay;
    j["min_epsilon"] = min_epsilon;
    j["gamma"] = gamma;
    j["learning_rate"] = learning_rate;
    j["target_sync_interval"] = target_sync_interval;
    j["batch_size"] = batch_size;
    j["replay_capacity"] = replay_capacity;
    j["episodes"] = episodes;
    j["hidden_layers"] = hidden_layers;
    return j.dump(2);
}

AgentConfig AgentConfig::from_json_string(const std::string& text) {
    const auto j = json::parse(text);
    AgentConfig cfg;
    get_opt(j, "epsilon_start", cfg.epsilon_start);
    get_opt(j, "epsilon_decay", cfg.epsilon_decay);
    get_opt(j, "min_epsilon", cfg.min_epsilon);
    get_opt(j, "gamma", cfg.gamma);
    get_opt(j, "learning_rate", cfg.learning_rate);
    get_opt(j, "target_sync_interval", cfg.target_sync_interval);
    get_opt(j, "batch_size", cfg.batch_size);
    get_opt(j, "replay_capacity", cfg.replay_capacity);
    get_opt(j, "episodes", cfg.episodes);
    get_opt(j, "hidden_layers", cfg.hidden_layers);
    cfg.validate();
    return cfg;
}

}  // namespace courier
