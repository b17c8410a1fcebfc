#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace courier {

// All monetary values are in abstract monetary units (MU).
struct EconomicsConfig {
    double revenue_per_request = 60.0;
    double committed_wage_per_period = 1.0;
    double committed_per_distance = 0.1;
    double occasional_per_request = 2.0;
    double occasional_per_distance = 0.1;
    double lost_penalty = 60.0;
    double extension_pay_per_period = 3.0;
};

struct ExtensionConfig {
    int periods = 6;          // shift growth per accepted notification
    int max_notified = 3;     // notification budget per epoch
    double accept_prob = 0.7;
    bool allow_reextension = true;
};

struct ArrivalConfig {
    double request_rate = 2.0;     // mean new requests per period
    double occasional_rate = 1.0;  // mean new occasional couriers per period
    double patience_mean = 1.0;    // mean idle periods before an occasional courier leaves
};

// The map extent is paired with the courier speed so that committed couriers
// run near capacity against the default demand: a typical two-leg trip takes
// about three periods, which makes end-of-shift supply genuinely scarce.
struct WorldConfig {
    std::uint64_t seed = 20240501;
    int n_pickup = 40;
    int n_delivery = 40;
    double extent = 300.0;
    double speed = 100.0;  // distance units per period
};

struct ScheduleConfig {
    std::uint64_t seed = 20240502;
    int n_couriers = 50;
    int shift_length = 12;  // periods
};

struct InitialStateConfig {
    int requests = 4;
    int committed = 2;
    int occasional = 3;
};

struct EpisodeConfig {
    int horizon = 200;            // decision epochs per episode
    double period_minutes = 6.0;  // wall-clock length of one period
    int assignment_window = 5;    // periods between request arrival and its deadline
    EconomicsConfig economics;
    ExtensionConfig extension;
    ArrivalConfig arrivals;
    WorldConfig world;
    ScheduleConfig schedule;
    InitialStateConfig initial;

    // Throws std::invalid_argument naming the offending field.
    void validate() const;

    std::string to_json_string() const;
    static EpisodeConfig from_json_string(const std::string& text);
};

struct AgentConfig {
    double epsilon_start = 0.99999;
    double epsilon_decay = 0.99999;  // multiplicative retention per decision epoch
    double min_epsilon = 0.01;
    double gamma = 0.7;
    double learning_rate = 0.01;
    int target_sync_interval = 5;  // decision epochs between target network refreshes
    int batch_size = 64;
    int replay_capacity = 100;
    int episodes = 1000;
    std::vector<int> hidden_layers = {64, 64, 64, 64};

    void validate() const;

    std::string to_json_string() const;
    static AgentConfig from_json_string(const std::string& text);
};

}  // namespace courier
