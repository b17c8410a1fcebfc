#include "courier/environment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace courier {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

constexpr double kReleaseTolerance = 1e-9;

}  // namespace

FeatureScaling FeatureScaling::from_config(const EpisodeConfig& cfg,
                                           const WorldMap& world) {
    FeatureScaling s;
    s.horizon = std::max(1, cfg.horizon);
    s.request_cap =
        std::max(1.0, 3.0 * cfg.arrivals.request_rate * (cfg.assignment_window + 1));
    s.committed_cap = std::max(1, cfg.schedule.n_couriers);
    s.occasional_cap = std::max(
        1.0, 3.0 * cfg.arrivals.occasional_rate * (cfg.arrivals.patience_mean + 1.0));
    s.ending_cap = std::max(1, cfg.extension.max_notified);
    s.slack_cap = std::max(1, cfg.assignment_window);
    s.distance_cap = world.diagonal();
    s.lost_cap =
        std::max(1.0, cfg.arrivals.request_rate * cfg.horizon + cfg.initial.requests);
    s.extension_cap = std::max(1.0, 2.0 * cfg.schedule.n_couriers);
    return s;
}

std::vector<double> observe_features(const SystemState& state,
                                     const FeatureScaling& s) {
    std::vector<double> f(kFeatureCount, 0.0);
    f[0] = clamp01(state.epoch / s.horizon);
    f[1] = clamp01(state.present_requests.size() / s.request_cap);
    f[2] = clamp01(state.available_committed.size() / s.committed_cap);
    f[3] = clamp01(state.present_occasional.size() / s.occasional_cap);
    f[4] = clamp01(state.on_shift_count / s.committed_cap);
    f[5] = clamp01(state.ending_next_epoch.size() / s.ending_cap);

    if (!state.present_requests.empty()) {
        double slack_sum = 0.0;
        double slack_min = std::numeric_limits<double>::infinity();
        for (const auto& r : state.present_requests) {
            const double slack = r.deadline_epoch - state.epoch;
            slack_sum += slack;
            slack_min = std::min(slack_min, slack);
        }
        f[6] = clamp01(slack_sum / state.present_requests.size() / s.slack_cap);
        f[7] = clamp01(slack_min / s.slack_cap);

        const auto mean_nearest = [&](const auto& couriers) {
            if (couriers.empty()) return 0.0;
            double total = 0.0;
            for (const auto& c : couriers) {
                double best = std::numeric_limits<double>::infinity();
                for (const auto& r : state.present_requests)
                    best = std::min(best, distance(c.location, r.pickup));
                total += best;
            }
            return total / couriers.size();
        };
        f[8] = clamp01(mean_nearest(state.available_committed) / s.distance_cap);
        f[9] = clamp01(mean_nearest(state.present_occasional) / s.distance_cap);
    }

    f[10] = clamp01(state.total_lost / s.lost_cap);
    f[11] = clamp01(state.total_extensions_accepted / s.extension_cap);
    return f;
}

Environment::Environment(const EpisodeConfig& cfg)
    : Environment(cfg,
                  generate_world(cfg.world.seed, cfg.world.n_pickup,
                                 cfg.world.n_delivery, cfg.world.extent,
                                 cfg.world.speed),
                  OfflineSchedule{}) {
    schedule_ = generate_offline_schedule(
        cfg.schedule.seed, cfg.schedule.n_couriers,
        std::max(cfg.horizon, cfg.schedule.shift_length), cfg.schedule.shift_length,
        world_);
}

Environment::Environment(const EpisodeConfig& cfg, WorldMap world,
                         OfflineSchedule schedule)
    : cfg_(cfg), world_(std::move(world)), schedule_(std::move(schedule)) {
    cfg_.validate();
    scaling_ = FeatureScaling::from_config(cfg_, world_);
}

const SystemState& Environment::reset(std::uint64_t master_seed) {
    request_rng_.reseed(derive_seed(master_seed, "requests"));
    occasional_rng_.reseed(derive_seed(master_seed, "occasional"));
    patience_rng_.reseed(derive_seed(master_seed, "patience"));
    acceptance_rng_.reseed(derive_seed(master_seed, "acceptance"));

    committed_.clear();
    committed_.reserve(schedule_.shifts.size());
    for (const auto& shift : schedule_.shifts) {
        CommittedCourier c;
        c.id = shift.courier_id;
        c.shift_start = shift.start;
        c.shift_end = shift.end;
        c.location = shift.start_location;
        committed_.push_back(c);
    }
    std::sort(committed_.begin(), committed_.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });

    // The earliest scheduled shifts are pulled forward to epoch 0 so the
    // initial state always opens with the configured committed couriers.
    std::vector<int> order(committed_.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return committed_[a].shift_start < committed_[b].shift_start;
    });
    const int forced = std::min<int>(cfg_.initial.committed,
                                     static_cast<int>(committed_.size()));
    for (int i = 0; i < forced; ++i) committed_[order[i]].shift_start = 0;

    next_request_id_ = 0;
    next_occasional_id_ = 0;
    requests_ = sample_requests(request_rng_, cfg_.initial.requests, 0,
                                cfg_.assignment_window,
                                cfg_.economics.revenue_per_request, world_,
                                next_request_id_);
    occasional_ =
        sample_occasionals(occasional_rng_, patience_rng_, cfg_.initial.occasional,
                           0, cfg_.arrivals.patience_mean, world_,
                           next_occasional_id_);

    total_lost_ = 0;
    total_assigned_committed_ = 0;
    total_assigned_occasional_ = 0;
    total_extensions_ = 0;
    epoch_ = 0;
    ready_ = true;
    rebuild_snapshot();
    return snapshot_;
}

const SystemState& Environment::load_fixture(const FixtureState& fixture,
                                             std::uint64_t seed) {
    request_rng_.reseed(derive_seed(seed, "requests"));
    occasional_rng_.reseed(derive_seed(seed, "occasional"));
    patience_rng_.reseed(derive_seed(seed, "patience"));
    acceptance_rng_.reseed(derive_seed(seed, "acceptance"));

    committed_ = fixture.committed;
    occasional_ = fixture.occasional;
    requests_ = fixture.requests;
    const auto by_id = [](const auto& a, const auto& b) { return a.id < b.id; };
    std::sort(committed_.begin(), committed_.end(), by_id);
    std::sort(occasional_.begin(), occasional_.end(), by_id);
    std::sort(requests_.begin(), requests_.end(), by_id);

    next_request_id_ = 0;
    for (const auto& r : requests_) next_request_id_ = std::max(next_request_id_, r.id + 1);
    next_occasional_id_ = 0;
    for (const auto& c : occasional_)
        next_occasional_id_ = std::max(next_occasional_id_, c.id + 1);

    total_lost_ = 0;
    total_assigned_committed_ = 0;
    total_assigned_occasional_ = 0;
    for (const auto& r : requests_) {
        if (r.lost) ++total_lost_;
        if (r.assigned_epoch) ++total_assigned_committed_;
    }
    total_extensions_ = 0;
    for (const auto& c : committed_) total_extensions_ += c.extensions_accepted;
    epoch_ = fixture.epoch;
    ready_ = true;
    rebuild_snapshot();
    return snapshot_;
}

void Environment::validate_ready() const {
    if (!ready_) throw std::logic_error("environment used before reset()");
}

void Environment::rebuild_snapshot() {
    snapshot_ = SystemState{};
    snapshot_.epoch = epoch_;
    snapshot_.horizon = cfg_.horizon;

    for (const auto& r : requests_)
        if (r.assignable_at(epoch_)) snapshot_.present_requests.push_back(r);

    for (const auto& c : committed_) {
        if (!c.on_shift(epoch_)) continue;
        ++snapshot_.on_shift_count;
        if (c.busy) {
            snapshot_.busy_committed.push_back(c);
        } else {
            snapshot_.available_committed.push_back(c);
        }
        // Notification eligibility: any on-shift courier whose shift ends next
        // epoch, mid-delivery or not. A busy courier who accepts simply keeps
        // working into the extended shift.
        const bool eligible =
            cfg_.extension.allow_reextension || c.extensions_accepted == 0;
        if (c.shift_end == epoch_ + 1 && eligible)
            snapshot_.ending_next_epoch.push_back(c.id);
    }

    snapshot_.present_occasional = occasional_;

    snapshot_.total_requests_arrived = static_cast<long>(requests_.size());
    snapshot_.total_assigned_committed = total_assigned_committed_;
    snapshot_.total_assigned_occasional = total_assigned_occasional_;
    snapshot_.total_lost = total_lost_;
    snapshot_.total_extensions_accepted = total_extensions_;
}

std::vector<double> Environment::features() const {
    validate_ready();
    return observe_features(snapshot_, scaling_);
}

TransitionOutcome Environment::step(const CompositeAction& action) {
    validate_ready();
    if (is_terminal()) throw std::logic_error("step() called on a finished episode");

    const int t = epoch_;
    const auto& econ = cfg_.economics;
    StepDiagnostics diag;

    const ExpandedAction expanded = expand(snapshot_, action, econ);

    // 1. Extension notifications and sampled responses.
    diag.notified_courier_ids = expanded.notify_ids;
    diag.notifications_sent = static_cast<int>(expanded.notify_ids.size());
    for (int id : expanded.notify_ids) {
        if (!sample_extension_response(acceptance_rng_, cfg_.extension.accept_prob))
            continue;
        auto it = std::find_if(committed_.begin(), committed_.end(),
                               [id](const auto& c) { return c.id == id; });
        it->shift_end += cfg_.extension.periods;
        it->extension_active = true;
        it->extension_pay_until = t + cfg_.extension.periods;
        it->extensions_accepted += 1;
        ++total_extensions_;
        ++diag.extensions_accepted;
        diag.accepted_courier_ids.push_back(id);
        diag.committed_extended.push_back(id);
    }

    // 2. Assignments: committed couriers go busy for the two travel legs,
    // occasional couriers serve and leave the system.
    diag.assignment_pairs = expanded.assignments;
    for (const auto& pair : expanded.assignments) {
        auto rit = std::find_if(requests_.begin(), requests_.end(),
                                [&](const auto& r) { return r.id == pair.request_id; });
        Request& req = *rit;
        req.assigned_epoch = t;
        diag.requests_assigned.push_back(req.id);
        diag.revenue += req.revenue;
        const double leg = distance(req.pickup, req.delivery);
        if (pair.courier_type == CourierType::Committed) {
            auto cit = std::find_if(committed_.begin(), committed_.end(),
                                    [&](const auto& c) { return c.id == pair.courier_id; });
            diag.committed_distance_cost +=
                econ.committed_per_distance * (distance(cit->location, req.pickup) + leg);
            cit->busy = true;
            cit->busy_until = t + world_.travel_time(cit->location, req.pickup) +
                              world_.travel_time(req.pickup, req.delivery);
            cit->location = req.delivery;
            ++total_assigned_committed_;
            ++diag.assignments_committed;
            diag.committed_now_busy.push_back(cit->id);
        } else {
            diag.occasional_fixed_cost += econ.occasional_per_request;
            diag.occasional_distance_cost += econ.occasional_per_distance * leg;
            auto oit = std::find_if(occasional_.begin(), occasional_.end(),
                                    [&](const auto& c) { return c.id == pair.courier_id; });
            occasional_.erase(oit);
            ++total_assigned_occasional_;
            ++diag.assignments_occasional;
            diag.occasional_assigned.push_back(pair.courier_id);
        }
    }

    // 3. Per-period wage for every on-shift committed courier, busy or idle.
    diag.wage_cost = econ.committed_wage_per_period * snapshot_.on_shift_count;

    // 4. Extension compensation for every courier inside a pay window,
    // including acceptances from this epoch.
    for (const auto& c : committed_)
        if (c.on_shift(t) && c.paying_extension(t))
            diag.extension_pay += econ.extension_pay_per_period;

    // 5. Requests at their deadline that stayed unassigned are lost now.
    for (auto& r : requests_) {
        if (r.lost || r.assigned_epoch || r.arrival_epoch > t) continue;
        if (r.deadline_epoch != t) continue;
        r.lost = true;
        ++total_lost_;
        ++diag.lost_now;
        diag.requests_lost.push_back(r.id);
        diag.lost_penalty += econ.lost_penalty;
    }

    const double reward = diag.reward_sum();

    // 6. Exogenous transition into epoch t+1.
    const int next = t + 1;

    for (auto& c : committed_) {
        if (c.busy && next + kReleaseTolerance >= c.busy_until) {
            c.busy = false;
            // Only releases that rejoin the available pool count as deltas;
            // a courier whose shift meanwhile ended just leaves quietly.
            if (c.on_shift(next)) diag.committed_released.push_back(c.id);
        }
        c.extension_active = next < c.extension_pay_until;
        if (c.shift_end == t) diag.committed_ended.push_back(c.id);
        if (c.shift_start == next) diag.committed_started.push_back(c.id);
    }

    // Occasional couriers present this epoch abandon once their idle time
    // reaches their patience; new arrivals are only checked from the next
    // epoch on, so every courier is assignable at least once.
    for (auto it = occasional_.begin(); it != occasional_.end();) {
        if (next - it->arrival_epoch >= it->patience_periods) {
            diag.occasional_abandoned.push_back(it->id);
            it = occasional_.erase(it);
        } else {
            ++it;
        }
    }

    auto new_requests = sample_request_arrivals(
        request_rng_, cfg_.arrivals.request_rate, next, cfg_.assignment_window,
        econ.revenue_per_request, world_, next_request_id_);
    for (const auto& r : new_requests) diag.requests_arrived.push_back(r.id);
    requests_.insert(requests_.end(), new_requests.begin(), new_requests.end());

    auto new_occ = sample_occasional_arrivals(
        occasional_rng_, patience_rng_, cfg_.arrivals.occasional_rate, next,
        cfg_.arrivals.patience_mean, world_, next_occasional_id_);
    for (const auto& c : new_occ) diag.occasional_arrived.push_back(c.id);
    occasional_.insert(occasional_.end(), new_occ.begin(), new_occ.end());

    epoch_ = next;
    rebuild_snapshot();

    TransitionOutcome outcome;
    outcome.next_state = snapshot_;
    outcome.reward = reward;
    outcome.diag = std::move(diag);
    return outcome;
}

}  // namespace courier
