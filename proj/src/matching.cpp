#include "courier/matching.hpp"

#include <algorithm>
#include <limits>

namespace courier {

const char* to_string(AssignmentRule rule) {
    switch (rule) {
        case AssignmentRule::GlobalGreedy: return "global_greedy";
        case AssignmentRule::CommittedFirst: return "committed_first";
        case AssignmentRule::OccasionalFirst: return "occasional_first";
        case AssignmentRule::DeferAll: return "defer_all";
    }
    return "?";
}

std::vector<CompositeAction> action_catalog(int max_notified) {
    static constexpr AssignmentRule kRules[] = {
        AssignmentRule::GlobalGreedy, AssignmentRule::CommittedFirst,
        AssignmentRule::OccasionalFirst, AssignmentRule::DeferAll};
    std::vector<CompositeAction> catalog;
    catalog.reserve(4 * (max_notified + 1));
    for (int k = 0; k <= max_notified; ++k)
        for (AssignmentRule rule : kRules) catalog.push_back({k, rule});
    return catalog;
}

std::string catalog_description(int max_notified) {
    std::string desc = "catalog:v1";
    for (const auto& a : action_catalog(max_notified)) {
        desc += ";k" + std::to_string(a.extension_count) + ":" + to_string(a.rule);
    }
    return desc;
}

double serving_cost(const Request& req, CourierType type,
                    const Location& courier_location, const EconomicsConfig& econ) {
    const double leg = distance(req.pickup, req.delivery);
    if (type == CourierType::Committed)
        return econ.committed_per_distance * (distance(courier_location, req.pickup) + leg);
    return econ.occasional_per_request + econ.occasional_per_distance * leg;
}

namespace {

struct Candidate {
    CourierType type;
    int id;
    Location location;
};

// Greedy matching loop over one candidate pool: repeatedly commits the
// (request, courier) pair with the smallest key, dropping pairs whose revenue
// shortfall exceeds the lost-request penalty (serving would be worse than
// losing the request outright).
template <typename KeyFn>
void greedy_assign(std::vector<const Request*>& requests,
                   std::vector<Candidate>& pool, const EconomicsConfig& econ,
                   const KeyFn& key, std::vector<AssignmentPair>& out) {
    while (!requests.empty() && !pool.empty()) {
        double best_key = std::numeric_limits<double>::infinity();
        size_t best_r = 0, best_c = 0;
        bool found = false;
        for (size_t ri = 0; ri < requests.size(); ++ri) {
            for (size_t ci = 0; ci < pool.size(); ++ci) {
                const double profit =
                    requests[ri]->revenue -
                    serving_cost(*requests[ri], pool[ci].type, pool[ci].location, econ);
                if (profit <= -econ.lost_penalty) continue;
                const double k = key(*requests[ri], pool[ci]);
                if (!found || k < best_key) {
                    found = true;
                    best_key = k;
                    best_r = ri;
                    best_c = ci;
                }
            }
        }
        if (!found) break;
        out.push_back({requests[best_r]->id, pool[best_c].type, pool[best_c].id});
        requests.erase(requests.begin() + best_r);
        pool.erase(pool.begin() + best_c);
    }
}

std::vector<Candidate> committed_pool(const SystemState& state) {
    std::vector<Candidate> pool;
    pool.reserve(state.available_committed.size());
    for (const auto& c : state.available_committed)
        pool.push_back({CourierType::Committed, c.id, c.location});
    return pool;
}

std::vector<Candidate> occasional_pool(const SystemState& state) {
    std::vector<Candidate> pool;
    pool.reserve(state.present_occasional.size());
    for (const auto& c : state.present_occasional)
        pool.push_back({CourierType::Occasional, c.id, c.location});
    return pool;
}

}  // namespace

ExpandedAction expand(const SystemState& state, const CompositeAction& action,
                      const EconomicsConfig& econ) {
    ExpandedAction expanded;

    // Notifications: the k lowest-id eligible couriers (shift ending next
    // epoch, currently available).
    const int k = std::min(action.extension_count,
                           static_cast<int>(state.ending_next_epoch.size()));
    std::vector<int> eligible = state.ending_next_epoch;
    std::sort(eligible.begin(), eligible.end());
    expanded.notify_ids.assign(eligible.begin(), eligible.begin() + std::max(k, 0));

    std::vector<const Request*> requests;
    requests.reserve(state.present_requests.size());
    for (const auto& r : state.present_requests) requests.push_back(&r);

    const auto nearest_pickup = [](const Request& r, const Candidate& c) {
        return distance(c.location, r.pickup);
    };
    const auto cost_minus_revenue = [&econ](const Request& r, const Candidate& c) {
        return serving_cost(r, c.type, c.location, econ) - r.revenue;
    };

    switch (action.rule) {
        case AssignmentRule::DeferAll:
            break;
        case AssignmentRule::GlobalGreedy: {
            auto pool = committed_pool(state);
            auto occ = occasional_pool(state);
            pool.insert(pool.end(), occ.begin(), occ.end());
            greedy_assign(requests, pool, econ, cost_minus_revenue,
                          expanded.assignments);
            break;
        }
        case AssignmentRule::CommittedFirst: {
            auto pool = committed_pool(state);
            greedy_assign(requests, pool, econ, nearest_pickup, expanded.assignments);
            auto occ = occasional_pool(state);
            greedy_assign(requests, occ, econ, nearest_pickup, expanded.assignments);
            break;
        }
        case AssignmentRule::OccasionalFirst: {
            auto occ = occasional_pool(state);
            greedy_assign(requests, occ, econ, nearest_pickup, expanded.assignments);
            auto pool = committed_pool(state);
            greedy_assign(requests, pool, econ, nearest_pickup, expanded.assignments);
            break;
        }
    }
    return expanded;
}

double assignment_value(const SystemState& state, const ExpandedAction& expanded,
                        const EconomicsConfig& econ) {
    double value = 0.0;
    std::vector<int> assigned;
    assigned.reserve(expanded.assignments.size());
    for (const auto& pair : expanded.assignments) {
        const Request* req = nullptr;
        Location courier_loc;
        for (const auto& r : state.present_requests)
            if (r.id == pair.request_id) req = &r;
        if (pair.courier_type == CourierType::Committed) {
            for (const auto& c : state.available_committed)
                if (c.id == pair.courier_id) courier_loc = c.location;
        } else {
            for (const auto& c : state.present_occasional)
                if (c.id == pair.courier_id) courier_loc = c.location;
        }
        if (!req) continue;
        value += req->revenue - serving_cost(*req, pair.courier_type, courier_loc, econ);
        assigned.push_back(pair.request_id);
    }
    for (const auto& r : state.present_requests) {
        if (r.deadline_epoch != state.epoch) continue;
        if (std::find(assigned.begin(), assigned.end(), r.id) == assigned.end())
            value -= econ.lost_penalty;
    }
    return value;
}

}  // namespace courier
