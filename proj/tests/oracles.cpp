#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>

namespace courier::testing {

double reward_oracle(const SystemState& pre, const ExpandedAction& expanded,
                     const std::vector<int>& accepted_ids, const EpisodeConfig& cfg) {
    const auto& econ = cfg.economics;
    const int t = pre.epoch;
    double reward = 0.0;

    const auto find_request = [&](int id) -> const Request& {
        for (const auto& r : pre.present_requests)
            if (r.id == id) return r;
        throw std::logic_error("oracle: request not in pre-state");
    };

    // Revenue and serving compensation, term by term.
    for (const auto& pair : expanded.assignments) {
        const Request& r = find_request(pair.request_id);
        reward += r.revenue;
        const double leg = std::hypot(r.pickup.x - r.delivery.x, r.pickup.y - r.delivery.y);
        if (pair.courier_type == CourierType::Committed) {
            const CommittedCourier* c = nullptr;
            for (const auto& cc : pre.available_committed)
                if (cc.id == pair.courier_id) c = &cc;
            const double approach =
                std::hypot(c->location.x - r.pickup.x, c->location.y - r.pickup.y);
            reward -= econ.committed_per_distance * (approach + leg);
        } else {
            reward -= econ.occasional_per_request;
            reward -= econ.occasional_per_distance * leg;
        }
    }

    // Per-period wages for everyone on shift.
    reward -= econ.committed_wage_per_period *
              (pre.available_committed.size() + pre.busy_committed.size());

    // Penalty for requests expiring now that the action left unassigned.
    for (const auto& r : pre.present_requests) {
        if (r.deadline_epoch != t) continue;
        bool assigned = false;
        for (const auto& pair : expanded.assignments)
            if (pair.request_id == r.id) assigned = true;
        if (!assigned) reward -= econ.lost_penalty;
    }

    // Extension compensation: one charge per courier that is inside a pay
    // window this epoch -- fresh acceptances included.
    const auto charged = [&](const CommittedCourier& c) {
        if (std::find(accepted_ids.begin(), accepted_ids.end(), c.id) !=
            accepted_ids.end())
            return true;
        return c.paying_extension(t);
    };
    for (const auto& c : pre.available_committed)
        if (charged(c)) reward -= econ.extension_pay_per_period;
    for (const auto& c : pre.busy_committed)
        if (charged(c)) reward -= econ.extension_pay_per_period;

    return reward;
}

namespace {

struct OracleCandidate {
    CourierType type;
    int id;
    Location location;
};

double pair_gain(const Request& r, const OracleCandidate& c,
                 const EconomicsConfig& econ, int epoch) {
    double gain = r.revenue - serving_cost(r, c.type, c.location, econ);
    if (r.deadline_epoch == epoch) gain += econ.lost_penalty;  // expiry avoided
    return gain;
}

void search(const std::vector<Request>& requests,
            const std::vector<OracleCandidate>& couriers, std::vector<bool>& used,
            size_t ri, double value, const EconomicsConfig& econ, int epoch,
            double& best) {
    if (ri == requests.size()) {
        best = std::max(best, value);
        return;
    }
    search(requests, couriers, used, ri + 1, value, econ, epoch, best);  // skip
    for (size_t ci = 0; ci < couriers.size(); ++ci) {
        if (used[ci]) continue;
        used[ci] = true;
        search(requests, couriers, used, ri + 1,
               value + pair_gain(requests[ri], couriers[ci], econ, epoch), econ,
               epoch, best);
        used[ci] = false;
    }
}

}  // namespace

double best_one_step_assignment(const SystemState& state, const EconomicsConfig& econ) {
    std::vector<OracleCandidate> couriers;
    for (const auto& c : state.available_committed)
        couriers.push_back({CourierType::Committed, c.id, c.location});
    for (const auto& c : state.present_occasional)
        couriers.push_back({CourierType::Occasional, c.id, c.location});

    double base = 0.0;  // every expiring request starts out lost
    for (const auto& r : state.present_requests)
        if (r.deadline_epoch == state.epoch) base -= econ.lost_penalty;

    std::vector<bool> used(couriers.size(), false);
    double best = 0.0;
    search(state.present_requests, couriers, used, 0, 0.0, econ, state.epoch, best);
    return base + best;
}

FixtureState random_fixture(RngStream& rng, const EpisodeConfig& cfg,
                            const WorldMap& world, int epoch) {
    FixtureState f;
    f.epoch = epoch;
    const auto point = [&]() -> Location {
        return {rng.uniform(0.0, world.extent), rng.uniform(0.0, world.extent)};
    };

    const int n_committed = rng.uniform_int(7);
    for (int i = 0; i < n_committed; ++i) {
        CommittedCourier c;
        c.id = i;
        c.shift_start = std::max(0, epoch - rng.uniform_int(20));
        c.shift_end = epoch + 1 + rng.uniform_int(30);
        if (rng.bernoulli(0.4)) c.shift_end = epoch + 1;  // extension-eligible
        c.location = point();
        if (rng.bernoulli(0.3)) {
            c.busy = true;
            c.busy_until = epoch + rng.uniform(0.2, 3.0);
        }
        if (rng.bernoulli(0.25)) {
            c.extension_pay_until = epoch + 1 + rng.uniform_int(cfg.extension.periods);
            c.extension_active = true;
            c.extensions_accepted = 1;
            c.shift_end = std::max(c.shift_end, c.extension_pay_until + 1);
        }
        f.committed.push_back(c);
    }

    const int n_occasional = rng.uniform_int(6);
    for (int i = 0; i < n_occasional; ++i) {
        OccasionalCourier c;
        c.id = i;
        c.arrival_epoch = std::max(0, epoch - rng.uniform_int(2));
        c.patience_periods = (epoch - c.arrival_epoch) + 1 + rng.uniform_int(3);
        c.location = point();
        f.occasional.push_back(c);
    }

    const int n_requests = rng.uniform_int(6);
    for (int i = 0; i < n_requests; ++i) {
        Request r;
        r.id = i;
        r.arrival_epoch = std::max(0, epoch - rng.uniform_int(3));
        r.deadline_epoch = epoch + rng.uniform_int(cfg.assignment_window + 1);
        r.pickup = world.pickup_points[rng.uniform_int(
            static_cast<int>(world.pickup_points.size()))];
        r.delivery = world.delivery_points[rng.uniform_int(
            static_cast<int>(world.delivery_points.size()))];
        r.revenue = cfg.economics.revenue_per_request;
        f.requests.push_back(r);
    }
    return f;
}

std::array<std::array<double, 2>, 2> ToyMdp::optimal_q(double gamma, int sweeps) const {
    std::array<std::array<double, 2>, 2> q{{{0.0, 0.0}, {0.0, 0.0}}};
    for (int i = 0; i < sweeps; ++i) {
        auto next = q;
        for (int s = 0; s < 2; ++s)
            for (int a = 0; a < 2; ++a)
                next[s][a] = rewards[s][a] + gamma * std::max(q[a][0], q[a][1]);
        q = next;
    }
    return q;
}

std::vector<double> ToyMdp::features(int state) {
    return state == 0 ? std::vector<double>{1.0, 0.0} : std::vector<double>{0.0, 1.0};
}

MlpParams finite_difference_gradient(const MlpParams& params,
                                     const std::vector<std::vector<double>>& inputs,
                                     const std::vector<int>& actions,
                                     const std::vector<double>& targets, double h) {
    const auto loss_at = [&](const MlpParams& p) {
        return mse_loss_and_gradient(p, inputs, actions, targets).loss;
    };
    MlpParams numeric = zeros_like(params);
    MlpParams probe = params;
    for (size_t l = 0; l < params.layers.size(); ++l) {
        auto& w = probe.layers[l].weights.data;
        for (size_t i = 0; i < w.size(); ++i) {
            const double saved = w[i];
            w[i] = saved + h;
            const double up = loss_at(probe);
            w[i] = saved - h;
            const double down = loss_at(probe);
            w[i] = saved;
            numeric.layers[l].weights.data[i] = (up - down) / (2.0 * h);
        }
        auto& b = probe.layers[l].biases;
        for (size_t i = 0; i < b.size(); ++i) {
            const double saved = b[i];
            b[i] = saved + h;
            const double up = loss_at(probe);
            b[i] = saved - h;
            const double down = loss_at(probe);
            b[i] = saved;
            numeric.layers[l].biases[i] = (up - down) / (2.0 * h);
        }
    }
    return numeric;
}

std::string check_transition(const SystemState& pre, const TransitionOutcome& out) {
    const auto& d = out.diag;
    const auto ids_of = [](const auto& entities) {
        std::set<int> ids;
        for (const auto& e : entities) ids.insert(e.id);
        return ids;
    };
    const auto to_set = [](const std::vector<int>& v) {
        return std::set<int>(v.begin(), v.end());
    };
    const auto describe = [](const char* what, const std::set<int>& expected,
                             const std::set<int>& actual) {
        std::string msg = std::string(what) + " mismatch: expected {";
        for (int id : expected) msg += std::to_string(id) + " ";
        msg += "} got {";
        for (int id : actual) msg += std::to_string(id) + " ";
        return msg + "}";
    };

    // Reward decomposition.
    if (std::abs(out.reward - d.reward_sum()) > 1e-9)
        return "reward does not equal the sum of its components";

    // Committed availability: start from the pre-state set, drop the newly
    // busy, add shift starts and busy releases, then drop finished shifts.
    std::set<int> expected = ids_of(pre.available_committed);
    for (int id : d.committed_now_busy) expected.erase(id);
    for (int id : d.committed_started) expected.insert(id);
    for (int id : d.committed_released) expected.insert(id);
    for (int id : d.committed_ended) expected.erase(id);
    const auto actual_avail = ids_of(out.next_state.available_committed);
    if (expected != actual_avail)
        return describe("available committed", expected, actual_avail);

    // Occasional presence.
    std::set<int> expected_occ = ids_of(pre.present_occasional);
    for (int id : d.occasional_assigned) expected_occ.erase(id);
    for (int id : d.occasional_abandoned) expected_occ.erase(id);
    for (int id : d.occasional_arrived) expected_occ.insert(id);
    const auto actual_occ = ids_of(out.next_state.present_occasional);
    if (expected_occ != actual_occ)
        return describe("present occasional", expected_occ, actual_occ);

    // Request presence.
    std::set<int> expected_req = ids_of(pre.present_requests);
    for (int id : d.requests_assigned) expected_req.erase(id);
    for (int id : d.requests_lost) expected_req.erase(id);
    for (int id : d.requests_arrived) expected_req.insert(id);
    const auto actual_req = ids_of(out.next_state.present_requests);
    if (expected_req != actual_req)
        return describe("present requests", expected_req, actual_req);

    // Assigned and lost sets are disjoint; nothing is double-counted.
    for (int id : d.requests_lost)
        if (to_set(d.requests_assigned).count(id))
            return "request both assigned and lost in one step";

    // Conservation: every request generated so far is present, assigned or lost.
    const auto& ns = out.next_state;
    const long accounted = static_cast<long>(ns.present_requests.size()) +
                           ns.total_assigned_committed + ns.total_assigned_occasional +
                           ns.total_lost;
    if (accounted != ns.total_requests_arrived)
        return "request conservation violated: " + std::to_string(accounted) +
               " accounted of " + std::to_string(ns.total_requests_arrived);

    // Counter increments match the reported deltas.
    if (ns.total_lost != pre.total_lost + d.lost_now)
        return "lost counter does not advance by the losses in this step";
    if (ns.total_extensions_accepted !=
        pre.total_extensions_accepted + d.extensions_accepted)
        return "extension counter does not advance by the acceptances in this step";
    return "";
}

double max_relative_gradient_error(const MlpParams& analytic, const MlpParams& numeric) {
    double worst = 0.0;
    const auto compare = [&](double a, double n) {
        const double denom = std::max({std::abs(a), std::abs(n), 1e-8});
        worst = std::max(worst, std::abs(a - n) / denom);
    };
    for (size_t l = 0; l < analytic.layers.size(); ++l) {
        for (size_t i = 0; i < analytic.layers[l].weights.data.size(); ++i)
            compare(analytic.layers[l].weights.data[i],
                    numeric.layers[l].weights.data[i]);
        for (size_t i = 0; i < analytic.layers[l].biases.size(); ++i)
            compare(analytic.layers[l].biases[i], numeric.layers[l].biases[i]);
    }
    return worst;
}

}  // namespace courier::testing
