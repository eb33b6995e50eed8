#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "susco/errors.hpp"
#include "susco/geo.hpp"
#include "susco/power.hpp"

namespace susco {

inline constexpr double kMbPerGb = 8000.0;

struct UtilityWeights {
    double energy = 0.3;
    double delay = 0.4;
    double life = 0.3;
};

struct Task {
    TaskId id = 0;
    SatelliteId source_sat = 0;
    SatelliteId dest_sat = 0;
    double delay_req_ms = 0.0;
    double bandwidth_req_mbps = 0.0;
    double data_mb = 0.0;
    double budget = 0.0;
};

struct Bid {
    DishId dish = 0;
    double tail_latency_ms = 0.0;  // dish -> task destination, terrestrial
    double bandwidth_mbps = 0.0;
    double capacity_mb = 0.0;
    double declared_cost = 0.0;
    SatelliteId offload_sat = 0;
    double gsl_latency_ms = 0.0;  // offload satellite -> dish
};

using GroupKey = std::vector<DishId>;

inline std::string key_string(const GroupKey& k) {
    std::string s;
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (i) s += ';';
        s += std::to_string(k[i]);
    }
    return s;
}

struct CollaboratorGroup {
    std::vector<Bid> bids;  // sorted by dish id, dishes distinct
    GroupKey key;
    double total_cost = 0.0;
    double total_capacity_mb = 0.0;
    double total_bandwidth_mbps = 0.0;
    double utility_energy = 0.0;
    double utility_delay = 0.0;
    double utility_life = 0.0;
    double utility_total = 0.0;
    double utility = 0.0;  // discounted; what selection sees
};

inline CollaboratorGroup make_group(std::vector<Bid> bids) {
    std::sort(bids.begin(), bids.end(), [](const Bid& a, const Bid& b) { return a.dish < b.dish; });
    CollaboratorGroup g;
    g.bids = std::move(bids);
    for (const auto& b : g.bids) {
        g.key.push_back(b.dish);
        g.total_cost += b.declared_cost;
        g.total_capacity_mb += b.capacity_mb;
        g.total_bandwidth_mbps += b.bandwidth_mbps;
    }
    return g;
}

// Reservation price for taking capacity_mb at the given downlink bandwidth.
inline double dish_cost(double capacity_mb, double bandwidth_mbps, double price_per_gb,
                        double price_per_second) {
    return price_per_gb * capacity_mb / kMbPerGb + price_per_second * capacity_mb / bandwidth_mbps;
}

struct PathNode {
    SatelliteId sat = 0;
    double epsilon_j_per_mb = 0.08;
    BatteryState battery;
};

// Frozen per-task view the utility formulas read: the original route, its hop
// latencies, and the batteries along it. A bid's ground route is the strict
// prefix of the original path ending at its offload satellite.
struct UtilityContext {
    std::vector<PathNode> path;
    std::vector<double> hop_latency_ms;  // path.size() - 1 entries
    double traffic_mb = 0.0;
    UtilityWeights weights;
    double price_per_gb = 0.09;
    double price_per_second = 0.17;

    // Number of path nodes on the bid's prefix. Strictly less than |path|.
    int prefix_len(const Bid& b) const {
        for (std::size_t i = 0; i + 1 < path.size(); ++i)
            if (path[i].sat == b.offload_sat) return int(i) + 1;
        throw UtilityUndefined("offload satellite not on the route prefix");
    }

    double prefix_hop_latency_ms(int plen) const {
        double s = 0.0;
        for (int i = 0; i + 1 < plen; ++i) s += hop_latency_ms[std::size_t(i)];
        return s;
    }
};

// Full ground-route delay of one bid: prefix hops, then the down-link, then
// the terrestrial tail to the destination.
inline double dish_delay_ms(const UtilityContext& ctx, const Bid& b) {
    return ctx.prefix_hop_latency_ms(ctx.prefix_len(b)) + b.gsl_latency_ms + b.tail_latency_ms;
}

// Shares proportional to offered capacity. Group capacity covers the task, so
// no share exceeds its bid's capacity.
inline std::vector<double> split_traffic(const CollaboratorGroup& g, double traffic_mb) {
    std::vector<double> shares(g.bids.size(), 0.0);
    double cap = g.total_capacity_mb;
    if (cap <= 0.0) return shares;
    for (std::size_t k = 0; k < g.bids.size(); ++k)
        shares[k] = traffic_mb * g.bids[k].capacity_mb / cap;
    return shares;
}

inline double utility_energy(const UtilityContext& ctx, const CollaboratorGroup& g,
                             const std::vector<double>& splits) {
    double e_sat = 0.0;
    for (const auto& node : ctx.path) e_sat += ctx.traffic_mb * node.epsilon_j_per_mb;
    if (e_sat <= 0.0) throw UtilityUndefined("original path consumes no energy");
    double e_grd = 0.0;
    for (std::size_t k = 0; k < g.bids.size(); ++k) {
        int plen = ctx.prefix_len(g.bids[k]);
        for (int i = 0; i < plen; ++i)
            e_grd += splits[k] * ctx.path[std::size_t(i)].epsilon_j_per_mb;
    }
    return (e_sat - e_grd) / e_sat;
}

inline double utility_delay(const UtilityContext& ctx, const CollaboratorGroup& g) {
    double d_sat = 0.0;
    for (double h : ctx.hop_latency_ms) d_sat += h;
    if (d_sat <= 0.0) throw UtilityUndefined("original path has no latency");
    double d_grd = 0.0;
    for (const auto& b : g.bids) d_grd = std::fmax(d_grd, dish_delay_ms(ctx, b));
    return (d_sat - d_grd) / d_sat;
}

// Wear cost the satellite at `node` would take from carrying traffic_mb.
inline double node_life_cost(const PathNode& node, double traffic_mb) {
    const BatteryState& b = node.battery;
    double drop = traffic_mb * node.epsilon_j_per_mb / b.capacity_j;
    double k = wear_increment(b.level, std::fmax(0.0, b.level - drop), b.wear_shape);
    return service_life_cost(k, b);
}

inline double utility_life(const UtilityContext& ctx, const CollaboratorGroup& g,
                           const std::vector<double>& splits) {
    double denom = 0.0;
    for (const auto& node : ctx.path) denom += node_life_cost(node, ctx.traffic_mb);
    if (std::isinf(denom)) {
        // A dead battery somewhere makes the scale meaningless; saving any
        // dead-battery hop is maximal, saving none of them is worthless.
        for (std::size_t k = 0; k < g.bids.size(); ++k) {
            int plen = ctx.prefix_len(g.bids[k]);
            for (std::size_t i = std::size_t(plen); i < ctx.path.size(); ++i)
                if (ctx.path[i].battery.life <= 0.0) return 1.0;
        }
        return 0.0;
    }
    if (denom <= 0.0) return 0.0;
    double numer = 0.0;
    for (std::size_t k = 0; k < g.bids.size(); ++k) {
        int plen = ctx.prefix_len(g.bids[k]);
        for (std::size_t i = std::size_t(plen); i < ctx.path.size(); ++i)
            numer += node_life_cost(ctx.path[i], splits[k]);
    }
    return numer / denom;
}

inline double total_utility(const UtilityWeights& w, double u_energy, double u_delay,
                            double u_life) {
    return w.energy * u_energy + w.delay * u_delay + w.life * u_life;
}

struct DishReputation {
    double failure = 0.0;      // estimated failure probability
    std::int64_t wins = 0;
};

using ReputationBook = std::map<DishId, DishReputation>;

inline double discounted_utility(double total, const CollaboratorGroup& g,
                                 const ReputationBook& reps) {
    double d = total;
    for (const auto& b : g.bids) {
        auto it = reps.find(b.dish);
        if (it != reps.end()) d *= (1.0 - it->second.failure);
    }
    return d;
}

// Running failure frequency over the dish's wins; non-winners keep history.
inline void update_failure(DishReputation& rep, bool won_last_interval, bool failed) {
    if (!won_last_interval) return;
    rep.failure = (rep.failure * double(rep.wins) + (failed ? 1.0 : 0.0)) / double(rep.wins + 1);
    rep.wins += 1;
}

// Fills the utility fields of a group from the context and reputations.
inline void compute_group_utilities(const UtilityContext& ctx, CollaboratorGroup& g,
                                    const ReputationBook& reps) {
    auto splits = split_traffic(g, ctx.traffic_mb);
    g.utility_energy = utility_energy(ctx, g, splits);
    g.utility_delay = utility_delay(ctx, g);
    g.utility_life = utility_life(ctx, g, splits);
    g.utility_total = total_utility(ctx.weights, g.utility_energy, g.utility_delay, g.utility_life);
    g.utility = discounted_utility(g.utility_total, g, reps);
}

// ---- candidate group construction --------------------------------------------

// Layered construction before the budget screen: per-dish delay filter,
// singleton layer, then rounds of pairwise merges over the `layer_width`
// cheapest groups of the previous layer (disjoint dish sets only), finally the
// capacity and bandwidth screens over the accumulated candidates.
inline std::vector<CollaboratorGroup> construct_groups_unbudgeted(const Task& task,
                                                                  const std::vector<Bid>& bids,
                                                                  int rounds, int layer_width,
                                                                  const UtilityContext& ctx) {
    std::vector<Bid> filtered;
    for (const auto& b : bids)
        if (dish_delay_ms(ctx, b) <= task.delay_req_ms) filtered.push_back(b);
    std::sort(filtered.begin(), filtered.end(),
              [](const Bid& a, const Bid& b) { return a.dish < b.dish; });

    std::map<GroupKey, CollaboratorGroup> all;
    std::vector<CollaboratorGroup> layer;
    for (const auto& b : filtered) {
        CollaboratorGroup g = make_group({b});
        all.emplace(g.key, g);
        layer.push_back(std::move(g));
    }

    for (int n = 2; n <= rounds; ++n) {
        std::sort(layer.begin(), layer.end(), [](const CollaboratorGroup& a,
                                                 const CollaboratorGroup& b) {
            if (a.total_cost != b.total_cost) return a.total_cost < b.total_cost;
            return a.key < b.key;
        });
        if (int(layer.size()) > layer_width) layer.resize(std::size_t(layer_width));

        std::vector<CollaboratorGroup> next;
        for (std::size_t i = 0; i < layer.size(); ++i) {
            for (std::size_t j = i + 1; j < layer.size(); ++j) {
                std::set<DishId> dishes(layer[i].key.begin(), layer[i].key.end());
                bool disjoint = true;
                for (DishId d : layer[j].key)
                    if (!dishes.insert(d).second) disjoint = false;
                if (!disjoint) continue;
                std::vector<Bid> merged = layer[i].bids;
                merged.insert(merged.end(), layer[j].bids.begin(), layer[j].bids.end());
                CollaboratorGroup g = make_group(std::move(merged));
                if (all.emplace(g.key, g).second) next.push_back(std::move(g));
            }
        }
        layer = std::move(next);
    }

    std::vector<CollaboratorGroup> out;
    for (auto& [key, g] : all) {
        if (g.total_capacity_mb < task.data_mb) continue;
        if (g.total_bandwidth_mbps < task.bandwidth_req_mbps) continue;
        out.push_back(std::move(g));
    }
    return out;  // map iteration leaves this sorted by key
}

inline std::vector<CollaboratorGroup> construct_groups(const Task& task,
                                                       const std::vector<Bid>& bids, int rounds,
                                                       int layer_width,
                                                       const UtilityContext& ctx) {
    auto groups = construct_groups_unbudgeted(task, bids, rounds, layer_width, ctx);
    std::erase_if(groups,
                  [&](const CollaboratorGroup& g) { return g.total_cost > task.budget; });
    return groups;
}

// ---- selection and payment ----------------------------------------------------

// Selection counters, keyed by the sorted dish tuple, persisted across
// intervals. Any key reads as at least 1 so the exploration term is finite.
class GroupStats {
public:
    std::int64_t count(const GroupKey& key) const {
        auto it = counts_.find(key);
        return it == counts_.end() ? 1 : it->second;
    }
    void record_selection(const GroupKey& key) {
        // A fresh key starts at the initial 1, then counts this selection.
        counts_.try_emplace(key, 1).first->second += 1;
    }
    const std::map<GroupKey, std::int64_t>& raw() const { return counts_; }

private:
    std::map<GroupKey, std::int64_t> counts_;
};

inline double exploration_bonus(double n_sum, std::int64_t n) {
    return std::sqrt(2.0 * n_sum / double(n));
}

inline double selection_score(double utility, double cost, double n_sum, std::int64_t n) {
    double ratio = cost > 0.0 ? utility / cost : std::numeric_limits<double>::infinity();
    return ratio + exploration_bonus(n_sum, n);
}

struct Award {
    TaskId task = 0;
    GroupKey group;
    double group_payment = 0.0;
    std::map<DishId, double> dish_payments;
};

enum class SelectionOutcome { awarded, no_groups, no_positive_utility, no_affordable };

struct SelectionResult {
    SelectionOutcome outcome = SelectionOutcome::no_groups;
    std::optional<Award> award;
    int winner_index = -1;  // into the groups vector passed in
};

inline const char* outcome_name(SelectionOutcome o) {
    switch (o) {
        case SelectionOutcome::awarded: return "awarded";
        case SelectionOutcome::no_groups: return "no_groups";
        case SelectionOutcome::no_positive_utility: return "no_positive_utility";
        case SelectionOutcome::no_affordable: return "no_affordable";
    }
    return "unknown";
}

inline std::map<DishId, double> proportional_shares(const CollaboratorGroup& g, double payment) {
    std::map<DishId, double> shares;
    if (g.total_cost > 0.0) {
        // Split as declared cost plus a proportional cut of the surplus: adding
        // the non-negative cut cannot round below the declared cost, so each
        // dish's payment covers its declaration exactly, not just within an ulp.
        double surplus = std::fmax(0.0, payment - g.total_cost);
        for (const auto& b : g.bids)
            shares[b.dish] = b.declared_cost + b.declared_cost / g.total_cost * surplus;
    } else {
        for (const auto& b : g.bids) shares[b.dish] = payment / double(g.bids.size());
    }
    return shares;
}

// One task's score-guided selection with its payment. Does not mutate stats;
// the caller commits the winner with stats.record_selection.
inline SelectionResult select_winner(const Task& task,
                                     const std::vector<CollaboratorGroup>& groups,
                                     const GroupStats& stats) {
    SelectionResult res;
    if (groups.empty()) return res;

    std::vector<int> remaining(groups.size());
    for (std::size_t i = 0; i < groups.size(); ++i) remaining[int(i)] = int(i);

    bool any_positive = false;
    for (const auto& g : groups) any_positive |= g.utility > 0.0;
    if (!any_positive) {
        res.outcome = SelectionOutcome::no_positive_utility;
        return res;
    }

    while (!remaining.empty()) {
        double total_n = 0.0;
        for (int i : remaining) total_n += double(stats.count(groups[std::size_t(i)].key));
        double n_sum = std::fmax(0.0, std::log(total_n));

        int best = -1;
        double best_score = -std::numeric_limits<double>::infinity();
        for (int i : remaining) {
            const auto& g = groups[std::size_t(i)];
            if (g.utility <= 0.0) continue;
            double s = selection_score(g.utility, g.total_cost, n_sum, stats.count(g.key));
            if (best < 0 || s > best_score ||
                (s == best_score && g.key < groups[std::size_t(best)].key)) {
                best = i;
                best_score = s;
            }
        }
        if (best < 0) break;  // only non-positive utilities remain

        std::erase(remaining, best);
        const auto& w = groups[std::size_t(best)];
        double bonus_w = exploration_bonus(n_sum, stats.count(w.key));

        double total_n2 = 0.0;
        for (int i : remaining) total_n2 += double(stats.count(groups[std::size_t(i)].key));
        double n_sum2 = remaining.empty() ? 0.0 : std::fmax(0.0, std::log(total_n2));

        double runner_up = -std::numeric_limits<double>::infinity();
        bool have_competition = false;
        for (int i : remaining) {
            const auto& g = groups[std::size_t(i)];
            if (g.utility <= 0.0) continue;
            have_competition = true;
            runner_up = std::fmax(
                runner_up, selection_score(g.utility, g.total_cost, n_sum2, stats.count(g.key)));
        }

        double payment;
        if (have_competition) {
            payment = (w.utility + w.total_cost * bonus_w) / runner_up;
        } else {
            // No remaining competitor defines the bar; bounded by the budget.
            payment = std::fmin(task.budget, w.total_cost * (1.0 + bonus_w));
        }

        if (payment <= task.budget) {
            Award award;
            award.task = task.id;
            award.group = w.key;
            award.group_payment = payment;
            award.dish_payments = proportional_shares(w, payment);
            res.outcome = SelectionOutcome::awarded;
            res.award = std::move(award);
            res.winner_index = best;
            return res;
        }
    }
    res.outcome = SelectionOutcome::no_affordable;
    return res;
}

// ---- audit helpers --------------------------------------------------------------

// The payment rule is the posted price of the committed allocation: a winning
// dish that re-declared any cost at or below its payment keeps winning at the
// same payment, and any declaration above it loses. This is the allocation
// predicate the critical-value audit bisects over.
inline bool wins_at_declaration(const Award& committed, DishId dish, double declared_cost) {
    auto it = committed.dish_payments.find(dish);
    if (it == committed.dish_payments.end()) return false;
    return declared_cost <= it->second;
}

// Realized profit of `dish` with true cost `true_cost` when it unilaterally
// declares `declared_cost` against an otherwise-truthful committed outcome.
inline double misreport_profit(const SelectionResult& committed, DishId dish, double true_cost,
                               double declared_cost) {
    if (!committed.award) return 0.0;
    if (!wins_at_declaration(*committed.award, dish, declared_cost)) return 0.0;
    return committed.award->dish_payments.at(dish) - true_cost;
}

// Threshold declaration at which the target dish's group flips from winning to
// losing, located by bisection over a uniform scaling of that dish's declared
// cost. Lands on the dish's payment.
inline double critical_value(const Task& task, const std::vector<CollaboratorGroup>& groups,
                             const GroupStats& stats, std::size_t winner_index,
                             std::size_t dish_index) {
    SelectionResult committed = select_winner(task, groups, stats);
    if (!committed.award || committed.winner_index != int(winner_index))
        throw InvalidConfig("critical_value requires the target group to win");
    const auto& g = groups[winner_index];
    const Bid& bid = g.bids.at(dish_index);
    double c = bid.declared_cost;
    if (c <= 0.0) c = 1.0;  // scale a nominal unit when the declaration is zero

    double lo = 0.0, hi = 1.0;
    while (wins_at_declaration(*committed.award, bid.dish, hi * c) && hi < 1e12) hi *= 2.0;
    for (int iter = 0; iter < 200; ++iter) {
        double mid = 0.5 * (lo + hi);
        if (wins_at_declaration(*committed.award, bid.dish, mid * c))
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-12 * std::fmax(1.0, hi)) break;
    }
    return 0.5 * (lo + hi) * c;
}

// ---- constraint checking ---------------------------------------------------------

struct ConstraintViolation {
    TaskId task = 0;
    std::string constraint;
    std::string detail;
};

struct ConstraintReport {
    std::vector<ConstraintViolation> violations;
    bool ok() const { return violations.empty(); }
};

inline void check_one_award(const Task& task, const std::vector<CollaboratorGroup>& groups,
                            const UtilityContext& ctx, const Award& award,
                            ConstraintReport& report) {
    auto add = [&](const char* c, const std::string& d) {
        report.violations.push_back({task.id, c, d});
    };
    const CollaboratorGroup* g = nullptr;
    for (const auto& cand : groups)
        if (cand.key == award.group) g = &cand;
    if (g == nullptr) {
        add("known-group", "award references a group absent from the candidate set");
        return;
    }
    for (const auto& b : g->bids) {
        if (dish_delay_ms(ctx, b) > task.delay_req_ms)
            add("delay-requirement", "dish " + std::to_string(b.dish) + " exceeds the delay bound");
    }
    if (g->total_bandwidth_mbps < task.bandwidth_req_mbps)
        add("bandwidth-requirement", "group bandwidth below the task requirement");
    if (g->total_capacity_mb < task.data_mb)
        add("data-requirement", "group capacity below the task data amount");
    if (award.group_payment > task.budget * (1.0 + 1e-12))
        add("budget", "group payment exceeds the task budget");

    double share_sum = 0.0;
    for (const auto& b : g->bids) {
        auto it = award.dish_payments.find(b.dish);
        if (it == award.dish_payments.end()) {
            add("payment-covers-cost", "dish " + std::to_string(b.dish) + " has no payment");
            continue;
        }
        share_sum += it->second;
        if (it->second < b.declared_cost - 1e-9)
            add("payment-covers-cost",
                "dish " + std::to_string(b.dish) + " paid below its declared cost");
    }
    double tol = 1e-9 * std::fmax(1.0, std::fabs(award.group_payment));
    if (std::fabs(share_sum - award.group_payment) > tol)
        add("payment-split", "per-dish payments do not sum to the group payment");
}

inline ConstraintReport check_cdgs_constraints(
    const std::vector<Task>& tasks,
    const std::map<TaskId, std::vector<CollaboratorGroup>>& groups_by_task,
    const std::map<TaskId, UtilityContext>& ctx_by_task, const std::vector<Award>& awards) {
    ConstraintReport report;
    std::set<TaskId> seen;
    for (const auto& a : awards) {
        if (!seen.insert(a.task).second)
            report.violations.push_back({a.task, "one-group-per-task", "task awarded twice"});
        const Task* task = nullptr;
        for (const auto& t : tasks)
            if (t.id == a.task) task = &t;
        if (task == nullptr) {
            report.violations.push_back({a.task, "known-task", "award references unknown task"});
            continue;
        }
        check_one_award(*task, groups_by_task.at(a.task), ctx_by_task.at(a.task), a, report);
    }
    return report;
}

}  // namespace susco
