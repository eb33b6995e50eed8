#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "susco/auction.hpp"
#include "susco/csv.hpp"
#include "susco/rng.hpp"

// Self-checking harness for the mechanism: generates randomized auction
// instances through the real utility pipeline and verifies the properties the
// mechanism promises (individual rationality, budget feasibility, constraint
// conformance, misreport-proofness, critical-value consistency). A fault hook
// lets callers prove the harness actually detects violations.

namespace susco::audit {

struct AuditedTask {
    Task task;
    UtilityContext ctx;
    std::vector<Bid> bids;
};

struct Instance {
    std::vector<AuditedTask> tasks;
    ReputationBook reputations;
    GroupStats stats;
};

struct AuditOptions {
    std::int64_t instances = 10000;
    std::uint64_t seed = 1;
    bool check_constraints = true;
    bool check_misreports = false;
    bool check_critical_values = false;
    int misreport_grid = 20;
    // Fault hook: shave this amount off one winning dish's payment before the
    // constraint check. A working auditor must flag it.
    double inject_underpayment = 0.0;
    std::string reproducer_path;  // first violating instance is dumped here
};

struct AuditCounters {
    std::int64_t instances = 0;
    std::int64_t tasks = 0;
    std::int64_t awards = 0;
    std::int64_t constraint_checks = 0;
    std::int64_t misreport_trials = 0;
    std::int64_t critical_checks = 0;
    std::int64_t monotonicity_checks = 0;
    std::int64_t violations = 0;
    std::string first_violation;
    bool ok() const { return violations == 0; }
};

inline Instance random_instance(Rng& rng) {
    Instance inst;
    int n_tasks = int(rng.uniform_int(1, 3));
    DishId next_dish = 0;
    for (int ti = 0; ti < n_tasks; ++ti) {
        AuditedTask at;
        int path_len = int(rng.uniform_int(3, 6));
        for (int i = 0; i < path_len; ++i) {
            PathNode node;
            node.sat = SatelliteId(100 * (ti + 1) + i);
            node.epsilon_j_per_mb = rng.uniform(0.04, 0.12);
            node.battery.capacity_j = 3.6e6;
            node.battery.level = rng.uniform(0.3, 0.95) * node.battery.capacity_j;
            node.battery.life_max = 5.0;
            node.battery.life = rng.uniform(1.0, 5.0);
            node.battery.wear_shape = rng.uniform(0.8, 1.3);
            at.ctx.path.push_back(node);
        }
        for (int i = 0; i < path_len; ++i) at.ctx.hop_latency_ms.push_back(rng.uniform(3.0, 15.0));
        at.ctx.traffic_mb = rng.uniform(500.0, 5000.0);

        int n_bids = int(rng.uniform_int(3, 10));
        double max_gamma = 0.0, sum_cap = 0.0, min_delay = 1e300;
        for (int i = 0; i < n_bids; ++i) {
            Bid b;
            b.dish = next_dish++;
            b.offload_sat = at.ctx.path[std::size_t(rng.uniform_int(0, path_len - 2))].sat;
            b.gsl_latency_ms = rng.uniform(2.0, 8.0);
            b.tail_latency_ms = rng.uniform(5.0, 40.0);
            b.bandwidth_mbps = rng.uniform(100.0, 600.0);
            b.capacity_mb = rng.uniform(0.3, 1.0) * b.bandwidth_mbps * 60.0;
            b.declared_cost = dish_cost(b.capacity_mb, b.bandwidth_mbps, at.ctx.price_per_gb,
                                        at.ctx.price_per_second);
            max_gamma = std::fmax(max_gamma, b.bandwidth_mbps);
            sum_cap += b.capacity_mb;
            min_delay = std::fmin(min_delay, dish_delay_ms(at.ctx, b));
            at.bids.push_back(b);
            if (rng.uniform01() < 0.25) {
                DishReputation rep;
                rep.wins = rng.uniform_int(1, 5);
                rep.failure = rng.uniform(0.0, 0.6);
                inst.reputations[b.dish] = rep;
            }
        }

        Task& t = at.task;
        t.id = TaskId(ti + 1);
        t.source_sat = at.ctx.path.front().sat;
        t.dest_sat = at.ctx.path.back().sat;
        t.delay_req_ms = min_delay * rng.uniform(0.9, 2.0);
        t.bandwidth_req_mbps = rng.uniform(0.2, 1.2) * max_gamma;
        t.data_mb = rng.uniform(0.1, 0.8) * sum_cap;
        t.budget = 0.0;  // resolved after group construction
        inst.tasks.push_back(std::move(at));
    }
    return inst;
}

inline std::string serialize_instance(const Instance& inst) {
    std::ostringstream o;
    o << "tasks " << inst.tasks.size() << "\n";
    for (const auto& at : inst.tasks) {
        const Task& t = at.task;
        o << "task id=" << t.id << " src=" << t.source_sat << " dst=" << t.dest_sat
          << " delay=" << format_double(t.delay_req_ms)
          << " bw=" << format_double(t.bandwidth_req_mbps)
          << " data=" << format_double(t.data_mb) << " budget=" << format_double(t.budget)
          << "\n";
        o << "ctx traffic=" << format_double(at.ctx.traffic_mb)
          << " prices=" << format_double(at.ctx.price_per_gb) << "/"
          << format_double(at.ctx.price_per_second) << "\n";
        for (const auto& n : at.ctx.path)
            o << "node sat=" << n.sat << " eps=" << format_double(n.epsilon_j_per_mb)
              << " level=" << format_double(n.battery.level)
              << " life=" << format_double(n.battery.life)
              << " life_max=" << format_double(n.battery.life_max)
              << " shape=" << format_double(n.battery.wear_shape)
              << " cap=" << format_double(n.battery.capacity_j) << "\n";
        o << "hops";
        for (double h : at.ctx.hop_latency_ms) o << ' ' << format_double(h);
        o << "\n";
        for (const auto& b : at.bids)
            o << "bid dish=" << b.dish << " off=" << b.offload_sat
              << " gsl=" << format_double(b.gsl_latency_ms)
              << " tail=" << format_double(b.tail_latency_ms)
              << " bw=" << format_double(b.bandwidth_mbps)
              << " cap=" << format_double(b.capacity_mb)
              << " cost=" << format_double(b.declared_cost) << "\n";
    }
    for (const auto& [dish, rep] : inst.reputations)
        o << "rep dish=" << dish << " f=" << format_double(rep.failure) << " wins=" << rep.wins
          << "\n";
    for (const auto& [key, count] : inst.stats.raw())
        o << "stats key=" << key_string(key) << " count=" << count << "\n";
    return o.str();
}

namespace detail {

inline void record_violation(AuditCounters& c, const AuditOptions& opts, const Instance& inst,
                             const std::string& what) {
    c.violations += 1;
    if (!c.first_violation.empty()) return;
    c.first_violation = what;
    if (!opts.reproducer_path.empty())
        write_text_file(opts.reproducer_path, "violation: " + what + "\n" +
                                                  serialize_instance(inst));
}

}  // namespace detail

inline AuditCounters run_audit(const AuditOptions& opts) {
    AuditCounters counters;
    Rng rng(derive_seed(opts.seed, {0x61756474ull}));  // audit stream
    for (std::int64_t it = 0; it < opts.instances; ++it) {
        Instance inst = random_instance(rng);
        counters.instances += 1;

        std::vector<Task> tasks;
        std::map<TaskId, std::vector<CollaboratorGroup>> group_sets;
        std::map<TaskId, UtilityContext> contexts;
        std::vector<Award> awards;
        struct AwardDetail {
            SelectionResult result;
            const AuditedTask* at;
            std::vector<CollaboratorGroup> groups;
            GroupStats stats;  // as seen by this selection, before it was recorded
        };
        std::vector<AwardDetail> details;

        for (auto& at : inst.tasks) {
            counters.tasks += 1;
            auto unpriced = construct_groups_unbudgeted(at.task, at.bids, 2, 10, at.ctx);
            if (unpriced.empty()) {
                tasks.push_back(at.task);
                contexts.emplace(at.task.id, at.ctx);
                group_sets.emplace(at.task.id, std::move(unpriced));
                continue;
            }
            double min_cost = 1e300;
            for (const auto& g : unpriced) min_cost = std::fmin(min_cost, g.total_cost);
            at.task.budget = min_cost * rng.uniform(0.5, 4.0);

            auto groups = construct_groups(at.task, at.bids, 2, 10, at.ctx);
            for (auto& g : groups) compute_group_utilities(at.ctx, g, inst.reputations);
            auto res = select_winner(at.task, groups, inst.stats);
            tasks.push_back(at.task);
            contexts.emplace(at.task.id, at.ctx);
            if (res.outcome == SelectionOutcome::awarded) {
                counters.awards += 1;
                awards.push_back(*res.award);
                details.push_back({res, &at, groups, inst.stats});
                inst.stats.record_selection(res.award->group);
            }
            group_sets.emplace(at.task.id, std::move(groups));
        }

        if (opts.check_constraints) {
            counters.constraint_checks += 1;
            if (opts.inject_underpayment > 0.0 && !awards.empty() &&
                !awards.front().dish_payments.empty()) {
                awards.front().dish_payments.begin()->second -= opts.inject_underpayment;
            }
            auto report = check_cdgs_constraints(tasks, group_sets, contexts, awards);
            if (!report.ok()) {
                std::ostringstream what;
                const auto& v = report.violations.front();
                what << "constraint " << v.constraint << " on task " << v.task << ": "
                     << v.detail;
                detail::record_violation(counters, opts, inst, what.str());
            }
        }

        for (const auto& d : details) {
            const Award& award = *d.result.award;
            const auto& winner = d.groups[std::size_t(d.result.winner_index)];
            for (std::size_t bi = 0; bi < winner.bids.size(); ++bi) {
                const Bid& bid = winner.bids[bi];
                double truth = bid.declared_cost;
                double payment = award.dish_payments.at(bid.dish);
                double honest = misreport_profit(d.result, bid.dish, truth, truth);

                if (opts.check_misreports) {
                    for (int gi = 0; gi < opts.misreport_grid; ++gi) {
                        double declared =
                            truth * (0.2 + 2.8 * double(gi) / double(opts.misreport_grid - 1));
                        double gain =
                            misreport_profit(d.result, bid.dish, truth, declared) - honest;
                        counters.misreport_trials += 1;
                        if (gain > 1e-9) {
                            std::ostringstream what;
                            what << "misreport gain " << format_double(gain) << " for dish "
                                 << bid.dish << " declaring " << format_double(declared)
                                 << " (truth " << format_double(truth) << ")";
                            detail::record_violation(counters, opts, inst, what.str());
                        }
                    }
                    // Monotonicity against the committed price: a cheaper
                    // declaration keeps the dish winning at the same payment,
                    // so its profit is exactly the honest profit.
                    counters.monotonicity_checks += 1;
                    double cheaper = truth * rng.uniform(0.2, 0.9);
                    double cheap_profit = misreport_profit(d.result, bid.dish, truth, cheaper);
                    if (!wins_at_declaration(award, bid.dish, cheaper) ||
                        cheap_profit != honest) {
                        std::ostringstream what;
                        what << "monotonicity: dish " << bid.dish << " declaring "
                             << format_double(cheaper) << " (truth " << format_double(truth)
                             << ") got profit " << format_double(cheap_profit) << " vs honest "
                             << format_double(honest);
                        detail::record_violation(counters, opts, inst, what.str());
                    }
                }

                if (opts.check_critical_values) {
                    counters.critical_checks += 1;
                    double cv = critical_value(d.at->task, d.groups, d.stats,
                                               std::size_t(d.result.winner_index), bi);
                    double rel = std::fabs(cv - payment) / std::fmax(1e-12, std::fabs(payment));
                    if (rel > 1e-6) {
                        std::ostringstream what;
                        what << "critical value " << format_double(cv) << " != payment "
                             << format_double(payment) << " for dish " << bid.dish;
                        detail::record_violation(counters, opts, inst, what.str());
                    }
                }
            }
        }
    }
    return counters;
}

inline std::string render_audit_report(const AuditCounters& c) {
    std::ostringstream o;
    o << "instances " << c.instances << "\n";
    o << "tasks " << c.tasks << "\n";
    o << "awards " << c.awards << "\n";
    o << "constraint_checks " << c.constraint_checks << "\n";
    o << "misreport_trials " << c.misreport_trials << "\n";
    o << "monotonicity_checks " << c.monotonicity_checks << "\n";
    o << "critical_checks " << c.critical_checks << "\n";
    o << "violations " << c.violations << "\n";
    if (!c.first_violation.empty()) o << "first_violation " << c.first_violation << "\n";
    return o.str();
}

}  // namespace susco::audit
