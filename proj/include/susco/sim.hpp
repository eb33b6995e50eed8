#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "susco/auction.hpp"
#include "susco/baselines.hpp"
#include "susco/config.hpp"
#include "susco/constellation.hpp"
#include "susco/csv.hpp"
#include "susco/power.hpp"
#include "susco/rng.hpp"

namespace susco {

// Substream tags: every random decision draws from a stream derived from
// (seed, tag, coordinates), so schemes share task/bid/failure randomness and
// differ only in their awards.
namespace stream {
inline constexpr std::uint64_t tasks = 0x7461736bULL;
inline constexpr std::uint64_t bids = 0x62696473ULL;
inline constexpr std::uint64_t failures = 0x6661696cULL;
inline constexpr std::uint64_t unreliable = 0x756e7265ULL;
}  // namespace stream

struct IntervalMetrics {
    int interval = 0;
    double reduced_energy_j = 0.0;
    double reduced_life = 0.0;
    double reduced_latency_ms = 0.0;
    int tasks_total = 0;
    int tasks_offloaded = 0;
    int tasks_failed = 0;  // offloaded tasks with at least one failed dish
    double total_payment = 0.0;
    double sum_utility = 0.0;
    double sum_cost = 0.0;  // declared cost of the winning groups
};

struct DishResult {
    DishId dish = 0;
    double paid = 0.0;
    bool ok = true;
};

struct TranscriptRow {
    int interval = 0;
    TaskId task_id = 0;
    SatelliteId platform_sat = -1;
    int candidate_group_count = 0;
    GroupKey winner_key;
    double utility = 0.0;
    double group_cost = 0.0;
    double group_payment = 0.0;
    std::vector<DishResult> dish_results;
    std::string outcome;
};

struct GeneratedTask {
    Task task;
    DishId source_endpoint = -1;
    DishId dest_endpoint = -1;
};

// A failed split re-runs the rest of the original route in the next interval.
// chain[0] is the offload satellite re-forwarding the data; energy and life
// are charged to chain[1..] (the head already carried the split once).
struct RetransmitEntry {
    std::vector<SatelliteId> chain;
    DishId dest_dish = -1;
    double split_mb = 0.0;
};

struct EngineState {
    ScenarioConfig cfg;
    std::vector<SatelliteOrbit> orbits;
    std::vector<BatteryState> batteries;  // by satellite id
    std::vector<double> true_failure;     // by dish index, catalog order
    std::map<DishId, std::size_t> dish_index;
    ReputationBook reputations;
    GroupStats stats;
    std::vector<RetransmitEntry> retrans;
    std::vector<TranscriptRow> transcript;
};

inline EngineState make_engine_state(const ScenarioConfig& cfg) {
    validate_config(cfg);
    EngineState st;
    st.cfg = cfg;
    st.orbits = generate_walker(cfg.constellation);
    st.batteries.assign(st.orbits.size(), cfg.battery_init);
    st.true_failure.resize(cfg.dishes.size());
    for (std::size_t i = 0; i < cfg.dishes.size(); ++i) {
        st.true_failure[i] = cfg.dishes[i].failure_rate;
        st.dish_index[cfg.dishes[i].id] = i;
    }
    if (cfg.unreliable_fraction > 0.0) {
        // the experiment overrides the catalog: a seeded subset is unreliable
        std::fill(st.true_failure.begin(), st.true_failure.end(), cfg.reliable_failure_rate);
        int n = int(cfg.dishes.size());
        int k = int(std::lround(cfg.unreliable_fraction * n));
        Rng rng(derive_seed(cfg.seed, {stream::unreliable}));
        std::vector<int> idx(static_cast<std::size_t>(n));
        std::iota(idx.begin(), idx.end(), 0);
        for (int i = 0; i < k && i < n; ++i) {
            int j = i + int(rng.uniform_int(0, n - 1 - i));
            std::swap(idx[std::size_t(i)], idx[std::size_t(j)]);
            st.true_failure[std::size_t(idx[std::size_t(i)])] = cfg.unreliable_failure_rate;
        }
    }
    return st;
}

// First satellite on the route (destination excluded) that can reach at least
// one dish; -1 when the whole usable route is dish-blind.
inline SatelliteId select_platform_satellite(const std::vector<SatelliteId>& path,
                                             const Snapshot& snap) {
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
        if (!snap.sat_dishes[std::size_t(path[i])].empty()) return path[i];
    return -1;
}

// Draws task batches per source endpoint: endpoints come from the dish
// catalog, map to their nearest visible satellites, and the interval's
// aggregate data is partitioned exactly across 1..tasks_max tasks.
inline std::vector<GeneratedTask> generate_tasks(const Snapshot& snap, const ScenarioConfig& cfg,
                                                 Rng& rng, int interval) {
    std::vector<GeneratedTask> out;
    double total_mb = cfg.source_rate_mbps * cfg.interval_s;
    if (total_mb <= 0.0 || cfg.dishes.empty()) return out;
    int n_dishes = int(cfg.dishes.size());
    for (int s = 0; s < cfg.num_sources; ++s) {
        DishId src_dish = -1, dst_dish = -1;
        SatelliteId src_sat = -1, dst_sat = -1;
        for (int attempt = 0; attempt < 100; ++attempt) {
            int si = int(rng.uniform_int(0, n_dishes - 1));
            int di = int(rng.uniform_int(0, n_dishes - 1));
            if (si == di && n_dishes > 1) continue;
            SatelliteId ss = nearest_visible_satellite(snap, cfg.dishes[std::size_t(si)].id);
            SatelliteId ds = nearest_visible_satellite(snap, cfg.dishes[std::size_t(di)].id);
            if (ss < 0 || ds < 0 || ss == ds) continue;
            src_dish = cfg.dishes[std::size_t(si)].id;
            dst_dish = cfg.dishes[std::size_t(di)].id;
            src_sat = ss;
            dst_sat = ds;
            break;
        }
        if (src_dish < 0) continue;  // no usable geometry this interval

        int count = int(rng.uniform_int(cfg.tasks_min, cfg.tasks_max));
        std::vector<double> w(static_cast<std::size_t>(count));
        double wsum = 0.0;
        for (auto& x : w) {
            x = rng.uniform(0.5, 1.5);
            wsum += x;
        }
        double acc = 0.0;
        for (int i = 0; i < count; ++i) {
            GeneratedTask gt;
            gt.source_endpoint = src_dish;
            gt.dest_endpoint = dst_dish;
            Task& t = gt.task;
            t.id = TaskId(interval) * 1000000 + TaskId(s) * 1000 + i;
            t.source_sat = src_sat;
            t.dest_sat = dst_sat;
            t.data_mb = (i + 1 == count) ? total_mb - acc : total_mb * w[std::size_t(i)] / wsum;
            acc += t.data_mb;
            t.delay_req_ms = rng.uniform(cfg.delay_req_min_ms, cfg.delay_req_max_ms);
            t.bandwidth_req_mbps =
                rng.uniform(cfg.bandwidth_req_min_mbps, cfg.bandwidth_req_max_mbps);
            t.budget = cfg.budget;  // 0 resolves against the bid pool later
            out.push_back(std::move(gt));
        }
    }
    return out;
}

namespace detail {

inline double finite_or_zero(double x) { return std::isfinite(x) ? x : 0.0; }

inline double isl_hop_latency(const Snapshot& snap, SatelliteId a, SatelliteId b,
                              const LatencyParams& lp) {
    for (const auto& e : snap.isl[std::size_t(a)])
        if (e.to == b) return e.latency_ms;
    double d = distance(snap.sat_pos[std::size_t(a)], snap.sat_pos[std::size_t(b)]);
    return link_latency_ms(d, lp.isl_rate_mbps, lp.packet_size_mb, lp.queue_base_ms, lp.isl_load);
}

}  // namespace detail

inline IntervalMetrics run_interval(EngineState& st, int interval) {
    const ScenarioConfig& cfg = st.cfg;
    const double eps = cfg.energy.epsilon_j_per_mb;
    Snapshot snap = build_snapshot(st.orbits, cfg.dishes, cfg.constellation, cfg.latency,
                                   interval, cfg.interval_s);
    IntervalMetrics m;
    m.interval = interval;
    std::vector<double> load_j(st.orbits.size(), 0.0);

    // settle last interval's failed splits on the rest of their routes
    for (const auto& rt : st.retrans) {
        for (std::size_t i = 1; i < rt.chain.size(); ++i) {
            SatelliteId s = rt.chain[i];
            m.reduced_energy_j -= rt.split_mb * eps;
            load_j[std::size_t(s)] += rt.split_mb * eps;
            PathNode node{s, eps, st.batteries[std::size_t(s)]};
            m.reduced_life -= detail::finite_or_zero(node_life_cost(node, rt.split_mb));
        }
        double lat = 0.0;
        for (std::size_t i = 0; i + 1 < rt.chain.size(); ++i)
            lat += detail::isl_hop_latency(snap, rt.chain[i], rt.chain[i + 1], cfg.latency);
        lat += gsl_latency_ms(snap, rt.chain.back(), rt.dest_dish, cfg.latency);
        m.reduced_latency_ms -= lat;
    }
    st.retrans.clear();
    std::vector<RetransmitEntry> next_retrans;

    Rng trng(derive_seed(cfg.seed, {stream::tasks, std::uint64_t(interval)}));
    auto gens = generate_tasks(snap, cfg, trng, interval);
    m.tasks_total = int(gens.size());

    for (const auto& gt : gens) {
        Task task = gt.task;
        TranscriptRow row;
        row.interval = interval;
        row.task_id = task.id;
        auto unserved = [&](const char* outcome, bool charge_route,
                            const std::vector<SatelliteId>& path) {
            if (charge_route)
                for (SatelliteId s : path) load_j[std::size_t(s)] += task.data_mb * eps;
            row.outcome = outcome;
            st.transcript.push_back(row);
        };

        std::vector<SatelliteId> path;
        try {
            path = original_path(snap, task.source_sat, task.dest_sat);
        } catch (const NoRoute&) {
            unserved("no_route", false, {});
            continue;
        }

        UtilityContext ctx;
        ctx.traffic_mb = task.data_mb;
        ctx.weights = cfg.weights;
        ctx.price_per_gb = cfg.price_per_gb;
        ctx.price_per_second = cfg.price_per_second;
        for (SatelliteId s : path) ctx.path.push_back({s, eps, st.batteries[std::size_t(s)]});
        ctx.hop_latency_ms = path_hop_latencies(snap, path);
        ctx.hop_latency_ms.push_back(
            gsl_latency_ms(snap, task.dest_sat, gt.dest_endpoint, cfg.latency));

        SatelliteId platform = select_platform_satellite(path, snap);
        row.platform_sat = platform;
        if (platform < 0) {
            unserved("no_platform", true, path);
            continue;
        }

        const auto& src_vis = snap.sat_dishes[std::size_t(task.source_sat)];
        const auto& plat_vis = snap.sat_dishes[std::size_t(platform)];
        std::vector<DishId> cand;
        std::set_intersection(src_vis.begin(), src_vis.end(), plat_vis.begin(), plat_vis.end(),
                              std::back_inserter(cand));
        const Dish* dest_dish = snap.find_dish(gt.dest_endpoint);
        std::vector<Bid> bids;
        for (DishId d : cand) {
            const Dish* dish = snap.find_dish(d);
            Rng brng(derive_seed(cfg.seed, {stream::bids, std::uint64_t(interval),
                                            std::uint64_t(task.id), std::uint64_t(d)}));
            Bid b;
            b.dish = d;
            b.offload_sat = platform;
            b.bandwidth_mbps = dish->bandwidth_mbps;
            b.capacity_mb = dish->bandwidth_mbps * cfg.interval_s *
                            brng.uniform(cfg.capacity_util_min, cfg.capacity_util_max);
            b.declared_cost =
                dish_cost(b.capacity_mb, b.bandwidth_mbps, cfg.price_per_gb, cfg.price_per_second);
            b.gsl_latency_ms = gsl_latency_ms(snap, platform, d, cfg.latency);
            b.tail_latency_ms =
                terrestrial_latency_ms(dish->location, dest_dish->location, cfg.latency);
            bids.push_back(b);
        }
        if (bids.empty()) {
            unserved("no_bids", true, path);
            continue;
        }

        if (task.budget <= 0.0) {
            // automatic budget: twice the cheapest group that could serve
            auto pre = construct_groups_unbudgeted(task, bids, cfg.group_rounds, cfg.layer_width,
                                                   ctx);
            if (pre.empty()) {
                unserved("no_groups", true, path);
                continue;
            }
            double min_cost = pre.front().total_cost;
            for (const auto& g : pre) min_cost = std::fmin(min_cost, g.total_cost);
            task.budget = 2.0 * min_cost;
        }

        std::optional<Award> award;
        const CollaboratorGroup* winner = nullptr;
        std::vector<CollaboratorGroup> groups;
        CollaboratorGroup baseline_group;
        std::string outcome;

        if (cfg.scheme == SchemeChoice::susco) {
            groups = construct_groups(task, bids, cfg.group_rounds, cfg.layer_width, ctx);
            row.candidate_group_count = int(groups.size());
            if (groups.empty()) {
                outcome = "no_groups";
            } else {
                bool defined = true;
                try {
                    for (auto& g : groups) compute_group_utilities(ctx, g, st.reputations);
                } catch (const UtilityUndefined&) {
                    defined = false;
                    outcome = "utility_undefined";
                }
                if (defined) {
                    auto res = select_winner(task, groups, st.stats);
                    outcome = outcome_name(res.outcome);
                    if (res.award) {
                        award = res.award;
                        winner = &groups[std::size_t(res.winner_index)];
                        st.stats.record_selection(winner->key);
                    }
                }
            }
        } else {
            row.candidate_group_count =
                int(detail::feasible_single_bids(task, bids, ctx).size());
            auto a = select_baseline(cfg.scheme, task, bids, ctx);
            if (a) {
                for (const Bid& b : bids)
                    if (b.dish == a->group[0]) baseline_group = make_group({b});
                try {
                    compute_group_utilities(ctx, baseline_group, st.reputations);
                    award = a;
                    winner = &baseline_group;
                    outcome = "awarded";
                } catch (const UtilityUndefined&) {
                    outcome = "utility_undefined";
                }
            } else {
                outcome = "no_award";
            }
        }

        if (!award) {
            unserved(outcome.c_str(), true, path);
            continue;
        }

        row.winner_key = award->group;
        row.utility = winner->utility;
        row.group_cost = winner->total_cost;
        row.group_payment = award->group_payment;
        row.outcome = "awarded";

        auto splits = split_traffic(*winner, task.data_mb);
        double e_sat = task.data_mb * eps * double(path.size());
        double e_grd = 0.0;
        double d_sat = 0.0, d_grd = 0.0;
        for (double h : ctx.hop_latency_ms) d_sat += h;
        double life_gain = 0.0;
        bool any_fail = false;

        for (std::size_t k = 0; k < winner->bids.size(); ++k) {
            const Bid& b = winner->bids[k];
            int plen = ctx.prefix_len(b);
            e_grd += splits[k] * eps * double(plen);
            d_grd = std::fmax(d_grd, dish_delay_ms(ctx, b));
            for (std::size_t i = std::size_t(plen); i < ctx.path.size(); ++i)
                life_gain += detail::finite_or_zero(node_life_cost(ctx.path[i], splits[k]));
            for (int i = 0; i < plen; ++i)
                load_j[std::size_t(path[std::size_t(i)])] += splits[k] * eps;

            Rng frng(derive_seed(cfg.seed, {stream::failures, std::uint64_t(interval),
                                            std::uint64_t(task.id), std::uint64_t(b.dish)}));
            bool failed = frng.bernoulli(st.true_failure[st.dish_index.at(b.dish)]);
            double paid = 0.0;
            if (failed) {
                any_fail = true;
                RetransmitEntry rt;
                rt.chain.assign(path.begin() + (plen - 1), path.end());
                rt.dest_dish = gt.dest_endpoint;
                rt.split_mb = splits[k];
                next_retrans.push_back(std::move(rt));
            } else {
                paid = award->dish_payments.at(b.dish);
                m.total_payment += paid;
            }
            update_failure(st.reputations[b.dish], true, failed);
            row.dish_results.push_back({b.dish, paid, !failed});
        }

        m.reduced_energy_j += e_sat - e_grd;
        m.reduced_latency_ms += d_sat - d_grd;
        m.reduced_life += life_gain;
        m.tasks_offloaded += 1;
        if (any_fail) m.tasks_failed += 1;
        m.sum_utility += winner->utility;
        m.sum_cost += winner->total_cost;
        st.transcript.push_back(row);
    }

    st.retrans = std::move(next_retrans);

    for (std::size_t si = 0; si < st.batteries.size(); ++si) {
        double load_w = cfg.energy.idle_draw_w + load_j[si] / cfg.interval_s;
        step_battery(st.batteries[si], load_w, cfg.energy.solar_charge_w,
                     in_eclipse(snap.sat_pos[si], snap.sun), cfg.interval_s);
    }
    return m;
}

struct ScenarioResult {
    std::vector<IntervalMetrics> metrics;
    std::vector<TranscriptRow> transcript;
    ReputationBook reputations;
    GroupStats stats;
};

inline ScenarioResult run_scenario(const ScenarioConfig& cfg) {
    EngineState st = make_engine_state(cfg);
    ScenarioResult out;
    out.metrics.reserve(std::size_t(cfg.num_intervals));
    for (int i = 0; i < cfg.num_intervals; ++i) out.metrics.push_back(run_interval(st, i));
    out.transcript = std::move(st.transcript);
    out.reputations = std::move(st.reputations);
    out.stats = std::move(st.stats);
    return out;
}

// ---- deterministic renderers ------------------------------------------------

inline std::string render_metrics_csv(const std::vector<IntervalMetrics>& metrics) {
    std::ostringstream o;
    o << "interval,reduced_energy_j,reduced_life,reduced_latency_ms,tasks_total,"
         "tasks_offloaded,tasks_failed,total_payment,sum_utility,sum_cost\n";
    for (const auto& m : metrics) {
        o << m.interval << ',' << format_double(m.reduced_energy_j) << ','
          << format_double(m.reduced_life) << ',' << format_double(m.reduced_latency_ms) << ','
          << m.tasks_total << ',' << m.tasks_offloaded << ',' << m.tasks_failed << ','
          << format_double(m.total_payment) << ',' << format_double(m.sum_utility) << ','
          << format_double(m.sum_cost) << '\n';
    }
    return o.str();
}

inline std::string render_transcript_csv(const std::vector<TranscriptRow>& rows) {
    std::ostringstream o;
    o << "interval,task_id,platform_sat,candidate_group_count,winner_key,utility,"
         "group_cost,group_payment,per_dish_payments,outcome\n";
    for (const auto& r : rows) {
        o << r.interval << ',' << r.task_id << ',' << r.platform_sat << ','
          << r.candidate_group_count << ',' << key_string(r.winner_key) << ','
          << format_double(r.utility) << ',' << format_double(r.group_cost) << ','
          << format_double(r.group_payment) << ',';
        for (std::size_t i = 0; i < r.dish_results.size(); ++i) {
            const auto& d = r.dish_results[i];
            if (i) o << '|';
            o << d.dish << ':' << format_double(d.paid) << ':' << (d.ok ? "ok" : "fail");
        }
        o << ',' << r.outcome << '\n';
    }
    return o.str();
}

inline double percentile_lower(std::vector<double> v, double q) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    std::size_t idx = std::size_t(q * double(v.size() - 1));
    return v[idx];
}

struct SummaryStats {
    int intervals = 0;
    long long tasks_total = 0, tasks_offloaded = 0, tasks_failed = 0;
    double offload_rate = 0.0;
    double failure_rate_overall = 0.0, failure_rate_first_half = 0.0,
           failure_rate_second_half = 0.0;
    double mean_reduced_energy_j = 0.0, mean_reduced_life = 0.0, mean_reduced_latency_ms = 0.0;
    double mean_total_payment = 0.0;
    // Fig-style ratio: the per-task utility purchased per unit of declared cost,
    // averaged over the tasks that actually went to auction winners.
    double utility_to_cost_ratio = 0.0;
    double aggregate_utility_per_cost = 0.0;
    double p50_reduced_latency_ms = 0.0, p90_reduced_latency_ms = 0.0;
};

inline SummaryStats summarize(const ScenarioResult& res) {
    SummaryStats s;
    long long failed_first = 0, failed_second = 0, off_first = 0, off_second = 0;
    double energy = 0.0, life = 0.0, latency = 0.0, payment = 0.0, utility = 0.0, cost = 0.0;
    double ratio_sum = 0.0;
    long long ratio_n = 0;
    for (const auto& r : res.transcript) {
        if (r.outcome != "awarded" || r.group_cost <= 0.0) continue;
        ratio_sum += r.utility / r.group_cost;
        ratio_n += 1;
    }
    std::vector<double> latencies;
    int n = int(res.metrics.size());
    for (const auto& m : res.metrics) {
        s.tasks_total += m.tasks_total;
        s.tasks_offloaded += m.tasks_offloaded;
        s.tasks_failed += m.tasks_failed;
        bool second_half = m.interval >= n / 2;
        (second_half ? failed_second : failed_first) += m.tasks_failed;
        (second_half ? off_second : off_first) += m.tasks_offloaded;
        energy += m.reduced_energy_j;
        life += m.reduced_life;
        latency += m.reduced_latency_ms;
        payment += m.total_payment;
        utility += m.sum_utility;
        cost += m.sum_cost;
        latencies.push_back(m.reduced_latency_ms);
    }
    auto rate = [](long long num, long long den) {
        return den > 0 ? double(num) / double(den) : 0.0;
    };
    double inv = n > 0 ? 1.0 / double(n) : 0.0;
    s.intervals = n;
    s.offload_rate = rate(s.tasks_offloaded, s.tasks_total);
    s.failure_rate_overall = rate(s.tasks_failed, s.tasks_offloaded);
    s.failure_rate_first_half = rate(failed_first, off_first);
    s.failure_rate_second_half = rate(failed_second, off_second);
    s.mean_reduced_energy_j = energy * inv;
    s.mean_reduced_life = life * inv;
    s.mean_reduced_latency_ms = latency * inv;
    s.mean_total_payment = payment * inv;
    s.utility_to_cost_ratio = ratio_n > 0 ? ratio_sum / double(ratio_n) : 0.0;
    s.aggregate_utility_per_cost = cost > 0.0 ? utility / cost : 0.0;
    s.p50_reduced_latency_ms = percentile_lower(latencies, 0.5);
    s.p90_reduced_latency_ms = percentile_lower(latencies, 0.9);
    return s;
}

inline std::string render_summary(const ScenarioResult& res) {
    const SummaryStats s = summarize(res);
    std::ostringstream o;
    o << "intervals " << s.intervals << "\n";
    o << "tasks_total " << s.tasks_total << "\n";
    o << "tasks_offloaded " << s.tasks_offloaded << "\n";
    o << "tasks_failed " << s.tasks_failed << "\n";
    o << "offload_rate " << format_double(s.offload_rate) << "\n";
    o << "failure_rate_overall " << format_double(s.failure_rate_overall) << "\n";
    o << "failure_rate_first_half " << format_double(s.failure_rate_first_half) << "\n";
    o << "failure_rate_second_half " << format_double(s.failure_rate_second_half) << "\n";
    o << "mean_reduced_energy_j " << format_double(s.mean_reduced_energy_j) << "\n";
    o << "mean_reduced_life " << format_double(s.mean_reduced_life) << "\n";
    o << "mean_reduced_latency_ms " << format_double(s.mean_reduced_latency_ms) << "\n";
    o << "mean_total_payment " << format_double(s.mean_total_payment) << "\n";
    o << "utility_to_cost_ratio " << format_double(s.utility_to_cost_ratio) << "\n";
    o << "aggregate_utility_per_cost " << format_double(s.aggregate_utility_per_cost) << "\n";
    o << "p50_reduced_latency_ms " << format_double(s.p50_reduced_latency_ms) << "\n";
    o << "p90_reduced_latency_ms " << format_double(s.p90_reduced_latency_ms) << "\n";
    return o.str();
}

}  // namespace susco
