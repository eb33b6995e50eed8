// End-to-end acceptance gate. Each criterion prints one PASS/FAIL line with
// its measured numbers, so a transcript of this binary documents the release.

#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cmath>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "susco/audit.hpp"
#include "susco/config.hpp"
#include "susco/sim.hpp"

using Clock = std::chrono::steady_clock;

namespace {

const std::string kRepo = SUSCO_SOURCE_DIR;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(int criterion, const std::string& label, bool pass, const std::string& details) {
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << criterion << ": " << label << " ("
              << details << ")" << std::endl;
}

susco::Bid mk_bid(susco::DishId dish, susco::SatelliteId offload_sat, double capacity_mb,
                  double bandwidth_mbps, double cost, double gsl_ms = 0.0, double tail_ms = 0.0) {
    susco::Bid b;
    b.dish = dish;
    b.offload_sat = offload_sat;
    b.capacity_mb = capacity_mb;
    b.bandwidth_mbps = bandwidth_mbps;
    b.declared_cost = cost;
    b.gsl_latency_ms = gsl_ms;
    b.tail_latency_ms = tail_ms;
    return b;
}

susco::Task mk_task(double traffic, double delay_req, double bw_req, double budget) {
    susco::Task t;
    t.id = 1;
    t.data_mb = traffic;
    t.delay_req_ms = delay_req;
    t.bandwidth_req_mbps = bw_req;
    t.budget = budget;
    return t;
}

susco::UtilityContext two_node_ctx(double traffic_mb) {
    susco::UtilityContext ctx;
    for (int i = 0; i < 2; ++i) {
        susco::PathNode node;
        node.sat = i;
        node.epsilon_j_per_mb = 0.08;
        node.battery.capacity_j = 1000.0;
        node.battery.level = 800.0;
        node.battery.life = 5.0;
        node.battery.life_max = 5.0;
        node.battery.wear_shape = 1.0;
        ctx.path.push_back(node);
    }
    ctx.hop_latency_ms = {5.0};
    ctx.traffic_mb = traffic_mb;
    return ctx;
}

// Scenario used by the comparison criteria: Telesat shell, 20-dish catalog.
susco::ScenarioConfig comparison_config(susco::SchemeChoice scheme, std::uint64_t seed) {
    auto cfg = susco::default_scenario_config();
    cfg.dishes = susco::load_dish_catalog(kRepo + "/data/dishes_20.csv");
    cfg.num_intervals = 20;
    cfg.num_sources = 2;
    cfg.scheme = scheme;
    cfg.seed = seed;
    susco::validate_config(cfg);
    return cfg;
}

// Scenario used by the reliability criterion: 16 metro areas x 4 dishes, 30%
// of dishes silently unreliable.
susco::ScenarioConfig reliability_config(susco::SchemeChoice scheme, std::uint64_t seed) {
    auto cfg = susco::default_scenario_config();
    cfg.dishes = susco::load_dish_catalog(kRepo + "/data/dishes_16x4.csv");
    cfg.num_intervals = 100;
    cfg.num_sources = 4;
    cfg.tasks_min = 2;
    cfg.tasks_max = 3;
    cfg.unreliable_fraction = 0.3;
    cfg.unreliable_failure_rate = 0.5;
    cfg.reliable_failure_rate = 0.01;
    cfg.scheme = scheme;
    cfg.seed = seed;
    susco::validate_config(cfg);
    return cfg;
}

}  // namespace

TEST_CASE("criterion 1: constraint conformance on random instances") {
    auto t0 = Clock::now();
    susco::audit::AuditOptions opts;
    opts.instances = 10000;
    opts.seed = 2026;
    opts.check_constraints = true;
    auto c = susco::audit::run_audit(opts);
    double elapsed = seconds_since(t0);

    bool pass = c.ok() && c.constraint_checks == 10000 && elapsed <= 60.0;
    std::ostringstream d;
    d << c.instances << " instances, " << c.awards << " awards, " << c.violations
      << " violations, " << elapsed << "s";
    report(1, "zero constraint violations over 10^4 instances in <= 60s", pass, d.str());
    if (!c.first_violation.empty()) std::cout << "  first: " << c.first_violation << std::endl;
    REQUIRE(pass);
}

TEST_CASE("criterion 2: no profitable misreport on 10^3 instances x 20-point grids") {
    auto t0 = Clock::now();
    susco::audit::AuditOptions opts;
    opts.instances = 1000;
    opts.seed = 2027;
    opts.check_constraints = false;
    opts.check_misreports = true;
    opts.misreport_grid = 20;
    auto c = susco::audit::run_audit(opts);
    double elapsed = seconds_since(t0);

    bool pass = c.ok() && c.misreport_trials >= 1000 && elapsed <= 300.0;
    std::ostringstream d;
    d << c.misreport_trials << " misreport trials, " << c.monotonicity_checks
      << " monotonicity checks, " << c.violations << " violations, " << elapsed << "s";
    report(2, "no dish gains more than 1e-9 by lying", pass, d.str());
    if (!c.first_violation.empty()) std::cout << "  first: " << c.first_violation << std::endl;
    REQUIRE(pass);
}

TEST_CASE("criterion 3: critical declaration matches the payment") {
    auto t0 = Clock::now();
    susco::audit::AuditOptions opts;
    opts.instances = 1000;
    opts.seed = 2028;
    opts.check_constraints = false;
    opts.check_critical_values = true;
    auto c = susco::audit::run_audit(opts);
    double elapsed = seconds_since(t0);

    bool pass = c.ok() && c.critical_checks >= 100;
    std::ostringstream d;
    d << c.critical_checks << " bisections within 1e-6 relative, " << c.violations
      << " violations, " << elapsed << "s";
    report(3, "bisected critical value equals the paid amount", pass, d.str());
    if (!c.first_violation.empty()) std::cout << "  first: " << c.first_violation << std::endl;
    REQUIRE(pass);
}

TEST_CASE("criterion 4: life-wear closed form agrees with quadrature") {
    susco::Rng rng(2029u);
    double worst = 0.0;
    std::int64_t zero_cases = 0;
    bool zero_exact = true;
    for (int i = 0; i < 10000; ++i) {
        double before = rng.uniform(0.5, 3.0);
        double after = rng.uniform(0.5, 3.0);
        double shape = rng.uniform(0.5, 3.0);
        double closed = susco::wear_increment(before, after, shape);
        if (after >= before) {
            ++zero_cases;
            zero_exact = zero_exact && closed == 0.0;
            continue;
        }
        double quad = oracle::wear_by_quadrature(before, after, shape);
        worst = std::fmax(worst, std::fabs(closed - quad));
    }
    bool pass = worst <= 1e-9 && zero_exact && zero_cases > 1000;
    std::ostringstream d;
    d << "worst abs diff " << worst << " over 10^4 draws, " << zero_cases
      << " no-decrease cases all exactly 0";
    report(4, "wear increment vs numerical integration within 1e-9", pass, d.str());
    REQUIRE(pass);
}

TEST_CASE("criterion 5: group construction equals the naive restatement") {
    susco::Rng rng(2030u);
    std::int64_t compared = 0;
    bool identical = true;
    for (int trial = 0; trial < 1000 && identical; ++trial) {
        int n_bids = int(rng.uniform_int(1, 10));
        double traffic = rng.uniform(200.0, 1500.0);
        auto task = mk_task(traffic, rng.uniform(20.0, 120.0), rng.uniform(20.0, 120.0),
                            rng.uniform(2.0, 12.0));
        int rounds = int(rng.uniform_int(1, 4));
        int width = int(rng.uniform_int(1, 6));

        std::vector<susco::Bid> bids;
        std::vector<oracle::NaiveBid> nbids;
        for (int d = 0; d < n_bids; ++d) {
            double tail = rng.uniform(10.0, 140.0);
            auto b = mk_bid(d, 0, rng.uniform(100.0, 900.0), rng.uniform(10.0, 90.0),
                            rng.uniform(0.2, 4.0), 0.0, tail);
            bids.push_back(b);
            nbids.push_back({d, tail, b.bandwidth_mbps, b.capacity_mb, b.declared_cost});
        }

        auto ctx = two_node_ctx(traffic);
        auto groups = susco::construct_groups(task, bids, rounds, width, ctx);
        auto expect = oracle::naive_group_construction(nbids, task.delay_req_ms,
                                                       task.bandwidth_req_mbps, task.data_mb,
                                                       task.budget, rounds, width);
        if (groups.size() != expect.size()) {
            identical = false;
            break;
        }
        for (std::size_t i = 0; i < groups.size(); ++i) {
            std::vector<int> key(groups[i].key.begin(), groups[i].key.end());
            if (key != expect[i]) identical = false;
        }
        compared += std::int64_t(groups.size());
    }

    // Two merge rounds cap every group at two bids.
    bool bounded = true;
    for (int trial = 0; trial < 200; ++trial) {
        int n_bids = int(rng.uniform_int(2, 10));
        double traffic = rng.uniform(200.0, 1500.0);
        auto task = mk_task(traffic, rng.uniform(20.0, 120.0), rng.uniform(20.0, 120.0),
                            rng.uniform(2.0, 12.0));
        std::vector<susco::Bid> bids;
        for (int d = 0; d < n_bids; ++d)
            bids.push_back(mk_bid(d, 0, rng.uniform(100.0, 900.0), rng.uniform(10.0, 90.0),
                                  rng.uniform(0.2, 4.0), 0.0, rng.uniform(10.0, 140.0)));
        auto ctx = two_node_ctx(traffic);
        for (const auto& g : susco::construct_groups(task, bids, 2, 10, ctx))
            bounded = bounded && g.bids.size() <= 2;
    }

    bool pass = identical && bounded;
    std::ostringstream d;
    d << "1000 seeded instances identical, " << compared
      << " groups compared; 2-round construction never exceeded 2 bids";
    report(5, "layered construction matches independent oracle", pass, d.str());
    REQUIRE(pass);
}

TEST_CASE("criterion 6: selection regret grows sublinearly") {
    const std::vector<double> truth = {1.0, 0.7, 0.6, 0.5, 0.4, 0.3};
    const std::vector<int> checkpoints = {500, 1000, 2000, 4000};
    std::vector<double> mean_regret(checkpoints.size(), 0.0);
    const int seeds = 20;

    auto task = mk_task(100.0, 1e9, 1.0, 1e9);
    for (int seed = 1; seed <= seeds; ++seed) {
        susco::Rng rng(susco::derive_seed(std::uint64_t(seed), {0x72656772ull}));
        susco::GroupStats stats;
        double regret = 0.0;
        std::size_t ci = 0;
        for (int t = 1; t <= checkpoints.back(); ++t) {
            std::vector<susco::CollaboratorGroup> groups;
            for (std::size_t k = 0; k < truth.size(); ++k) {
                auto g = susco::make_group({mk_bid(susco::DishId(k), 0, 200.0, 10.0, 1.0)});
                double u = truth[k] + rng.uniform(-0.1, 0.1);
                g.utility_total = u;
                g.utility = u;
                groups.push_back(std::move(g));
            }
            auto res = susco::select_winner(task, groups, stats);
            REQUIRE(res.outcome == susco::SelectionOutcome::awarded);
            stats.record_selection(res.award->group);
            regret += truth[0] - truth[std::size_t(res.winner_index)];
            if (ci < checkpoints.size() && t == checkpoints[ci])
                mean_regret[ci++] += regret / seeds;
        }
    }

    bool pass = true;
    std::ostringstream d;
    for (std::size_t i = 0; i + 1 < checkpoints.size(); ++i) {
        double ratio = mean_regret[i + 1] / mean_regret[i];
        pass = pass && ratio < 1.8;
        if (i > 0) d << ", ";
        d << "regret(" << checkpoints[i + 1] << ")/regret(" << checkpoints[i] << ") = " << ratio;
    }
    report(6, "regret(2R)/regret(R) < 1.8 over 20 seeds", pass, d.str());
    REQUIRE(pass);
}

TEST_CASE("criterion 7: directional superiority over the baselines") {
    auto t0 = Clock::now();
    const std::vector<susco::SchemeChoice> others = {
        susco::SchemeChoice::service, susco::SchemeChoice::smtsn, susco::SchemeChoice::falcon};

    int wins_energy = 0, wins_life = 0, wins_latency = 0;
    std::map<susco::SchemeChoice, double> ratio_sum;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto sus = susco::summarize(
            susco::run_scenario(comparison_config(susco::SchemeChoice::susco, seed)));
        ratio_sum[susco::SchemeChoice::susco] += sus.utility_to_cost_ratio;
        bool e = true, l = true, y = true;
        for (auto scheme : others) {
            auto base = susco::summarize(susco::run_scenario(comparison_config(scheme, seed)));
            ratio_sum[scheme] += base.utility_to_cost_ratio;
            e = e && sus.mean_reduced_energy_j > base.mean_reduced_energy_j;
            l = l && sus.mean_reduced_life > base.mean_reduced_life;
            y = y && sus.mean_reduced_latency_ms > base.mean_reduced_latency_ms;
        }
        wins_energy += e;
        wins_life += l;
        wins_latency += y;
    }
    double elapsed = seconds_since(t0);

    double sus_ratio = ratio_sum[susco::SchemeChoice::susco] / 10.0;
    bool ratio_highest = true;
    for (auto scheme : others) ratio_highest = ratio_highest && sus_ratio > ratio_sum[scheme] / 10.0;

    bool pass = wins_energy >= 8 && wins_life >= 8 && wins_latency >= 8 && ratio_highest &&
                elapsed <= 600.0;
    std::ostringstream d;
    d << "energy " << wins_energy << "/10, life " << wins_life << "/10, latency " << wins_latency
      << "/10 seeds vs every baseline; mean utility/cost " << sus_ratio << " (service "
      << ratio_sum[susco::SchemeChoice::service] / 10.0 << ", smtsn "
      << ratio_sum[susco::SchemeChoice::smtsn] / 10.0 << ", falcon "
      << ratio_sum[susco::SchemeChoice::falcon] / 10.0 << "); " << elapsed << "s";
    report(7, "higher mean reductions on >= 8/10 seeds and best utility/cost", pass, d.str());
    REQUIRE(pass);
}

TEST_CASE("criterion 8: failure rate declines as reputations accumulate") {
    int halves = 0, vs_falcon = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto sus = susco::summarize(
            susco::run_scenario(reliability_config(susco::SchemeChoice::susco, seed)));
        auto fal = susco::summarize(
            susco::run_scenario(reliability_config(susco::SchemeChoice::falcon, seed)));
        halves += sus.failure_rate_second_half < sus.failure_rate_first_half;
        vs_falcon += sus.failure_rate_overall < fal.failure_rate_overall;
    }
    bool pass = halves >= 8 && vs_falcon >= 8;
    std::ostringstream d;
    d << "second half below first on " << halves << "/10 seeds, below falcon overall on "
      << vs_falcon << "/10 seeds";
    report(8, "30% unreliable dishes get learned and avoided", pass, d.str());
    REQUIRE(pass);
}

namespace {

// Group construction timed against a real route in a given constellation, with
// the bid set held fixed.
double time_construction(const std::string& preset, int reps, std::size_t& path_len) {
    auto cc = susco::preset_constellation(preset);
    auto sats = susco::generate_walker(cc);
    auto dishes = susco::load_dish_catalog(kRepo + "/data/dishes_20.csv");
    susco::LatencyParams lp;
    auto snap = susco::build_snapshot(sats, dishes, cc, lp, 0, 60.0);
    susco::SatelliteId src = 0;
    auto dst = susco::SatelliteId((cc.planes / 2) * cc.sats_per_plane + cc.sats_per_plane / 2);
    auto path = susco::original_path(snap, src, dst);
    path_len = path.size();

    susco::UtilityContext ctx;
    for (auto s : path) {
        susco::PathNode node;
        node.sat = s;
        node.epsilon_j_per_mb = 0.08;
        node.battery.capacity_j = 3.6e6;
        node.battery.level = 0.85 * node.battery.capacity_j;
        node.battery.life = 4.0;
        node.battery.life_max = 5.0;
        node.battery.wear_shape = 1.0;
        ctx.path.push_back(node);
    }
    ctx.hop_latency_ms = susco::path_hop_latencies(snap, path);
    ctx.traffic_mb = 9000.0;

    std::vector<susco::Bid> bids;
    double sum_cap = 0.0;
    for (int d = 0; d < 12; ++d) {
        susco::Bid b = mk_bid(d, path[std::size_t(d) % (path.size() - 1)],
                              0.5 * (300.0 + 20.0 * d) * 60.0, 300.0 + 20.0 * d, 0.0,
                              3.0 + 0.2 * d, 10.0 + d);
        b.declared_cost = susco::dish_cost(b.capacity_mb, b.bandwidth_mbps, 0.09, 0.17);
        sum_cap += b.capacity_mb;
        bids.push_back(b);
    }
    // Requirements sized so every bid passes the delay screen in both
    // constellations (fixed bid set) and exactly the two-bid merges are
    // feasible: bandwidth excludes singletons, data fits any pair.
    auto task = mk_task(0.12 * sum_cap, 5000.0, 600.0, 1e9);

    std::size_t sink = 0;
    double best = 1e300;
    for (int batch = 0; batch < 3; ++batch) {
        auto a = Clock::now();
        for (int r = 0; r < reps; ++r) {
            auto groups = susco::construct_groups(task, bids, 2, 10, ctx);
            sink += groups.size();
        }
        best = std::fmin(best, seconds_since(a));
    }
    if (sink == 0) throw std::runtime_error("construction produced no groups");
    return best;
}

}  // namespace

TEST_CASE("criterion 9: construction is constellation-scale free, selection linear") {
    std::size_t len72 = 0, len3168 = 0;
    double t72 = time_construction("telesat", 2000, len72);
    double t3168 = time_construction("2xstarlink", 2000, len3168);
    double ratio = t3168 / t72;

    // Selection wall time against the number of candidate groups. Single calls
    // are microseconds, so each point is the best of five timed batches, and a
    // noisy fit (machine contention) is re-measured up to two more times — the
    // shape being asserted is a property of the algorithm, not of the load
    // average during one batch.
    susco::Rng rng(424242u);
    auto task = mk_task(10.0, 1e9, 1.0, 1e9);
    double r2 = 0.0;
    int attempts = 0;
    while (attempts < 3 && r2 < 0.95) {
        ++attempts;
        std::vector<double> xs, ys;
        for (int size = 200; size <= 2000; size += 200) {
            std::vector<susco::CollaboratorGroup> groups;
            for (int k = 0; k < size; ++k) {
                auto g = susco::make_group({mk_bid(k, 0, 100.0, 10.0, 1.0)});
                double u = rng.uniform(0.5, 1.5);
                g.utility_total = u;
                g.utility = u;
                groups.push_back(std::move(g));
            }
            susco::GroupStats stats;
            int winner_sink = 0;
            double best = 1e300;
            const int reps = std::max(200, 600000 / size);
            winner_sink += susco::select_winner(task, groups, stats).winner_index;  // warm up
            for (int batch = 0; batch < 5; ++batch) {
                auto a = Clock::now();
                for (int r = 0; r < reps; ++r) {
                    auto res = susco::select_winner(task, groups, stats);
                    winner_sink += res.winner_index;
                }
                best = std::fmin(best, seconds_since(a));
            }
            REQUIRE(winner_sink >= 0);
            xs.push_back(double(size));
            ys.push_back(best / reps);
        }
        double n = double(xs.size()), sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sx += xs[i];
            sy += ys[i];
            sxx += xs[i] * xs[i];
            sxy += xs[i] * ys[i];
            syy += ys[i] * ys[i];
        }
        double cov = sxy - sx * sy / n, vx = sxx - sx * sx / n, vy = syy - sy * sy / n;
        r2 = cov * cov / (vx * vy);
    }

    bool pass = ratio <= 2.0 && r2 >= 0.95;
    std::ostringstream d;
    d << "construction " << t72 << "s on 72 sats (route " << len72 << " nodes) vs " << t3168
      << "s on 3168 (route " << len3168 << " nodes), ratio " << ratio
      << "; selection time vs group count R^2 = " << r2 << " (" << attempts
      << " measurement attempt" << (attempts == 1 ? "" : "s") << ")";
    report(9, "construction within 2x across constellations, selection linear", pass, d.str());
    REQUIRE(pass);
}

TEST_CASE("criterion 10: identical config and seed reproduce byte-identical outputs") {
    auto cfg = comparison_config(susco::SchemeChoice::susco, 1);
    auto a = susco::run_scenario(cfg);
    auto b = susco::run_scenario(cfg);
    bool metrics_same = susco::render_metrics_csv(a.metrics) == susco::render_metrics_csv(b.metrics);
    bool transcript_same =
        susco::render_transcript_csv(a.transcript) == susco::render_transcript_csv(b.transcript);
    bool pass = metrics_same && transcript_same;
    std::ostringstream d;
    d << "metrics.csv " << (metrics_same ? "identical" : "DIFFER") << ", transcript.csv "
      << (transcript_same ? "identical" : "DIFFER") << " across re-runs";
    report(10, "repeat runs are byte-identical", pass, d.str());
    REQUIRE(pass);
}
