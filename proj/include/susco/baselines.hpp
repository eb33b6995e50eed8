#pragma once

#include <algorithm>
#include <optional>
#include <string_view>
#include <vector>

#include "susco/auction.hpp"

namespace susco {

enum class SchemeChoice { susco, service, smtsn, falcon };

inline const char* scheme_name(SchemeChoice s) {
    switch (s) {
        case SchemeChoice::susco: return "susco";
        case SchemeChoice::service: return "service";
        case SchemeChoice::smtsn: return "smtsn";
        case SchemeChoice::falcon: return "falcon";
    }
    return "unknown";
}

inline std::optional<SchemeChoice> parse_scheme(std::string_view s) {
    if (s == "susco") return SchemeChoice::susco;
    if (s == "service") return SchemeChoice::service;
    if (s == "smtsn") return SchemeChoice::smtsn;
    if (s == "falcon") return SchemeChoice::falcon;
    return std::nullopt;
}

namespace detail {

// Baselines place whole tasks on one dish, so every requirement must hold for
// the bid alone.
inline std::vector<Bid> feasible_single_bids(const Task& task, const std::vector<Bid>& bids,
                                             const UtilityContext& ctx) {
    std::vector<Bid> out;
    for (const auto& b : bids) {
        if (dish_delay_ms(ctx, b) > task.delay_req_ms) continue;
        if (b.bandwidth_mbps < task.bandwidth_req_mbps) continue;
        if (b.capacity_mb < task.data_mb) continue;
        out.push_back(b);
    }
    std::sort(out.begin(), out.end(), [](const Bid& a, const Bid& b) { return a.dish < b.dish; });
    return out;
}

// Min-max over the feasible set; a degenerate all-equal column reads as 0.5.
inline std::vector<double> minmax_norm(const std::vector<double>& v) {
    double lo = *std::min_element(v.begin(), v.end());
    double hi = *std::max_element(v.begin(), v.end());
    std::vector<double> out(v.size(), 0.5);
    if (hi > lo)
        for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - lo) / (hi - lo);
    return out;
}

inline std::optional<Award> first_price_award(const Task& task, const Bid& winner) {
    if (winner.declared_cost > task.budget) return std::nullopt;
    Award a;
    a.task = task.id;
    a.group = {winner.dish};
    a.group_payment = winner.declared_cost;
    a.dish_payments[winner.dish] = winner.declared_cost;
    return a;
}

// Argmax over scores aligned with bids sorted by dish id; ties keep the
// earlier (smaller) dish.
inline std::optional<Award> pick_best(const Task& task, const std::vector<Bid>& feasible,
                                      const std::vector<double>& scores) {
    if (feasible.empty()) return std::nullopt;
    std::size_t best = 0;
    for (std::size_t i = 1; i < feasible.size(); ++i)
        if (scores[i] > scores[best]) best = i;
    return first_price_award(task, feasible[best]);
}

}  // namespace detail

// Equal-weight blend of normalized latency improvement and bandwidth.
inline std::optional<Award> select_service(const Task& task, const std::vector<Bid>& bids,
                                           const UtilityContext& ctx) {
    auto feasible = detail::feasible_single_bids(task, bids, ctx);
    if (feasible.empty()) return std::nullopt;
    double d_sat = 0.0;
    for (double h : ctx.hop_latency_ms) d_sat += h;
    std::vector<double> improvement, bandwidth;
    for (const auto& b : feasible) {
        improvement.push_back(d_sat - dish_delay_ms(ctx, b));
        bandwidth.push_back(b.bandwidth_mbps);
    }
    auto ni = detail::minmax_norm(improvement);
    auto nb = detail::minmax_norm(bandwidth);
    std::vector<double> score(feasible.size());
    for (std::size_t i = 0; i < feasible.size(); ++i) score[i] = 0.5 * ni[i] + 0.5 * nb[i];
    return detail::pick_best(task, feasible, score);
}

// Equal-weight blend of normalized single-dish life utility and latency
// improvement.
inline std::optional<Award> select_smtsn(const Task& task, const std::vector<Bid>& bids,
                                         const UtilityContext& ctx) {
    auto feasible = detail::feasible_single_bids(task, bids, ctx);
    if (feasible.empty()) return std::nullopt;
    double d_sat = 0.0;
    for (double h : ctx.hop_latency_ms) d_sat += h;
    std::vector<double> life, improvement;
    for (const auto& b : feasible) {
        auto g = make_group({b});
        life.push_back(utility_life(ctx, g, split_traffic(g, ctx.traffic_mb)));
        improvement.push_back(d_sat - dish_delay_ms(ctx, b));
    }
    auto nl = detail::minmax_norm(life);
    auto ni = detail::minmax_norm(improvement);
    std::vector<double> score(feasible.size());
    for (std::size_t i = 0; i < feasible.size(); ++i) score[i] = 0.5 * nl[i] + 0.5 * ni[i];
    return detail::pick_best(task, feasible, score);
}

// Lowest ground-route delay wins.
inline std::optional<Award> select_falcon(const Task& task, const std::vector<Bid>& bids,
                                          const UtilityContext& ctx) {
    auto feasible = detail::feasible_single_bids(task, bids, ctx);
    if (feasible.empty()) return std::nullopt;
    std::vector<double> score;
    for (const auto& b : feasible) score.push_back(-dish_delay_ms(ctx, b));
    return detail::pick_best(task, feasible, score);
}

inline std::optional<Award> select_baseline(SchemeChoice scheme, const Task& task,
                                            const std::vector<Bid>& bids,
                                            const UtilityContext& ctx) {
    switch (scheme) {
        case SchemeChoice::service: return select_service(task, bids, ctx);
        case SchemeChoice::smtsn: return select_smtsn(task, bids, ctx);
        case SchemeChoice::falcon: return select_falcon(task, bids, ctx);
        case SchemeChoice::susco: break;
    }
    throw InvalidConfig("select_baseline called with the primary scheme");
}

}  // namespace susco
