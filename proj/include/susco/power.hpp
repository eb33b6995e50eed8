#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "susco/errors.hpp"

namespace susco {

// Rechargeable battery of one satellite. level is the state of charge in
// [0, 1]; life counts the remaining deep-cycle budget and only ever shrinks.
struct BatteryState {
    double level = 1.0;
    double life = 1.0;
    double life_max = 1.0;
    double wear_shape = 1.0;   // exponent controlling depth-of-discharge wear
    double capacity_j = 1.0e6; // energy stored at level 1.0
};

struct EnergyParams {
    double epsilon_j_per_mb = 0.08; // per-unit forwarding energy
    double idle_draw_w = 200.0;
    double solar_charge_w = 400.0;
};

// Antiderivative of the wear integrand 10^(-a*x) * (1 + a*ln10*(1-x)),
// chosen so wear_increment below is F(after) - F(before).
inline double wear_antiderivative(double level, double shape) {
    return (1.0 - level) * std::pow(10.0, -shape * level);
}

// Life wear caused by discharging from level_before down to level_after.
// Charging or holding costs nothing.
inline double wear_increment(double level_before, double level_after, double shape) {
    if (level_after >= level_before) return 0.0;
    return wear_antiderivative(level_after, shape) - wear_antiderivative(level_before, shape);
}

// Wear scaled by how close the battery is to end of life. A dead battery makes
// any further use infinitely costly.
inline double service_life_cost(double wear, const BatteryState& b) {
    if (b.life <= 0.0) return std::numeric_limits<double>::infinity();
    return wear * std::exp((b.life_max - b.life) / b.life);
}

// Energy to forward traffic_mb across every node with the given per-unit costs.
inline double path_energy_j(double traffic_mb, const std::vector<double>& node_epsilons) {
    double total = 0.0;
    for (double e : node_epsilons) total += traffic_mb * e;
    return total;
}

// Energy for a split offload: each share traverses only its prefix of the
// route. prefix_epsilon_sums[k] is the summed per-unit cost of share k's prefix.
inline double offload_energy_j(const std::vector<double>& splits_mb,
                               const std::vector<double>& prefix_epsilon_sums,
                               double traffic_mb) {
    if (splits_mb.size() != prefix_epsilon_sums.size())
        throw SplitMismatch("split/prefix arity mismatch");
    double sum = 0.0, total = 0.0;
    for (std::size_t k = 0; k < splits_mb.size(); ++k) {
        sum += splits_mb[k];
        total += splits_mb[k] * prefix_epsilon_sums[k];
    }
    double tol = 1e-9 * std::fmax(1.0, std::fabs(traffic_mb));
    if (std::fabs(sum - traffic_mb) > tol)
        throw SplitMismatch("splits do not sum to task traffic");
    return total;
}

// Advance one battery through an interval: solar charging when lit, load draw
// always, life decremented by the wear of any net discharge.
inline void step_battery(BatteryState& b, double load_w, double solar_w, bool eclipsed,
                         double dt_s) {
    double net_w = (eclipsed ? 0.0 : solar_w) - load_w;
    double before = b.level;
    double after = before + net_w * dt_s / b.capacity_j;
    after = std::fmax(0.0, std::fmin(1.0, after));
    b.level = after;
    double k = wear_increment(before, after, b.wear_shape);
    b.life = std::fmax(0.0, b.life - k);
}

}  // namespace susco
