#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "susco/auction.hpp"
#include "susco/baselines.hpp"
#include "susco/constellation.hpp"
#include "susco/csv.hpp"
#include "susco/power.hpp"

namespace susco {

struct ScenarioConfig {
    std::string preset = "telesat";  // or "custom" with explicit constellation
    ConstellationConfig constellation;
    std::string dish_catalog;
    std::vector<Dish> dishes;

    SchemeChoice scheme = SchemeChoice::susco;
    std::uint64_t seed = 1;
    int num_intervals = 100;
    double interval_s = 60.0;

    double source_rate_mbps = 300.0;
    int num_sources = 1;
    int tasks_min = 1;
    int tasks_max = 8;
    double delay_req_min_ms = 50.0;
    double delay_req_max_ms = 200.0;
    double bandwidth_req_min_mbps = 50.0;
    double bandwidth_req_max_mbps = 200.0;
    double budget = 0.0;  // 0 = twice the cheapest feasible group, per task

    int group_rounds = 2;   // merge rounds in group construction
    int layer_width = 10;   // groups carried between rounds

    UtilityWeights weights;
    double price_per_gb = 0.09;
    double price_per_second = 0.17;
    double capacity_util_min = 0.3;
    double capacity_util_max = 1.0;

    BatteryState battery_init;
    EnergyParams energy;
    LatencyParams latency;

    double unreliable_fraction = 0.0;
    double unreliable_failure_rate = 0.5;
    double reliable_failure_rate = 0.01;
};

inline std::vector<std::string> preset_names() {
    return {"telesat", "kuiper", "starlink", "2xstarlink"};
}

inline ConstellationConfig preset_constellation(const std::string& name) {
    ConstellationConfig c;
    if (name == "telesat") {
        c.planes = 6;
        c.sats_per_plane = 12;
        c.altitude_km = 1000.0;
        c.inclination_deg = 99.5;
    } else if (name == "kuiper") {
        c.planes = 28;
        c.sats_per_plane = 28;
        c.altitude_km = 590.0;
        c.inclination_deg = 33.0;
    } else if (name == "starlink") {
        c.planes = 72;
        c.sats_per_plane = 22;
        c.altitude_km = 550.0;
        c.inclination_deg = 53.0;
    } else if (name == "2xstarlink") {
        c.planes = 144;
        c.sats_per_plane = 22;
        c.altitude_km = 550.0;
        c.inclination_deg = 53.0;
    } else {
        throw InvalidConfig("unknown constellation preset: " + name);
    }
    c.phasing_deg = 360.0 / double(c.planes * c.sats_per_plane);
    c.min_elevation_deg = 25.0;
    return c;
}

inline void make_battery_defaults(BatteryState& b) {
    b.level = 0.85;
    b.life = 5.0;
    b.life_max = 5.0;
    b.wear_shape = 1.0;
    b.capacity_j = 3.6e6;
}

inline ScenarioConfig default_scenario_config() {
    ScenarioConfig cfg;
    cfg.constellation = preset_constellation(cfg.preset);
    make_battery_defaults(cfg.battery_init);
    // Scenarios model the congested regime offloading is meant to relieve:
    // inter-satellite links run hot while ground links have spare headroom.
    cfg.latency.isl_load = 0.8;
    return cfg;
}

// ---- flat INI-style parsing -------------------------------------------------

using IniSections = std::map<std::string, std::map<std::string, std::string>>;

inline IniSections parse_ini(const std::string& text) {
    IniSections out;
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw InvalidConfig("config line " + std::to_string(line_no) +
                                    ": unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            out.try_emplace(section);
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw InvalidConfig("config line " + std::to_string(line_no) + ": expected key = value");
        out[section][trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return out;
}

namespace detail {

inline double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw InvalidConfig("config value for '" + key + "' is not a number: " + v);
    }
}

inline std::int64_t to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        std::int64_t i = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw InvalidConfig("config value for '" + key + "' is not an integer: " + v);
    }
}

}  // namespace detail

// Applies parsed sections onto a config; unknown keys are rejected so typos
// fail loudly instead of silently running defaults.
inline void apply_ini(ScenarioConfig& cfg, const IniSections& ini) {
    for (const auto& [section, kv] : ini) {
        for (const auto& [key, value] : kv) {
            auto num = [&] { return detail::to_double(key, value); };
            auto integer = [&] { return detail::to_int(key, value); };
            if (section == "scenario") {
                if (key == "preset") {
                    cfg.preset = value;
                    if (value != "custom") cfg.constellation = preset_constellation(value);
                } else if (key == "scheme") {
                    auto s = parse_scheme(value);
                    if (!s) throw InvalidConfig("unknown scheme: " + value);
                    cfg.scheme = *s;
                } else if (key == "seed") {
                    cfg.seed = std::uint64_t(integer());
                } else if (key == "num_intervals") {
                    cfg.num_intervals = int(integer());
                } else if (key == "interval_s") {
                    cfg.interval_s = num();
                } else if (key == "source_rate_mbps") {
                    cfg.source_rate_mbps = num();
                } else if (key == "num_sources") {
                    cfg.num_sources = int(integer());
                } else if (key == "tasks_min") {
                    cfg.tasks_min = int(integer());
                } else if (key == "tasks_max") {
                    cfg.tasks_max = int(integer());
                } else if (key == "delay_req_min_ms") {
                    cfg.delay_req_min_ms = num();
                } else if (key == "delay_req_max_ms") {
                    cfg.delay_req_max_ms = num();
                } else if (key == "bandwidth_req_min_mbps") {
                    cfg.bandwidth_req_min_mbps = num();
                } else if (key == "bandwidth_req_max_mbps") {
                    cfg.bandwidth_req_max_mbps = num();
                } else if (key == "budget") {
                    cfg.budget = num();
                } else if (key == "group_rounds") {
                    cfg.group_rounds = int(integer());
                } else if (key == "layer_width") {
                    cfg.layer_width = int(integer());
                } else {
                    throw InvalidConfig("unknown key [scenario] " + key);
                }
            } else if (section == "constellation") {
                if (key == "planes") cfg.constellation.planes = int(integer());
                else if (key == "sats_per_plane") cfg.constellation.sats_per_plane = int(integer());
                else if (key == "altitude_km") cfg.constellation.altitude_km = num();
                else if (key == "inclination_deg") cfg.constellation.inclination_deg = num();
                else if (key == "phasing_deg") cfg.constellation.phasing_deg = num();
                else if (key == "min_elevation_deg") cfg.constellation.min_elevation_deg = num();
                else throw InvalidConfig("unknown key [constellation] " + key);
            } else if (section == "dishes") {
                if (key == "catalog") cfg.dish_catalog = value;
                else if (key == "unreliable_fraction") cfg.unreliable_fraction = num();
                else if (key == "unreliable_failure_rate") cfg.unreliable_failure_rate = num();
                else if (key == "reliable_failure_rate") cfg.reliable_failure_rate = num();
                else throw InvalidConfig("unknown key [dishes] " + key);
            } else if (section == "prices") {
                if (key == "alpha_per_gb") cfg.price_per_gb = num();
                else if (key == "beta_per_s") cfg.price_per_second = num();
                else if (key == "capacity_util_min") cfg.capacity_util_min = num();
                else if (key == "capacity_util_max") cfg.capacity_util_max = num();
                else throw InvalidConfig("unknown key [prices] " + key);
            } else if (section == "weights") {
                if (key == "energy") cfg.weights.energy = num();
                else if (key == "delay") cfg.weights.delay = num();
                else if (key == "life") cfg.weights.life = num();
                else throw InvalidConfig("unknown key [weights] " + key);
            } else if (section == "battery") {
                if (key == "capacity_j") cfg.battery_init.capacity_j = num();
                else if (key == "initial_level") cfg.battery_init.level = num();
                else if (key == "wear_shape") cfg.battery_init.wear_shape = num();
                else if (key == "life_max") {
                    cfg.battery_init.life_max = num();
                    cfg.battery_init.life = cfg.battery_init.life_max;
                } else if (key == "epsilon_j_per_mb") cfg.energy.epsilon_j_per_mb = num();
                else if (key == "idle_draw_w") cfg.energy.idle_draw_w = num();
                else if (key == "solar_charge_w") cfg.energy.solar_charge_w = num();
                else throw InvalidConfig("unknown key [battery] " + key);
            } else if (section == "latency") {
                if (key == "isl_rate_mbps") cfg.latency.isl_rate_mbps = num();
                else if (key == "gsl_rate_mbps") cfg.latency.gsl_rate_mbps = num();
                else if (key == "packet_size_mb") cfg.latency.packet_size_mb = num();
                else if (key == "queue_base_ms") cfg.latency.queue_base_ms = num();
                else if (key == "isl_load") cfg.latency.isl_load = num();
                else if (key == "gsl_load") cfg.latency.gsl_load = num();
                else if (key == "terrestrial_overhead_ms") cfg.latency.terrestrial_overhead_ms = num();
                else throw InvalidConfig("unknown key [latency] " + key);
            } else {
                throw InvalidConfig("unknown config section [" + section + "]");
            }
        }
    }
}

inline void validate_config(const ScenarioConfig& cfg) {
    auto need = [](bool ok, const char* msg) {
        if (!ok) throw InvalidConfig(msg);
    };
    need(cfg.constellation.planes >= 1, "constellation needs at least one plane");
    need(cfg.constellation.sats_per_plane >= 1, "constellation needs satellites per plane");
    need(cfg.constellation.altitude_km > 0.0, "altitude must be positive");
    need(cfg.num_intervals >= 0, "num_intervals must be non-negative");
    need(cfg.interval_s > 0.0, "interval_s must be positive");
    need(cfg.source_rate_mbps >= 0.0, "source_rate_mbps must be non-negative");
    need(cfg.num_sources >= 1, "num_sources must be at least 1");
    need(cfg.tasks_min >= 1 && cfg.tasks_max >= cfg.tasks_min, "task count range is invalid");
    need(cfg.delay_req_min_ms > 0.0 && cfg.delay_req_max_ms >= cfg.delay_req_min_ms,
         "delay requirement range is invalid");
    need(cfg.bandwidth_req_min_mbps > 0.0 &&
             cfg.bandwidth_req_max_mbps >= cfg.bandwidth_req_min_mbps,
         "bandwidth requirement range is invalid");
    need(cfg.budget >= 0.0, "budget must be non-negative (0 = automatic)");
    need(cfg.group_rounds >= 1, "group_rounds must be at least 1");
    need(cfg.layer_width >= 1, "layer_width must be at least 1");
    need(cfg.weights.energy >= 0.0 && cfg.weights.delay >= 0.0 && cfg.weights.life >= 0.0,
         "weights must be non-negative");
    need(cfg.price_per_gb >= 0.0 && cfg.price_per_second >= 0.0, "prices must be non-negative");
    need(cfg.capacity_util_min > 0.0 && cfg.capacity_util_max >= cfg.capacity_util_min &&
             cfg.capacity_util_max <= 1.0,
         "capacity utilization range is invalid");
    need(cfg.battery_init.capacity_j > 0.0, "battery capacity must be positive");
    need(cfg.battery_init.level > 0.0 && cfg.battery_init.level <= 1.0,
         "initial battery level must lie in (0, 1]");
    need(cfg.unreliable_fraction >= 0.0 && cfg.unreliable_fraction <= 1.0,
         "unreliable_fraction must lie in [0, 1]");
    need(cfg.unreliable_failure_rate >= 0.0 && cfg.unreliable_failure_rate <= 1.0 &&
             cfg.reliable_failure_rate >= 0.0 && cfg.reliable_failure_rate <= 1.0,
         "failure rates must lie in [0, 1]");
    need(!cfg.dishes.empty(), "dish catalog is empty");
    for (const auto& d : cfg.dishes) {
        need(d.bandwidth_mbps > 0.0, "every dish needs positive bandwidth");
        need(d.failure_rate >= 0.0 && d.failure_rate <= 1.0,
             "dish failure rates must lie in [0, 1]");
        need(d.location.lat_deg >= -90.0 && d.location.lat_deg <= 90.0,
             "dish latitude outside [-90, 90]");
    }
    need(cfg.latency.isl_load >= 0.0 && cfg.latency.isl_load < 1.0 &&
             cfg.latency.gsl_load >= 0.0 && cfg.latency.gsl_load < 1.0,
         "link loads must lie in [0, 1)");
}

// Loads and validates a config file; a relative dish catalog path is resolved
// against the config file's directory.
inline ScenarioConfig load_scenario_config(const std::string& path) {
    ScenarioConfig cfg = default_scenario_config();
    apply_ini(cfg, parse_ini(read_text_file(path)));
    if (cfg.dish_catalog.empty()) throw InvalidConfig("config lacks [dishes] catalog");
    std::string catalog = cfg.dish_catalog;
    if (!catalog.empty() && catalog.front() != '/') {
        auto slash = path.find_last_of('/');
        if (slash != std::string::npos) catalog = path.substr(0, slash + 1) + catalog;
    }
    cfg.dishes = load_dish_catalog(catalog);
    validate_config(cfg);
    return cfg;
}

// Canonical echo of the effective configuration, written into the out-dir for
// provenance.
inline std::string serialize_config(const ScenarioConfig& cfg) {
    std::ostringstream o;
    o << "[scenario]\n";
    o << "preset = " << cfg.preset << "\n";
    o << "scheme = " << scheme_name(cfg.scheme) << "\n";
    o << "seed = " << cfg.seed << "\n";
    o << "num_intervals = " << cfg.num_intervals << "\n";
    o << "interval_s = " << format_double(cfg.interval_s) << "\n";
    o << "source_rate_mbps = " << format_double(cfg.source_rate_mbps) << "\n";
    o << "num_sources = " << cfg.num_sources << "\n";
    o << "tasks_min = " << cfg.tasks_min << "\n";
    o << "tasks_max = " << cfg.tasks_max << "\n";
    o << "delay_req_min_ms = " << format_double(cfg.delay_req_min_ms) << "\n";
    o << "delay_req_max_ms = " << format_double(cfg.delay_req_max_ms) << "\n";
    o << "bandwidth_req_min_mbps = " << format_double(cfg.bandwidth_req_min_mbps) << "\n";
    o << "bandwidth_req_max_mbps = " << format_double(cfg.bandwidth_req_max_mbps) << "\n";
    o << "budget = " << format_double(cfg.budget) << "\n";
    o << "group_rounds = " << cfg.group_rounds << "\n";
    o << "layer_width = " << cfg.layer_width << "\n";
    o << "\n[constellation]\n";
    o << "planes = " << cfg.constellation.planes << "\n";
    o << "sats_per_plane = " << cfg.constellation.sats_per_plane << "\n";
    o << "altitude_km = " << format_double(cfg.constellation.altitude_km) << "\n";
    o << "inclination_deg = " << format_double(cfg.constellation.inclination_deg) << "\n";
    o << "phasing_deg = " << format_double(cfg.constellation.phasing_deg) << "\n";
    o << "min_elevation_deg = " << format_double(cfg.constellation.min_elevation_deg) << "\n";
    o << "\n[dishes]\n";
    o << "catalog = " << cfg.dish_catalog << "\n";
    o << "unreliable_fraction = " << format_double(cfg.unreliable_fraction) << "\n";
    o << "unreliable_failure_rate = " << format_double(cfg.unreliable_failure_rate) << "\n";
    o << "reliable_failure_rate = " << format_double(cfg.reliable_failure_rate) << "\n";
    o << "\n[prices]\n";
    o << "alpha_per_gb = " << format_double(cfg.price_per_gb) << "\n";
    o << "beta_per_s = " << format_double(cfg.price_per_second) << "\n";
    o << "capacity_util_min = " << format_double(cfg.capacity_util_min) << "\n";
    o << "capacity_util_max = " << format_double(cfg.capacity_util_max) << "\n";
    o << "\n[weights]\n";
    o << "energy = " << format_double(cfg.weights.energy) << "\n";
    o << "delay = " << format_double(cfg.weights.delay) << "\n";
    o << "life = " << format_double(cfg.weights.life) << "\n";
    o << "\n[battery]\n";
    o << "capacity_j = " << format_double(cfg.battery_init.capacity_j) << "\n";
    o << "initial_level = " << format_double(cfg.battery_init.level) << "\n";
    o << "wear_shape = " << format_double(cfg.battery_init.wear_shape) << "\n";
    o << "life_max = " << format_double(cfg.battery_init.life_max) << "\n";
    o << "epsilon_j_per_mb = " << format_double(cfg.energy.epsilon_j_per_mb) << "\n";
    o << "idle_draw_w = " << format_double(cfg.energy.idle_draw_w) << "\n";
    o << "solar_charge_w = " << format_double(cfg.energy.solar_charge_w) << "\n";
    o << "\n[latency]\n";
    o << "isl_rate_mbps = " << format_double(cfg.latency.isl_rate_mbps) << "\n";
    o << "gsl_rate_mbps = " << format_double(cfg.latency.gsl_rate_mbps) << "\n";
    o << "packet_size_mb = " << format_double(cfg.latency.packet_size_mb) << "\n";
    o << "queue_base_ms = " << format_double(cfg.latency.queue_base_ms) << "\n";
    o << "isl_load = " << format_double(cfg.latency.isl_load) << "\n";
    o << "gsl_load = " << format_double(cfg.latency.gsl_load) << "\n";
    o << "terrestrial_overhead_ms = " << format_double(cfg.latency.terrestrial_overhead_ms)
      << "\n";
    return o.str();
}

}  // namespace susco
