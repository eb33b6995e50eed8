#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "susco/errors.hpp"
#include "susco/geo.hpp"

namespace susco {

struct ConstellationConfig {
    int planes = 1;
    int sats_per_plane = 1;
    double altitude_km = 550.0;
    double inclination_deg = 53.0;
    double phasing_deg = 0.0;  // per-plane along-track offset
    double min_elevation_deg = 25.0;
};

struct SatelliteOrbit {
    SatelliteId id = 0;
    double raan_rad = 0.0;
    double inclination_rad = 0.0;
    double anomaly0_rad = 0.0;  // argument of latitude at epoch
    double radius_km = 0.0;
};

enum class DishKind { ground_station, base_station };

struct Dish {
    DishId id = 0;
    GeoPoint location;
    double bandwidth_mbps = 0.0;
    double failure_rate = 0.0;
    DishKind kind = DishKind::ground_station;
};

struct LatencyParams {
    double isl_rate_mbps = 1000.0;
    double gsl_rate_mbps = 500.0;
    double packet_size_mb = 1.0;
    double queue_base_ms = 2.0;
    double isl_load = 0.5;
    double gsl_load = 0.3;
    double terrestrial_overhead_ms = 10.0;
};

// Evenly phased circular-orbit shell: planes spread over 360 degrees of node,
// slots spread over 360 degrees of anomaly, adjacent planes offset by phasing.
inline std::vector<SatelliteOrbit> generate_walker(const ConstellationConfig& cfg) {
    if (cfg.planes < 1 || cfg.sats_per_plane < 1)
        throw InvalidConfig("walker shell needs at least one plane and one slot");
    std::vector<SatelliteOrbit> sats;
    sats.reserve(std::size_t(cfg.planes) * cfg.sats_per_plane);
    double r = kEarthRadiusKm + cfg.altitude_km;
    for (int p = 0; p < cfg.planes; ++p) {
        double raan = 2.0 * kPi * p / cfg.planes;
        for (int s = 0; s < cfg.sats_per_plane; ++s) {
            SatelliteOrbit o;
            o.id = SatelliteId(p * cfg.sats_per_plane + s);
            o.raan_rad = raan;
            o.inclination_rad = cfg.inclination_deg * kDeg2Rad;
            o.anomaly0_rad = 2.0 * kPi * s / cfg.sats_per_plane + p * cfg.phasing_deg * kDeg2Rad;
            o.radius_km = r;
            sats.push_back(o);
        }
    }
    return sats;
}

inline double orbital_period_s(double radius_km) {
    return 2.0 * kPi * std::sqrt(radius_km * radius_km * radius_km / kMuEarth);
}

// Two-body circular propagation to an inertial position.
inline Vec3 propagate(const SatelliteOrbit& o, double t_s) {
    double n = std::sqrt(kMuEarth / (o.radius_km * o.radius_km * o.radius_km));
    double u = o.anomaly0_rad + n * t_s;
    double cu = std::cos(u), su = std::sin(u);
    double ci = std::cos(o.inclination_rad), si = std::sin(o.inclination_rad);
    double co = std::cos(o.raan_rad), so = std::sin(o.raan_rad);
    // in-plane -> rotate by inclination about x -> rotate by node about z
    double x = o.radius_km * cu, y = o.radius_km * su;
    return {x * co - y * ci * so, x * so + y * ci * co, y * si};
}

// Unit vector to the sun, modeled as rotating in the equatorial plane once per year.
inline Vec3 sun_direction(double t_s) {
    double a = 2.0 * kPi * t_s / kYearSeconds;
    return {std::cos(a), std::sin(a), 0.0};
}

// Cylindrical shadow: behind the terminator plane and within one Earth radius
// of the shadow axis.
inline bool in_eclipse(const Vec3& sat_pos, const Vec3& sun_dir) {
    double along = dot(sat_pos, sun_dir);
    if (along >= 0.0) return false;
    Vec3 perp = sat_pos - sun_dir * along;
    return norm(perp) < kEarthRadiusKm;
}

inline bool dish_sees(const Vec3& dish_pos, const Vec3& sat_pos, double min_elevation_deg) {
    return elevation_deg(dish_pos, sat_pos) >= min_elevation_deg;
}

// Propagation plus store-and-forward plus an M/M/1-style queuing term.
inline double link_latency_ms(double distance_km, double rate_mbps, double packet_size_mb,
                              double queue_base_ms, double load) {
    if (load >= 1.0 || load < 0.0) throw SaturatedLink("link load outside [0, 1)");
    double propagation_ms = distance_km / kLightSpeedKmS * 1000.0;
    double transmission_ms = rate_mbps > 0.0 ? packet_size_mb / rate_mbps * 1000.0 : 0.0;
    double queueing_ms = queue_base_ms * load / (1.0 - load);
    return propagation_ms + transmission_ms + queueing_ms;
}

inline double terrestrial_latency_ms(const GeoPoint& a, const GeoPoint& b,
                                     const LatencyParams& lp) {
    double d = great_circle_km(a, b);
    return d / (kLightSpeedKmS * 2.0 / 3.0) * 1000.0 + lp.terrestrial_overhead_ms;
}

struct IslEdge {
    SatelliteId to = 0;
    double latency_ms = 0.0;
};

// One interval's frozen view of the system. Visibility holds only if the dish
// sees the satellite at the interval start, midpoint, and end.
struct Snapshot {
    double t_mid_s = 0.0;
    double interval_s = 0.0;
    Vec3 sun;
    std::vector<Vec3> sat_pos;                    // by satellite id
    std::vector<std::vector<IslEdge>> isl;        // by satellite id, sorted by neighbor
    std::vector<std::vector<DishId>> sat_dishes;  // visible dishes by satellite id
    std::vector<Vec3> dish_pos;                   // by dish index
    std::vector<Dish> dishes;

    const Dish* find_dish(DishId id) const {
        for (const auto& d : dishes)
            if (d.id == id) return &d;
        return nullptr;
    }
    const Vec3* find_dish_pos(DishId id) const {
        for (std::size_t i = 0; i < dishes.size(); ++i)
            if (dishes[i].id == id) return &dish_pos[i];
        return nullptr;
    }
};

// Four-neighbor grid: both along-track neighbors plus the same slot in both
// adjacent planes, seam included.
inline std::vector<std::vector<IslEdge>> grid_isl_edges(const ConstellationConfig& cfg,
                                                        const std::vector<Vec3>& pos,
                                                        const LatencyParams& lp) {
    int P = cfg.planes, S = cfg.sats_per_plane;
    auto sid = [&](int p, int s) {
        return SatelliteId(((p + P) % P) * S + (s + S) % S);
    };
    std::vector<std::vector<IslEdge>> adj(std::size_t(P) * S);
    for (int p = 0; p < P; ++p) {
        for (int s = 0; s < S; ++s) {
            SatelliteId a = sid(p, s);
            std::vector<SatelliteId> nbr;
            if (S > 1) {
                nbr.push_back(sid(p, s + 1));
                if (S > 2) nbr.push_back(sid(p, s - 1));
            }
            if (P > 1) {
                nbr.push_back(sid(p + 1, s));
                if (P > 2) nbr.push_back(sid(p - 1, s));
            }
            std::sort(nbr.begin(), nbr.end());
            nbr.erase(std::unique(nbr.begin(), nbr.end()), nbr.end());
            for (SatelliteId b : nbr) {
                if (b == a) continue;
                double d = distance(pos[std::size_t(a)], pos[std::size_t(b)]);
                adj[std::size_t(a)].push_back(
                    {b, link_latency_ms(d, lp.isl_rate_mbps, lp.packet_size_mb, lp.queue_base_ms,
                                        lp.isl_load)});
            }
        }
    }
    return adj;
}

inline Snapshot build_snapshot(const std::vector<SatelliteOrbit>& sats,
                               const std::vector<Dish>& dishes, const ConstellationConfig& cfg,
                               const LatencyParams& lp, std::int64_t interval_index,
                               double interval_s) {
    Snapshot snap;
    snap.interval_s = interval_s;
    double t0 = interval_index * interval_s;
    double t1 = t0 + interval_s;
    snap.t_mid_s = 0.5 * (t0 + t1);
    snap.sun = sun_direction(snap.t_mid_s);

    snap.sat_pos.resize(sats.size());
    std::vector<Vec3> pos0(sats.size()), pos1(sats.size());
    for (const auto& o : sats) {
        pos0[std::size_t(o.id)] = propagate(o, t0);
        snap.sat_pos[std::size_t(o.id)] = propagate(o, snap.t_mid_s);
        pos1[std::size_t(o.id)] = propagate(o, t1);
    }
    snap.isl = grid_isl_edges(cfg, snap.sat_pos, lp);

    snap.dishes = dishes;
    snap.dish_pos.resize(dishes.size());
    snap.sat_dishes.assign(sats.size(), {});
    for (std::size_t di = 0; di < dishes.size(); ++di) {
        Vec3 g0 = ground_position_eci(dishes[di].location, t0);
        Vec3 gm = ground_position_eci(dishes[di].location, snap.t_mid_s);
        Vec3 g1 = ground_position_eci(dishes[di].location, t1);
        snap.dish_pos[di] = gm;
        for (const auto& o : sats) {
            std::size_t si = std::size_t(o.id);
            if (dish_sees(g0, pos0[si], cfg.min_elevation_deg) &&
                dish_sees(gm, snap.sat_pos[si], cfg.min_elevation_deg) &&
                dish_sees(g1, pos1[si], cfg.min_elevation_deg))
                snap.sat_dishes[si].push_back(dishes[di].id);
        }
    }
    for (auto& v : snap.sat_dishes) std::sort(v.begin(), v.end());
    return snap;
}

inline double gsl_latency_ms(const Snapshot& snap, SatelliteId sat, DishId dish,
                             const LatencyParams& lp) {
    const Vec3* dp = snap.find_dish_pos(dish);
    if (dp == nullptr) throw InvalidConfig("unknown dish id");
    double d = distance(snap.sat_pos[std::size_t(sat)], *dp);
    return link_latency_ms(d, lp.gsl_rate_mbps, lp.packet_size_mb, lp.queue_base_ms, lp.gsl_load);
}

// Minimum-latency route over the ISL mesh. Ties between equal-latency paths
// resolve toward the smaller predecessor id so routes are reproducible.
inline std::vector<SatelliteId> original_path(const Snapshot& snap, SatelliteId src,
                                              SatelliteId dst) {
    std::size_t n = snap.sat_pos.size();
    if (std::size_t(src) >= n || std::size_t(dst) >= n) throw NoRoute("endpoint outside mesh");
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<SatelliteId> pred(n, -1);
    using Item = std::pair<double, SatelliteId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    dist[std::size_t(src)] = 0.0;
    pq.push({0.0, src});
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[std::size_t(u)]) continue;
        for (const auto& e : snap.isl[std::size_t(u)]) {
            double nd = d + e.latency_ms;
            std::size_t v = std::size_t(e.to);
            if (nd < dist[v]) {
                dist[v] = nd;
                pred[v] = u;
                pq.push({nd, e.to});
            } else if (nd == dist[v] && pred[v] >= 0 && u < pred[v]) {
                pred[v] = u;
            }
        }
    }
    if (!std::isfinite(dist[std::size_t(dst)])) throw NoRoute("satellites not connected");
    std::vector<SatelliteId> path;
    for (SatelliteId v = dst; v != -1; v = pred[std::size_t(v)]) path.push_back(v);
    std::reverse(path.begin(), path.end());
    if (path.front() != src) throw NoRoute("satellites not connected");
    return path;
}

inline std::vector<double> path_hop_latencies(const Snapshot& snap,
                                              const std::vector<SatelliteId>& path) {
    std::vector<double> hops;
    hops.reserve(path.size() > 0 ? path.size() - 1 : 0);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        double lat = -1.0;
        for (const auto& e : snap.isl[std::size_t(path[i])])
            if (e.to == path[i + 1]) {
                lat = e.latency_ms;
                break;
            }
        if (lat < 0.0) throw NoRoute("path uses a missing link");
        hops.push_back(lat);
    }
    return hops;
}

// Closest satellite that can see the dish at this snapshot; -1 when none can.
inline SatelliteId nearest_visible_satellite(const Snapshot& snap, DishId dish) {
    const Vec3* dp = snap.find_dish_pos(dish);
    if (dp == nullptr) return -1;
    SatelliteId best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t si = 0; si < snap.sat_pos.size(); ++si) {
        const auto& vis = snap.sat_dishes[si];
        if (!std::binary_search(vis.begin(), vis.end(), dish)) continue;
        double d = distance(snap.sat_pos[si], *dp);
        if (d < best_d) {
            best_d = d;
            best = SatelliteId(si);
        }
    }
    return best;
}

}  // namespace susco
