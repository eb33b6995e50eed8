#pragma once

#include <cmath>
#include <cstdint>

namespace susco {

using SatelliteId = std::int32_t;
using DishId = std::int32_t;
using TaskId = std::int64_t;

inline constexpr double kEarthRadiusKm = 6371.0;            // spherical model
inline constexpr double kMuEarth = 398600.4418;             // km^3/s^2
inline constexpr double kLightSpeedKmS = 299792.458;
inline constexpr double kEarthRotationRadS = 7.2921159e-5;  // sidereal
inline constexpr double kYearSeconds = 365.25 * 86400.0;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDeg2Rad = kPi / 180.0;

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalized(const Vec3& v) {
    double n = norm(v);
    return n > 0.0 ? v * (1.0 / n) : v;
}
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }

struct GeoPoint {
    double lat_deg = 0.0;
    double lon_deg = 0.0;
};

// Inertial position of a point fixed to the (spherical) rotating Earth.
inline Vec3 ground_position_eci(const GeoPoint& p, double t_since_epoch_s) {
    double lat = p.lat_deg * kDeg2Rad;
    double lon = p.lon_deg * kDeg2Rad + kEarthRotationRadS * t_since_epoch_s;
    double c = std::cos(lat);
    return {kEarthRadiusKm * c * std::cos(lon), kEarthRadiusKm * c * std::sin(lon),
            kEarthRadiusKm * std::sin(lat)};
}

// Elevation of a target above the local horizon of a ground point, degrees.
inline double elevation_deg(const Vec3& ground, const Vec3& target) {
    Vec3 up = normalized(ground);
    Vec3 los = target - ground;
    double r = norm(los);
    if (r <= 0.0) return 90.0;
    double s = dot(up, los) / r;
    s = std::fmax(-1.0, std::fmin(1.0, s));
    return std::asin(s) / kDeg2Rad;
}

inline double great_circle_km(const GeoPoint& a, const GeoPoint& b) {
    double la1 = a.lat_deg * kDeg2Rad, lo1 = a.lon_deg * kDeg2Rad;
    double la2 = b.lat_deg * kDeg2Rad, lo2 = b.lon_deg * kDeg2Rad;
    double s1 = std::sin((la2 - la1) / 2.0), s2 = std::sin((lo2 - lo1) / 2.0);
    double h = s1 * s1 + std::cos(la1) * std::cos(la2) * s2 * s2;
    h = std::fmax(0.0, std::fmin(1.0, h));
    return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

}  // namespace susco
