#pragma once

#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

#include <Eigen/Dense>

#include "lighthouse/errors.hpp"

namespace lighthouse {

// IUGG mean Earth radius, in meters. One constant shared by the whole
// engine (query path, oracles, audits) so distances agree bit for bit.
inline constexpr double kEarthRadiusM = 6371008.8;

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * (kPi / 180.0); }
inline double rad2deg(double r) { return r * (180.0 / kPi); }

// Wraps a longitude into [-180, 180).
double normalize_lon(double lon_deg);

// Latitude/longitude in degrees. lat is validated into [-90, 90] and lon
// wrapped into [-180, 180) on construction; default is (0, 0).
struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  GeoPoint() = default;
  GeoPoint(double lat_deg, double lon_deg);

  static GeoPoint from_radians(double lat_rad, double lon_rad);

  double lat_rad() const { return deg2rad(lat); }
  double lon_rad() const { return deg2rad(lon); }

  bool operator==(const GeoPoint&) const = default;
};

using UnitVec3 = Eigen::Vector3d;

UnitVec3 to_unit_vec(const GeoPoint& p);
GeoPoint to_geo_point(const UnitVec3& v);

// The 1x1 degree half-open cell
// [lat_floor, lat_floor+1) x [lon_floor, lon_floor+1).
struct TileId {
  int16_t lat_floor = 0;
  int16_t lon_floor = 0;

  auto operator<=>(const TileId&) const = default;

  std::string name() const;  // e.g. "47_-123"
};

struct TileIdHash {
  size_t operator()(const TileId& t) const {
    return std::hash<uint32_t>()((uint32_t(uint16_t(t.lat_floor)) << 16) |
                                 uint16_t(t.lon_floor));
  }
};

// Floor cell containing p. The exact north pole (lat == 90) is clamped to
// lat_floor 89 so every valid GeoPoint maps to a tile.
TileId tile_of(const GeoPoint& p);

// Central angle between two (lat, lon) pairs given in radians, in radians.
double central_angle_rad(double lat1_rad, double lon1_rad, double lat2_rad,
                         double lon2_rad);

// Great-circle distance in meters on the sphere of radius kEarthRadiusM.
double haversine_m(const GeoPoint& a, const GeoPoint& b);

// Conservative lower bound on the great-circle distance from p to any point
// outside tile t; never larger than the true minimum. p must lie inside t.
double min_distance_to_tile_boundary(const GeoPoint& p, const TileId& t);

}  // namespace lighthouse
