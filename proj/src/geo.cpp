#include "lighthouse/geo.hpp"

#include <algorithm>
#include <cmath>

namespace lighthouse {

double normalize_lon(double lon_deg) {
  double l = std::fmod(lon_deg + 180.0, 360.0);
  if (l < 0.0) l += 360.0;
  return l - 180.0;
}

GeoPoint::GeoPoint(double lat_deg, double lon_deg) {
  if (!(lat_deg >= -90.0 && lat_deg <= 90.0)) {
    raise(ErrorCode::invalid_argument,
          "latitude out of range [-90, 90]: " + std::to_string(lat_deg));
  }
  if (!std::isfinite(lon_deg)) {
    raise(ErrorCode::invalid_argument, "longitude is not finite");
  }
  lat = lat_deg;
  lon = normalize_lon(lon_deg);
}

GeoPoint GeoPoint::from_radians(double lat_rad, double lon_rad) {
  // rad2deg of asin/atan2 output can overshoot 90 by an ulp; clamp rather
  // than reject.
  double lat_deg = std::clamp(rad2deg(lat_rad), -90.0, 90.0);
  return GeoPoint(lat_deg, rad2deg(lon_rad));
}

UnitVec3 to_unit_vec(const GeoPoint& p) {
  double phi = p.lat_rad();
  double lam = p.lon_rad();
  double cphi = std::cos(phi);
  return UnitVec3(cphi * std::cos(lam), cphi * std::sin(lam), std::sin(phi));
}

GeoPoint to_geo_point(const UnitVec3& v) {
  double lat_rad = std::atan2(v.z(), std::hypot(v.x(), v.y()));
  double lon_rad = std::atan2(v.y(), v.x());
  return GeoPoint::from_radians(lat_rad, lon_rad);
}

std::string TileId::name() const {
  return std::to_string(lat_floor) + "_" + std::to_string(lon_floor);
}

TileId tile_of(const GeoPoint& p) {
  int lat_floor = int(std::floor(p.lat));
  if (lat_floor == 90) lat_floor = 89;  // north pole clamp
  int lon_floor = int(std::floor(p.lon));
  return TileId{int16_t(lat_floor), int16_t(lon_floor)};
}

double central_angle_rad(double lat1_rad, double lon1_rad, double lat2_rad,
                         double lon2_rad) {
  double sdlat = std::sin((lat2_rad - lat1_rad) * 0.5);
  double sdlon = std::sin((lon2_rad - lon1_rad) * 0.5);
  double h = sdlat * sdlat +
             std::cos(lat1_rad) * std::cos(lat2_rad) * sdlon * sdlon;
  if (h > 1.0) h = 1.0;  // guard near antipodes
  return 2.0 * std::asin(std::sqrt(h));
}

double haversine_m(const GeoPoint& a, const GeoPoint& b) {
  return central_angle_rad(a.lat_rad(), a.lon_rad(), b.lat_rad(), b.lon_rad()) *
         kEarthRadiusM;
}

double min_distance_to_tile_boundary(const GeoPoint& p, const TileId& t) {
  if (tile_of(p) != t) {
    raise(ErrorCode::out_of_range,
          "point (" + std::to_string(p.lat) + ", " + std::to_string(p.lon) +
              ") is not inside tile " + t.name());
  }
  double dlat_s = p.lat - t.lat_floor;
  double dlat_n = (t.lat_floor + 1.0) - p.lat;
  double dlon = std::min(p.lon - t.lon_floor, (t.lon_floor + 1.0) - p.lon);
  // Distance to the nearest bounding meridian is asin(cos(lat)*sin(dlon));
  // sin(dlon)*cos(phi_max) is a cheap bound that never exceeds it.
  double phi_max =
      deg2rad(std::max(std::abs(double(t.lat_floor)),
                       std::abs(double(t.lat_floor) + 1.0)));
  double lon_bound = std::sin(deg2rad(dlon)) * std::cos(phi_max);
  double bound = std::min({deg2rad(dlat_s), deg2rad(dlat_n), lon_bound});
  return std::max(0.0, bound) * kEarthRadiusM;
}

}  // namespace lighthouse
