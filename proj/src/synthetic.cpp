#include "lighthouse/synthetic.hpp"

#include <algorithm>
#include <cmath>

namespace lighthouse {

namespace {

// Planar degree-space distance with latitude scaling; plenty for toy worlds.
bool inside_blob(double lat, double lon, double c_lat, double c_lon,
                 double radius, const double a[4], const double p[4]) {
  double dlat = lat - c_lat;
  double dlon = (lon - c_lon) * std::cos(deg2rad(c_lat));
  double r2 = dlat * dlat + dlon * dlon;
  double rmax = radius * 1.9;
  if (r2 > rmax * rmax) return false;
  double theta = std::atan2(dlon, dlat);
  double wobble = 0.0;
  for (int k = 0; k < 4; ++k) {
    wobble += a[k] * std::sin((k + 2) * theta + p[k]);
  }
  double r_theta = radius * std::max(0.15, 1.0 + wobble);
  return r2 <= r_theta * r_theta;
}

}  // namespace

std::vector<RasterTile> generate_world(const SyntheticWorldSpec& spec) {
  if (spec.grid < 2) {
    raise(ErrorCode::invalid_argument, "synthetic grid must be >= 2");
  }
  if (spec.tiles_lat < 1 || spec.tiles_lon < 1) {
    raise(ErrorCode::invalid_argument, "synthetic extent must be >= 1x1 tiles");
  }
  DetRng rng(spec.seed);

  std::vector<Island> islands = spec.fixed_islands;
  if (islands.empty()) {
    double lat_lo = spec.lat0 + 0.2, lat_hi = spec.lat0 + spec.tiles_lat - 0.2;
    double lon_lo = spec.lon0 + 0.2, lon_hi = spec.lon0 + spec.tiles_lon - 0.2;
    for (int i = 0; i < spec.islands; ++i) {
      Island is;
      is.lat = rng.range(lat_lo, lat_hi);
      is.lon = rng.range(lon_lo, lon_hi);
      is.radius_deg = rng.range(spec.min_radius_deg, spec.max_radius_deg);
      is.land_class = uint8_t(1 + rng.below(3));
      for (int k = 0; k < 4; ++k) {
        is.noise_a[k] = spec.noise_amp * rng.range(-1.0, 1.0) / (k + 1);
        is.noise_p[k] = rng.range(0.0, 2.0 * kPi);
      }
      if (rng.unit() < spec.lake_fraction && is.radius_deg > 0.25) {
        is.lake_radius_deg = is.radius_deg * rng.range(0.2, 0.45);
        is.lake_dlat = is.radius_deg * rng.range(-0.25, 0.25);
        is.lake_dlon = is.radius_deg * rng.range(-0.25, 0.25);
      }
      islands.push_back(is);
    }
  }

  static const double kNoNoise[4] = {0, 0, 0, 0};
  std::vector<RasterTile> tiles;
  tiles.reserve(size_t(spec.tiles_lat) * size_t(spec.tiles_lon));
  for (int tlat = spec.lat0; tlat < spec.lat0 + spec.tiles_lat; ++tlat) {
    for (int tlon = spec.lon0; tlon < spec.lon0 + spec.tiles_lon; ++tlon) {
      RasterTile tile;
      tile.tile = TileId{int16_t(tlat), int16_t(tlon)};
      tile.n_rows = spec.grid;
      tile.n_cols = spec.grid;
      tile.classes.assign(size_t(spec.grid) * size_t(spec.grid), kWaterClass);

      // Skip islands that cannot reach this tile.
      std::vector<const Island*> near;
      for (const auto& is : islands) {
        double reach = is.radius_deg * 1.9 + 0.01;
        if (is.lat + reach < tlat || is.lat - reach > tlat + 1) continue;
        double scale = std::cos(deg2rad(is.lat));
        double lon_reach = scale > 0.01 ? reach / scale : 360.0;
        if (is.lon + lon_reach < tlon || is.lon - lon_reach > tlon + 1) continue;
        near.push_back(&is);
      }
      if (near.empty()) {
        tiles.push_back(std::move(tile));
        continue;
      }

      for (int row = 0; row < spec.grid; ++row) {
        double lat = tlat + 1.0 - (row + 0.5) / spec.grid;
        for (int col = 0; col < spec.grid; ++col) {
          double lon = tlon + (col + 0.5) / spec.grid;
          uint8_t cls = kWaterClass;
          for (const Island* is : near) {
            if (!inside_blob(lat, lon, is->lat, is->lon, is->radius_deg,
                             is->noise_a, is->noise_p)) {
              continue;
            }
            if (is->lake_radius_deg > 0 &&
                inside_blob(lat, lon, is->lat + is->lake_dlat,
                            is->lon + is->lake_dlon, is->lake_radius_deg,
                            kNoNoise, kNoNoise)) {
              continue;  // lake stays water
            }
            cls = is->land_class;
            break;
          }
          tile.at(row, col) = cls;
        }
      }
      tiles.push_back(std::move(tile));
    }
  }
  return tiles;
}

std::vector<GeoPoint> sample_stratified(const Manifest& m, size_t count,
                                        double frac_inside, double frac_border,
                                        double frac_high_seas, DetRng& rng,
                                        double border_deg) {
  if (m.tiles.empty()) {
    raise(ErrorCode::invalid_argument, "manifest has no tiles");
  }
  double total = frac_inside + frac_border + frac_high_seas;
  if (!(total > 0)) {
    raise(ErrorCode::invalid_argument, "sample fractions must sum > 0");
  }
  size_t n_inside = size_t(std::floor(count * frac_inside / total));
  size_t n_border = size_t(std::floor(count * frac_border / total));

  auto random_global = [&]() {
    // Area-uniform on the sphere.
    double lat = rad2deg(std::asin(2.0 * rng.unit() - 1.0));
    double lon = rng.range(-180.0, 180.0);
    return GeoPoint(std::clamp(lat, -90.0, 90.0), lon);
  };

  std::vector<GeoPoint> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    if (i < n_inside) {
      const auto& t = m.tiles[rng.below(m.tiles.size())];
      out.emplace_back(t.tile.lat_floor + rng.unit(),
                       t.tile.lon_floor + rng.unit());
    } else if (i < n_inside + n_border) {
      const auto& t = m.tiles[rng.below(m.tiles.size())];
      // A point within border_deg of one of the tile's four boundaries,
      // possibly just outside it.
      double u = rng.range(-border_deg, border_deg);
      double along = rng.unit();
      GeoPoint p(0, 0);
      switch (rng.below(4)) {
        case 0: p = GeoPoint(std::clamp(t.tile.lat_floor + u, -90.0, 90.0),
                             t.tile.lon_floor + along); break;
        case 1: p = GeoPoint(std::clamp(t.tile.lat_floor + 1 + u, -90.0, 90.0),
                             t.tile.lon_floor + along); break;
        case 2: p = GeoPoint(t.tile.lat_floor + along, t.tile.lon_floor + u); break;
        default: p = GeoPoint(t.tile.lat_floor + along,
                              t.tile.lon_floor + 1 + u); break;
      }
      out.push_back(p);
    } else {
      GeoPoint p(0, 0);
      do {
        p = random_global();
      } while (m.find(tile_of(p)) != nullptr);
      out.push_back(p);
    }
  }
  return out;
}

}  // namespace lighthouse
