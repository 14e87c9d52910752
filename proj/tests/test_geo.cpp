#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "lighthouse/geo.hpp"
#include "lighthouse/synthetic.hpp"

using namespace lighthouse;

namespace {

// Independent transcription of the haversine formula (atan2 form), used as
// the oracle for the production implementation.
double haversine_reference_m(const GeoPoint& a, const GeoPoint& b) {
  double phi1 = a.lat * kPi / 180.0, phi2 = b.lat * kPi / 180.0;
  double dphi = (b.lat - a.lat) * kPi / 180.0;
  double dlam = (b.lon - a.lon) * kPi / 180.0;
  double s1 = std::sin(dphi / 2.0), s2 = std::sin(dlam / 2.0);
  double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  double c = 2.0 * std::atan2(std::sqrt(h), std::sqrt(1.0 - h));
  return kEarthRadiusM * c;
}

GeoPoint random_point(DetRng& rng) {
  return GeoPoint(rad2deg(std::asin(2.0 * rng.unit() - 1.0)),
                  rng.range(-180.0, 180.0));
}

}  // namespace

TEST_CASE("haversine canonical values") {
  CHECK(haversine_m(GeoPoint(0, 0), GeoPoint(0, 0)) == 0.0);
  // Quarter great circle: (pi/2) * R.
  CHECK(std::abs(haversine_m(GeoPoint(0, 0), GeoPoint(0, 90)) - 10007543.4) <
        0.1);
  // Meridian arc of 0.001 degrees: R * dphi.
  CHECK(std::abs(haversine_m(GeoPoint(0, 0), GeoPoint(0.001, 0)) - 111.1949) <
        1e-3);
}

TEST_CASE("haversine matches an independent transcription") {
  DetRng rng(101);
  for (int i = 0; i < 1000; ++i) {
    GeoPoint a = random_point(rng), b = random_point(rng);
    double got = haversine_m(a, b);
    double want = haversine_reference_m(a, b);
    CHECK(std::abs(got - want) <= 1e-9 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("haversine symmetry is exact") {
  DetRng rng(102);
  for (int i = 0; i < 500; ++i) {
    GeoPoint a = random_point(rng), b = random_point(rng);
    CHECK(haversine_m(a, b) == haversine_m(b, a));
  }
}

TEST_CASE("triangle inequality") {
  DetRng rng(103);
  for (int i = 0; i < 500; ++i) {
    GeoPoint a = random_point(rng), b = random_point(rng), c = random_point(rng);
    CHECK(haversine_m(a, c) <= haversine_m(a, b) + haversine_m(b, c) + 1e-6);
  }
}

TEST_CASE("GeoPoint validation and longitude wrap") {
  CHECK(GeoPoint(0, 180.0).lon == -180.0);
  CHECK(GeoPoint(0, 359.5).lon == doctest::Approx(-0.5));
  CHECK(GeoPoint(0, -180.0).lon == -180.0);
  CHECK(GeoPoint(0, 540.0).lon == -180.0);
  CHECK(GeoPoint(0, 100.25).lon == 100.25);
  CHECK_THROWS_AS(GeoPoint(91, 0), Error);
  CHECK_THROWS_AS(GeoPoint(-90.0001, 0), Error);
  CHECK_THROWS_AS(GeoPoint(std::nan(""), 0), Error);
  CHECK_THROWS_AS(GeoPoint(0, std::numeric_limits<double>::infinity()), Error);
  CHECK(GeoPoint(90, 0).lat == 90.0);
  CHECK(GeoPoint(-90, 0).lat == -90.0);
}

TEST_CASE("tile_of") {
  CHECK(tile_of(GeoPoint(47.65, -122.35)) == TileId{47, -123});
  CHECK(tile_of(GeoPoint(-0.5, 0.5)) == TileId{-1, 0});
  CHECK(tile_of(GeoPoint(90, 0)) == TileId{89, 0});  // pole clamp
  CHECK(tile_of(GeoPoint(-90, -180)) == TileId{-90, -180});
  CHECK(tile_of(GeoPoint(0, 179.999)) == TileId{0, 179});

  DetRng rng(104);
  for (int i = 0; i < 2000; ++i) {
    GeoPoint p = random_point(rng);
    TileId t = tile_of(p);
    if (p.lat < 90.0) {
      CHECK(t.lat_floor <= p.lat);
      CHECK(p.lat < t.lat_floor + 1);
    } else {
      CHECK(t.lat_floor == 89);
    }
    CHECK(t.lon_floor <= p.lon);
    CHECK(p.lon < t.lon_floor + 1);
  }
}

TEST_CASE("unit vector round trip") {
  DetRng rng(105);
  for (int i = 0; i < 2000; ++i) {
    GeoPoint p = random_point(rng);
    UnitVec3 v = to_unit_vec(p);
    CHECK(std::abs(v.squaredNorm() - 1.0) <= 1e-12);
    GeoPoint back = to_geo_point(v);
    CHECK(std::abs(back.lat - p.lat) <= 1e-9);
    // Longitude is degenerate at the poles.
    if (std::abs(p.lat) < 90.0 - 1e-12) {
      double dlon = std::abs(normalize_lon(back.lon - p.lon));
      CHECK(dlon <= 1e-9);
    }
  }
  for (GeoPoint p : {GeoPoint(90, 0), GeoPoint(-90, 0), GeoPoint(0, -180),
                     GeoPoint(0.5, 179.9999999), GeoPoint(-89.999999, 12.0)}) {
    GeoPoint back = to_geo_point(to_unit_vec(p));
    CHECK(std::abs(back.lat - p.lat) <= 1e-9);
  }
}

TEST_CASE("degree/radian round trip stays within an ulp-scale error") {
  DetRng rng(106);
  for (int i = 0; i < 2000; ++i) {
    GeoPoint p = random_point(rng);
    CHECK(std::abs(rad2deg(p.lat_rad()) - p.lat) <= 1e-12);
    CHECK(std::abs(rad2deg(p.lon_rad()) - p.lon) <= 1e-12);
  }
}

TEST_CASE("min_distance_to_tile_boundary canonical cases") {
  const double meridian_deg_m = kPi * kEarthRadiusM / 180.0;
  double center = min_distance_to_tile_boundary(GeoPoint(0.5, 0.5), TileId{0, 0});
  CHECK(center >= 0.49 * meridian_deg_m);
  CHECK(center <= 0.5 * meridian_deg_m);

  CHECK(min_distance_to_tile_boundary(GeoPoint(0.0, 0.5), TileId{0, 0}) == 0.0);
  CHECK_THROWS_AS(
      min_distance_to_tile_boundary(GeoPoint(2.5, 0.5), TileId{0, 0}), Error);
  // Pole-clamped point sits on the cell's north boundary.
  CHECK(min_distance_to_tile_boundary(GeoPoint(90, 0.5), TileId{89, 0}) == 0.0);
}

TEST_CASE("min_distance_to_tile_boundary is a lower bound (sampled oracle)") {
  DetRng rng(107);
  for (int iter = 0; iter < 1000; ++iter) {
    int lat_floor = int(rng.below(180)) - 90;  // [-90, 89]
    int lon_floor = int(rng.below(360)) - 180;
    TileId t{int16_t(lat_floor), int16_t(lon_floor)};
    GeoPoint p(lat_floor + rng.range(1e-6, 1.0 - 1e-6),
               lon_floor + rng.range(1e-6, 1.0 - 1e-6));
    double bound = min_distance_to_tile_boundary(p, t);

    double oracle = std::numeric_limits<double>::infinity();
    const int kPerSide = 2500;
    for (int i = 0; i < kPerSide; ++i) {
      double f = double(i) / (kPerSide - 1);
      oracle = std::min(
          oracle, haversine_m(p, GeoPoint(lat_floor, lon_floor + f)));
      oracle = std::min(
          oracle, haversine_m(p, GeoPoint(lat_floor + 1.0, lon_floor + f)));
      oracle = std::min(
          oracle, haversine_m(p, GeoPoint(lat_floor + f, lon_floor)));
      oracle = std::min(
          oracle, haversine_m(p, GeoPoint(lat_floor + f, lon_floor + 1.0)));
    }
    CHECK(bound <= oracle + 1e-9);
  }
}
