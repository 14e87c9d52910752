#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "lighthouse/raster.hpp"
#include "lighthouse/store.hpp"

namespace lighthouse {

// Deterministic uniform source. mt19937_64 output is pinned by the standard;
// the distributions here are hand-rolled because std::uniform_*_distribution
// is implementation-defined and would break byte-identical worlds.
class DetRng {
 public:
  explicit DetRng(uint64_t seed) : eng_(seed) {}

  uint64_t bits() { return eng_(); }
  double unit() { return double(eng_() >> 11) * 0x1.0p-53; }  // [0, 1)
  double range(double lo, double hi) { return lo + (hi - lo) * unit(); }
  uint64_t below(uint64_t n) { return n == 0 ? 0 : eng_() % n; }

 private:
  std::mt19937_64 eng_;
};

struct Island {
  double lat = 0.0;
  double lon = 0.0;
  double radius_deg = 0.5;
  double lake_radius_deg = 0.0;  // 0 = no lake
  double lake_dlat = 0.0;        // lake center offset
  double lake_dlon = 0.0;
  uint8_t land_class = kLandClass;
  // Boundary noise: radius(theta) = radius * (1 + sum a_k sin(k theta + p_k)).
  double noise_a[4] = {0, 0, 0, 0};
  double noise_p[4] = {0, 0, 0, 0};
};

// Desk-scale stand-in for the global sources: a seeded archipelago over a
// rectangle of 1x1 degree tiles. Same spec -> byte-identical rasters.
struct SyntheticWorldSpec {
  uint64_t seed = 7;
  int lat0 = 0;  // tile floor of the extent's south-west corner
  int lon0 = 0;
  int tiles_lat = 5;
  int tiles_lon = 5;
  int grid = 512;  // cells per tile side
  int islands = 9;
  double min_radius_deg = 0.12;
  double max_radius_deg = 1.1;
  double noise_amp = 0.35;
  double lake_fraction = 0.4;
  std::vector<Island> fixed_islands;  // when nonempty, used verbatim
};

// All tiles of the extent, including all-water ones (the build pipeline
// skips those).
std::vector<RasterTile> generate_world(const SyntheticWorldSpec& spec);

// Stratified query sampler against a dataset: fractions of points inside
// manifest tiles, within border_deg of a tile boundary, and on the high
// seas (outside every manifest tile).
std::vector<GeoPoint> sample_stratified(const Manifest& m, size_t count,
                                        double frac_inside, double frac_border,
                                        double frac_high_seas, DetRng& rng,
                                        double border_deg = 0.02);

}  // namespace lighthouse
