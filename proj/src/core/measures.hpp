#pragma once

// Occupation (empirical invariant) measures on the unit tangent bundle of the
// torus: histogram construction from curves, rotation class, average length,
// invariance defects, and maximal-measure search at fixed homology.

#include <functional>
#include <map>
#include <vector>

#include "reach.hpp"

namespace lor {

struct Cellization {
  int pos_grid = 64;      // position cells per axis on the torus
  int dir_bins_2d = 256;  // angle bins (n = 2)
  int dir_bins_3d = 320;  // subdivided-icosahedron face bins (n = 3)
};

// Deterministic direction binning: bin centers on the unit sphere/circle.
const std::vector<Vec>& direction_bin_centers(int dim, const Cellization& c);
int direction_bin(const Vec& unit_dir, int dim, const Cellization& c);

struct MeasureCell {
  double weight = 0.0;  // nonnegative
  Vec pos_sum;          // weighted position sum (representative = sum/weight)
  Vec dir_sum;          // weighted direction sum
  Vec position() const { return (1.0 / weight) * pos_sum; }
  Vec direction() const { return normalized(dir_sum); }
};

struct OccupationMeasure {
  int dim = 3;
  Cellization cells;
  // Key = position cell id * dir_bin_count + dir bin; ordered for determinism.
  std::map<std::int64_t, MeasureCell> hist;
  double window = 0.0;      // source parameter-interval length (g_R)
  double total_mass = 1.0;  // weights sum to this

  std::string to_csv() const;  // cell id, position, direction, weight
};

// Histogram of (position mod Z^n, tangent direction) weighted by parameter
// measure, normalized to a probability measure.
OccupationMeasure occupation_measure(const CausalPath& path,
                                     const Cellization& c, int dim);
// throws EmptyPath

// Convex mixture; weights need not sum to 1 (mass scales accordingly).
OccupationMeasure mix(const std::vector<std::pair<double, OccupationMeasure>>&);

// rho(mu) = integral of v d mu (componentwise).
Vec rotation_class(const OccupationMeasure& mu);

// L(mu) = integral of sqrt(|g(v,v)|) d mu; throws NonCausalCell when a cell
// direction is spacelike at the cell position.
double average_length(const MetricField& m, const OccupationMeasure& mu);

// integral of df(v) d mu via finite differences; for a window-T occupation
// measure |defect| <= 2 Lip(f) * mass / T.
double invariance_defect(const OccupationMeasure& mu,
                         const std::function<double(const Vec&)>& f);

struct MaximalMeasureResult {
  OccupationMeasure mu;  // rescaled so rho(mu) = h (up to target snapping)
  double L = 0.0;        // average length of mu
  double lhat = 0.0;     // d-hat(base, base + N h)/N
  double gap = 0.0;      // lhat - L (expected O(1/N) + O(grid))
  CausalPath path;
};

// Occupation measure of a long maximizer toward N h.
MaximalMeasureResult find_maximal_measure(const MetricField& m, const Vec& h,
                                          int N, const Prober& prober,
                                          const Cellization& c,
                                          const Vec& base = vec(0, 0, 0));

// True when two measures occupy no common (position, direction) cell.
bool disjoint_support(const OccupationMeasure& a, const OccupationMeasure& b);

}  // namespace lor
