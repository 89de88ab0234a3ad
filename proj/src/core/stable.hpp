#pragma once

// Stable time cone and stable time separation: rotation vectors, cone
// estimation from reachability probes, l-hat estimates with error brackets,
// the superadditivity/concavity/coarse-Lipschitz property checks, and the
// dual stable time separation.

#include <string>
#include <vector>

#include "reach.hpp"

namespace lor {

// Homology displacement per unit g_R-arclength.
Vec rotation_vector(const CausalPath& path);  // throws ZeroLengthPath

// --- cone estimation --------------------------------------------------------

struct ConeEstimate {
  std::vector<Vec> sampled_dirs;    // unit directions probed
  std::vector<Vec> reachable_dirs;  // subset with p0 + R u reachable
  bool zero_excluded = false;       // 0 not in hull of reachable directions
  double probe_radius = 0.0;
};

// Probes reachability of p0 + R u over a deterministic unit-direction sample
// and keeps the reachable directions as the cone estimate.
ConeEstimate estimate_cone(const MetricField& m, int direction_samples,
                           double R, const Prober& prober);

// Hausdorff distance on the unit simplex {x >= 0, sum x = 1} between the
// normalized reachable directions and the full positive simplex spanned by
// the coordinate directions (the Hedlund / boundary-torus target cones).
double cone_hausdorff_simplex(const std::vector<Vec>& dirs, int n);

// --- stable separation estimates --------------------------------------------

struct StableResult {
  double lhat = 0.0;       // d(0, N h)/N at the largest reachable N
  double err = 0.0;        // bracket width Cbar/N + grid slack
  int N_used = 0;
  bool in_cone = false;    // some probe was reachable
  bool monotone_ok = true; // superadditivity consistency across the schedule
};

// l-hat(h) via d(base, base + N h)/N over an increasing N schedule.
StableResult stable_time_separation(const MetricField& m, const Vec& h,
                                    const std::vector<int>& schedule,
                                    const Prober& prober, double Cbar,
                                    const Vec& base = vec(0, 0, 0));

struct StableEntry {
  Vec h;            // unit direction
  double lhat = 0;
  double err = 0;
  int N_used = 0;
  int flag = 0;     // +1 in cone, 0 boundary (limsup convention), -1 out
};

struct StableSepTable {
  std::vector<StableEntry> entries;
  std::string to_csv() const;  // direction components, lhat, err, flag
};

StableSepTable build_stable_table(const MetricField& m,
                                  const std::vector<Vec>& directions,
                                  const std::vector<int>& schedule,
                                  const Prober& prober, double Cbar);

// --- T17 property checks ----------------------------------------------------

struct T17Report {
  double worst_superadd = 0.0;   // min of l(h+h') - l(h) - l(h') + 2 err
  double worst_concavity = 0.0;  // min of midpoint concavity margin + 2 err
  int pairs_checked = 0;
  int violations = 0;
  double coarse_lipschitz_worst = 0.0;  // min of Lc bound slack on samples
  bool pass = true;
};

// Superadditivity / concavity on sampled pairs from the table (re-probed at
// the combined directions) and the T16-style coarse-Lipschitz check.
T17Report check_T17_properties(const MetricField& m, const StableSepTable& table,
                               const std::vector<int>& schedule,
                               const Prober& prober, double Cbar, double Lc,
                               int pairs, std::uint64_t seed);

// --- dual stable separation -------------------------------------------------

// l*-hat(alpha) = min over in-cone samples of alpha(h)/l-hat(h); throws
// NotInDualCone when alpha is negative on some cone sample.
double dual_stable(const StableSepTable& table, const Vec& alpha);

}  // namespace lor
