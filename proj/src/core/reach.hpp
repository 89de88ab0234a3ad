#pragma once

// Causal reachability and time separation d(p,q) on the cover, computed as a
// longest-path problem on a layered grid DAG. Layers come from an integer
// temporal covector; edges are future-causal stencil displacements admitted
// under the conservative causality margin; weights are quadratures of
// sqrt(|g|) along the edge.

#include <cstdint>
#include <functional>
#include <vector>

#include "path.hpp"

namespace lor {

struct ReachOptions {
  double spacing = 0.02;           // grid spacing Delta
  int stencil_k = 5;               // max-norm bound of stencil directions
  enum class Mode { Diamond, Tube };
  Mode mode = Mode::Diamond;
  double diamond_factor = 0.9;     // transverse radius = factor * dist(p,q)
  double diamond_min_radius = 0.5; // floor on the transverse radius
  double tube_radius = 0.08;
  std::vector<Vec> guide;          // tube-mode guide polyline from p to q
  bool want_path = true;
  double margin = kConservativeMargin;
  std::int64_t max_nodes = 400'000'000;
};

struct CausalGraph {
  Vec p, q;
  IVec zq = {0, 0, 0};             // integer displacement (q-p)/spacing
  IVec temporal = {0, 0, 0};
  std::int64_t layers = 0;         // temporal levels between p and q
  std::vector<IVec> stencil;       // primitive directions, positive increment
  ReachOptions opts;
  // Node count of the region, enumerated on demand (exact; intended for
  // desk-scale graphs).
  std::int64_t count_nodes(const MetricField& m) const;
  bool in_region(const Vec& x) const;
};

CausalGraph build_graph(const MetricField& m, const Vec& p, const Vec& q,
                        const ReachOptions& opts);

struct ReachResult {
  bool reachable = false;
  double d = 0.0;                  // lower-bound estimate of d(p,q); 0 if unreachable
  CausalPath path;                 // argmax path (empty if unreachable / not requested)
  std::int64_t nodes_expanded = 0;
  std::int64_t edges_relaxed = 0;
};

ReachResult time_separation(const MetricField& m, const Vec& p, const Vec& q,
                            const ReachOptions& opts);

// Coordinate-ascent polish of a DP argmax: per sweep each interior vertex may
// move by at most `step`, total Lorentzian length is non-decreasing, segments
// stay causal under the permissive margin.
struct RefineResult {
  CausalPath path;
  int sweeps = 0;
  bool stalled = false;            // improvement fell below 1e-12 per sweep
};
RefineResult refine_maximizer(const MetricField& m, const CausalPath& path,
                              int max_sweeps, double step);

// A prober computes d-estimates between arbitrary cover points; modules that
// need many d values take one of these so that metric-specific strategies
// (e.g. Hedlund tube guides) can be plugged in.
using Prober =
    std::function<ReachResult(const Vec& p, const Vec& q, bool want_path)>;

Prober make_diamond_prober(const MetricField& m, ReachOptions base);

// Empirical fits of the paper-level existence constants.
struct DiagnosticsConstants {
  double C_causal = 0;       // max L^R(maximizer)/dist(p,q)
  double std_burago = 0;     // max |dist(x,y) - ||y-x||| on the cover
  double err_cone = 0;       // max dist(normalized reachable displacement, cone)
  double Cbar = 0;           // max_N |dhat_N - N lhat|
  double K_cone = 0;         // depth threshold below which unreachable samples occurred
  double Lc = 0;             // coarse-Lipschitz fit of d
  double reverse_triangle_worst = 0;  // most negative concatenation slack seen
  int samples = 0;
};

DiagnosticsConstants fit_constants(const MetricField& m, int samples,
                                   std::uint64_t seed, const Prober& prober,
                                   const std::vector<Vec>* cone_dirs = nullptr);

}  // namespace lor
