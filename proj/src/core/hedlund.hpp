#pragma once

// Combinatorial geometry of the Hedlund construction: standard paths between
// lines, guide-path planning for tube-mode probes, the tube partition used by
// the change-count lemma, and the quantitative checks on causal curves
// (Riemannian length bound, the A-integral inequality, shadowing, tube
// confinement, heteroclinic ladders, connectability).

#include <array>
#include <utility>
#include <vector>

#include "reach.hpp"

namespace lor {

// --- guide planning ---------------------------------------------------------

// A polyline from p to q made of line runs and (1/2,1/2,1/2) jumps; used as the
// skeleton of tube-mode reach computations. `direct` marks the degenerate case
// of a single run/chord.
struct GuidePlan {
  std::vector<Vec> vertices;
  int jumps = 0;
  bool direct = false;
};

// Plans a run/jump guide between half-lattice points p and q (q - p must make
// the plan solvable). Throws NotConstructible when no plan exists within the
// search depth.
GuidePlan plan_hedlund_guide(const Vec& p, const Vec& q);

// --- standard paths ---------------------------------------------------------

// The canonical standard path from p on a line of family i to q = p+h on a
// line of family j != i, with h >= 1/2 componentwise: 5 segments
// (run, jump, run, jump, run) when h^k >= 1, 3 segments when h^k = 1/2.
// Throws NotConstructible when the incidence preconditions fail.
CausalPath standard_path(const HedlundMetric& m, const Vec& p, const Vec& q);

// --- tube partition and change counting -------------------------------------

struct TubePartition {
  struct Visit {
    double t0 = 0, t1 = 0;  // parameter window of the visit
    int family = 0;
    Vec anchor;             // line identifier
  };
  std::vector<Visit> visits;  // tube components visited, consecutive-deduped
  int tube_changes = 0;
  // Components of A = I \ (A_1 u A_2 u A_3) as parameter intervals, and the
  // per-family A_i intervals (tube preimages united with between-visit gaps of
  // the same line).
  std::vector<std::pair<double, double>> A;
  std::array<std::vector<std::pair<double, double>>, 3> Ai;
};

TubePartition count_tube_changes(const HedlundMetric& m, const CausalPath& path);

// --- quantitative checks ----------------------------------------------------

// Riemannian length bound for future-pointing curves:
//   L^{g_R} <= 2 (sum (q-p)^i + 4 eps).  Returns RHS - LHS (>= 0 expected).
double check_F30(const HedlundMetric& m, const CausalPath& path);

// The A-integral inequality
//   sum_i lambda_i int_A dgamma^i
//     <= (sum_i lambda_i (q-p)^i - L^g + 4 eps) / (1 - 8 eps/(1-4 eps) - eps).
// Returns RHS - LHS (>= 0 expected).
double check_L31(const HedlundMetric& m, const CausalPath& path);

// Symmetric Hausdorff distance between two polylines (sampled).
double hausdorff_distance(const std::vector<Vec>& a, const std::vector<Vec>& b);

// Distance of a maximizer with endpoints on two lines of different families to
// the standard path between the endpoints.
double shadowing_check(const HedlundMetric& m, const CausalPath& maximizer);

// Smallest r such that the path stays within delta of the line
// (family, anchor) for parameters in [a + r, b - r].
double tube_confinement_radius(const CausalPath& path, int family,
                               const Vec& anchor, double delta);

// Largest radius (<= eps) at which the in-tube cone-domination condition still
// holds by sampling; falls back to eps/2.
double hedlund_eps_prime(const HedlundMetric& m, int samples = 4000,
                         std::uint64_t seed = 1);

struct HeteroclinicReport {
  std::vector<int> ns;
  std::vector<double> head_confinement;  // max dist of the head third to l
  std::vector<double> tail_confinement;  // max dist of the tail third to l'
  bool confined = false;                 // all within the eps'-tube
};

// Maximizers between x - n e_i on line (i, anchor) and x' + n e_j on line
// (j, anchor'): verifies head/tail tube confinement over the ladder of n.
HeteroclinicReport heteroclinic_experiment(const HedlundMetric& m, int fam_i,
                                           const Vec& anchor_i, int fam_j,
                                           const Vec& anchor_j,
                                           const std::vector<int>& ladder,
                                           const ReachOptions& base);

// When (q-p)^i exceeds the connectability margin 1/eps + 3/2 on every axis,
// q must be causally reachable from p; returns the probed reachability.
bool connectability_check(const HedlundMetric& m, const Vec& p, const Vec& q,
                          const ReachOptions& base);

// Tube-mode prober: targets are snapped to the half-integer lattice, a guide
// is planned, and reach runs in the tube around it. Unplannable displacements
// report unreachable.
Prober make_hedlund_prober(const HedlundMetric& m, ReachOptions base);

}  // namespace lor
