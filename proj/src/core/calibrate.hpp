#pragma once

// Calibrations: alpha-equivariant pseudo-time functions tau on the cover,
// pseudo-time verification against sampled causal pairs, calibrated-curve
// defects, the l-infinity functional on covector representatives, the duality
// check against the dual stable separation, and the boundary-torus flowline
// witness for l' = -infinity on the cone boundary.

#include <vector>

#include "metric.hpp"
#include "reach.hpp"

namespace lor {

struct Calibration {
  Vec alpha;                            // constant covector (cohomology class)
  double lstar = 1.0;                   // dual stable separation at alpha
  std::vector<FourierTerm> correction;  // optional periodic correction to tau
  double lipschitz = 0.0;               // Lipschitz bound of tau

  // tau(x) = alpha(x) + sum amp sin(2 pi k.x + phase); the linear part makes
  // tau(x + k) = tau(x) + alpha(k) exact, the correction is Z^n-periodic.
  double tau(const Vec& x) const;
  Vec grad_tau(const Vec& x) const;
};

Calibration make_linear_calibration(const Vec& alpha, double lstar);

// --- pseudo-time verification ------------------------------------------------

struct PseudoTimeReport {
  int pairs = 0;
  int violations = 0;
  double worst_margin = 0.0;  // min of tau(q) - tau(p) - l dhat(p,q)
  double eps_hat = 0.0;       // fitted min of (tau(q)-tau(p))/dist(p,q)
  bool pass = false;
};

// Checks tau(q) - tau(p) >= l dhat(p,q) - tol on sampled causal pairs and
// fits the time-function constant eps-hat.
PseudoTimeReport is_pseudo_time(const MetricField& m, const Calibration& cal,
                                double l, int pairs, std::uint64_t seed,
                                const Prober& prober, double tol = 1e-9);

// --- calibrated curves -------------------------------------------------------

struct CalibratedCheck {
  double defect_per_unit = 0.0;  // max subinterval |tau delta - lstar L^g| / T
  double dhat = 0.0;             // maximizer spot check (when probed)
  double Lg = 0.0;
  bool maximizer_ok = true;
};

CalibratedCheck check_calibrated(const MetricField& m, const Calibration& cal,
                                 const CausalPath& path,
                                 const Prober* prober = nullptr,
                                 double spot_tol = 0.05);

// --- the l-infinity functional ----------------------------------------------

// min over sampled p of |omega_p|^g when -omega-sharp is future causal at
// every sample; -infinity otherwise.
double l_infty(const MetricField& m, const Vec& omega, int grid = 9);

// --- duality -----------------------------------------------------------------

struct DualityReport {
  Vec alpha;
  double lstar = 0.0;
  double best_linf = -1e300;        // sup of l_infty over representatives
  std::vector<double> tried_linf;   // every evaluation (for the one-sided check)
  bool one_sided_ok = true;         // l_infty <= lstar + tol throughout
  double gap = 0.0;                 // lstar - best_linf
};

// Searches representatives omega = alpha + d phi with phi in a truncated
// Fourier family (degree <= 4), maximizing l_infty by coordinate ascent.
DualityReport duality_check(const MetricField& m, const Vec& alpha,
                            double lstar, int degree = 4, double tol = 1e-6);

// --- the boundary-torus flowline witness -------------------------------------

struct FlowlineWitness {
  CausalPath flow_part;   // the X1-flow segment on [-n, n] (lightlike)
  IVec homology;          // 2n e2 - e1
  double alpha_period;    // integral of dx^1 over the loop = -1
  double closing_gap;     // Riemannian length of the closing segment
};

// The section-5 construction: the X1 = -sin^2(pi x) d_x + d_y flowline from
// t = -n to n closed by a short geodesic; its homology pairs negatively with
// e1*, witnessing l'(e1*) = -infinity on the boundary of the dual cone.
FlowlineWitness boundary_flowline_witness(const MetricField& m, int n,
                                          double x0 = 0.3, double y0 = 0.0);

}  // namespace lor
