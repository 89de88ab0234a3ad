#pragma once

// Graph-theorem verification: the reverse Cauchy-Schwarz inequalities with
// their fitted constants, 1/2-Holder and Lipschitz fits for tangent fields
// over base points, the crossing-exchange gain, and the Minkowski
// all-maximizer ladder separating the Holder and Lipschitz regimes.

#include <cstdint>
#include <string>
#include <vector>

#include "reach.hpp"

namespace lor {

// A future-causal unit-g_R tangent vector anchored at a base point.
struct TangentSample {
  Vec base;
  Vec dir;
};

struct SupportSample {
  std::vector<TangentSample> s;
};

// Torus distance between base points (per-axis wrap to [-1/2, 1/2]).
double torus_dist(const Vec& a, const Vec& b, int dim);

// Euclidean distance from v to the light cone of form G (both cone sheets).
double dist_to_light(const Form& G, const Vec& v, int dim);

// --- reverse Cauchy-Schwarz constants ---------------------------------------

struct L20aReport {
  double eps_tilde = 0.0;  // largest constant in
                           // -g(v,w) - |v|_g |w|_g >= eps |v||w| sin^2(angle)
  double C_tilde = 0.0;    // smallest constant in
                           // |g(v,v)| <= C |v| dist(v, Light)
  int pairs = 0;
  bool pass = false;       // eps_tilde > 0 and C_tilde finite
};

L20aReport lemma20a_check(const MetricField& m, int samples,
                          std::uint64_t seed);

// --- Holder / Lipschitz fits -------------------------------------------------

struct HolderReport {
  double K = 0.0;          // smallest K with dist(v,w)^2 <= K dist(pi v, pi w)
  int pairs = 0;
  int injectivity_violations = 0;  // same base, distinct directions
};

HolderReport holder_check(const SupportSample& sample);

struct LipschitzReport {
  double Kprime = 0.0;     // smallest K' with dist(v,w) <= K' dist(pi v, pi w)
  int pairs = 0;
  int outside_kappa = 0;   // samples with |v|_g < kappa (not in Time^kappa)
};

LipschitzReport lipschitz_check(const MetricField& m,
                                const SupportSample& sample, double kappa);

// CSV of (dist_base, dist_tangent) pairs for the Holder scatter plot.
std::string holder_scatter_csv(const SupportSample& sample);

// --- crossing exchange -------------------------------------------------------

// A pregeodesic segment given by its center, unit-g_R direction, and
// half-length: t -> center + t dir on [-half, half].
struct Segment {
  Vec center;
  Vec dir;
  double half = 0.05;
};

struct CrossingGain {
  double gain = 0.0;       // dhat(a1,b2) + dhat(a2,b1) - L^g(x1) - L^g(x2)
  double d_cross_12 = 0.0; // dhat(x1(-eps), x2(eps))
  double d_cross_21 = 0.0;
  double Lg1 = 0.0, Lg2 = 0.0;
  double dist_tangents = 0.0;
  double dist_bases = 0.0;
};

// Exchange gain via local time-separation estimates (causal chord plus
// coordinate-ascent refinement; grid DP fallback when the chord is not
// causal). Throws NotCrossingConfiguration when an exchange pair is not
// causally related.
CrossingGain crossing_gain(const MetricField& m, const Segment& x1,
                           const Segment& x2, double spacing = 0.0);

struct GainBattery {
  int configs = 0;
  int skipped = 0;             // non-crossing configurations drawn
  double min_gain_ratio = 0.0; // min gain / dist(tangents)^2
  bool pass = false;           // min ratio > 0
};

// Random nearly-crossing segment pairs satisfying the exchange hypothesis
// dist(tangents)^2 >= dist(bases).
GainBattery crossing_battery(const MetricField& m, int configs,
                             std::uint64_t seed, double half = 0.2);

// --- the Minkowski all-maximizer ladder --------------------------------------

struct R20Ladder {
  std::vector<double> deltas;
  std::vector<double> base_dist;  // closest cross-segment base distance
  std::vector<double> dir_dist;   // tangent distance of that pair
  std::vector<double> holder_K;   // dir^2 / base per rung
  std::vector<double> lip_K;      // dir / base per rung (diverges)
  double exponent = 0.0;          // log-log slope of dir vs base
};

// The family x1(t) = t u, x2(t) = p0 + t w with |p0| = delta^2 and
// |u - w| = delta on the flat 2-torus; all segments are maximizers, yet the
// tangent field over the base is only 1/2-Holder.
R20Ladder r20_ladder(const std::vector<double>& deltas, double half = 0.05);

// The sample set of one rung (for holder_check / lipschitz_check).
SupportSample r20_family(double delta, double half = 0.05,
                         int per_segment = 9);

}  // namespace lor
