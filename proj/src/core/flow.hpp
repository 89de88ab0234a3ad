#pragma once

// The pregeodesic flow: g_R-arclength-parameterized geodesics of g, integrated
// with classical RK4, plus an independent affine-geodesic integrator used as a
// cross-validation oracle.

#include <array>

#include "path.hpp"

namespace lor {

struct FlowState {
  Vec x;          // base point on the cover
  Vec v;          // tangent (unit g_R-norm for the pregeodesic flow)
  double t = 0.0; // parameter (g_R-arclength / affine parameter)
};

struct Christoffels {
  // Gamma^k_{ij} of g as a symmetric form per upper index k. The background
  // metric is Euclidean, so its connection coefficients vanish and the
  // difference tensor T = nabla^g - nabla^R has components Gamma^k_{ij}.
  std::array<Form, 3> g;
};

// Levi-Civita coefficients from analytic metric derivatives when the field
// provides them, central finite differences otherwise. Throws SingularMetric
// when g(p) has spectral condition number above 1e12.
Christoffels christoffels(const MetricField& m, const Vec& p);

// Right-hand side of the arclength-parameterized geodesic equation:
//   gamma'' = (g_R(T(v,v), v)/|v|_R^2) v - T(v,v).
Vec pregeodesic_accel(const MetricField& m, const Vec& x, const Vec& v);

struct FlowOptions {
  double step = 1e-3;
  int renorm_every = 1000;    // pregeodesic tangent renormalization cadence
  double min_step = 1e-10;    // below this: StepUnderflow
};

struct FlowResult {
  CausalPath path;            // vertices + unit tangents, param = parameter t
  FlowState final_state;
  double max_norm_drift = 0;  // max | |v|_R - 1 | seen before renormalization
  int renormalizations = 0;
  std::int64_t steps = 0;
};

// Integrates the pregeodesic flow from state v0 (|v0|_R must be 1 within 1e-9)
// over t_span >= 0.
FlowResult integrate_pregeodesic(const MetricField& m, const FlowState& v0,
                                 double t_span, const FlowOptions& opts = {});

// Affine geodesic oracle: gamma'' = -Gamma(gamma', gamma'). No normalization;
// max_norm_drift reports drift of the first integral g(gamma', gamma').
FlowResult integrate_affine_geodesic(const MetricField& m, const FlowState& v0,
                                     double tau_span,
                                     const FlowOptions& opts = {});

}  // namespace lor
