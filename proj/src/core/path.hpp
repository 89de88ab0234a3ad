#pragma once

// Causal polylines on the cover and their Lorentzian / Riemannian length
// functionals.

#include <vector>

#include "metric.hpp"

namespace lor {

// Causality margins (see the spacetime design notes): a segment delta is
// accepted as future-causal when g(delta,delta) <= margin * |delta|_R^2 at the
// segment midpoint and g(delta, orient) < 0. The permissive margin is used for
// path validation, the conservative one for graph-edge admission.
constexpr double kPermissiveMargin = 1e-12;
constexpr double kConservativeMargin = -1e-8;

struct CausalPath {
  std::vector<Vec> v;           // vertices in the cover
  std::vector<double> param;    // cumulative g_R-arclength at each vertex
  std::vector<Vec> tangent;     // optional unit tangents (from the flow)
  double Lg = 0.0;              // Lorentzian length
  double LR = 0.0;              // Riemannian length

  bool empty() const { return v.empty(); }
  std::size_t size() const { return v.size(); }
};

// True if the displacement b-a is future-causal at the midpoint within margin.
bool segment_causal(const MetricField& m, const Vec& a, const Vec& b,
                    double margin);

// Throws NonCausalSegment if any segment fails the margin test.
void validate_causal(const MetricField& m, const std::vector<Vec>& vertices,
                     double margin = kPermissiveMargin);

// Lorentzian length of one straight segment: composite-midpoint quadrature of
// sqrt(|g|) with Richardson subdivision control.
double segment_lorentz_length(const MetricField& m, const Vec& a, const Vec& b);

// Builds a CausalPath from vertices: validates causality (permissive margin),
// fills params and cached lengths.
CausalPath make_path(const MetricField& m, std::vector<Vec> vertices,
                     double margin = kPermissiveMargin);

// Length of a validated path (recomputed; equals path.Lg for make_path output).
double lorentz_length(const MetricField& m, const CausalPath& path);
double riemann_length(const CausalPath& path);

// Concatenation (q-end of a must equal start of b).
CausalPath concatenate(const MetricField& m, const CausalPath& a,
                       const CausalPath& b);

// Resample a path at (approximately) uniform g_R-arclength spacing h,
// keeping original vertices; fills unit tangents from segment directions.
CausalPath resample_with_tangents(const MetricField& m, const CausalPath& path,
                                  double h);

}  // namespace lor
