#pragma once

// Torus spacetimes: periodic Lorentzian metric fields on R^n (n = 2 or 3)
// with a Euclidean background metric and a future time orientation, causal
// classification of tangent vectors, and the concrete metric families used by
// the rest of the laboratory (flat, conformally flat, Hedlund, and the
// lightlike-boundary 2-torus).

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace lor {

enum class CausalClass {
  TimelikeFuture,
  TimelikePast,
  LightlikeFuture,
  LightlikePast,
  Spacelike,
  Zero
};

const char* to_string(CausalClass c);

class MetricField {
 public:
  virtual ~MetricField() = default;

  int dim() const { return dim_; }

  // Metric tensor at a cover point; for dim()==2 the third diagonal entry is
  // padded with +1 so arithmetic stays uniformly 3x3.
  virtual Form g_at(const Vec& p) const = 0;
  // Background Riemannian metric (Euclidean identity for all shipped families).
  virtual Form gR_at(const Vec& /*p*/) const { return form_identity(); }
  // Future-pointing timelike reference field.
  virtual Vec orient(const Vec& p) const = 0;
  // Integer covector defining the temporal layering used by reach.
  virtual IVec temporal_int() const = 0;
  Vec temporal() const {
    IVec c = temporal_int();
    return {double(c[0]), double(c[1]), double(c[2])};
  }

  // Radius around p within which the metric is guaranteed to be exactly
  // constant (0 if unknown); lets the DP use precomputed edge data.
  virtual double constant_radius(const Vec& /*p*/) const { return 0.0; }

  // Optional analytic metric derivative d g / d x^k; returns false when only
  // finite differences are available.
  virtual bool dg_at(const Vec& /*p*/, int /*k*/, Form& /*out*/) const {
    return false;
  }

  // Optional fast quadratic-profile evaluation:
  //   g(p) = base_form() + psi * (profile_form(id) - base_form()).
  // Supported when profile_count() > 0; profile_at fills (id, psi) with
  // id = -1 meaning "exactly the base form".
  virtual int profile_count() const { return 0; }
  virtual Form base_form() const { return g_at(generic_point()); }
  virtual Form profile_form(int /*id*/) const { return base_form(); }
  virtual bool profile_at(const Vec& /*p*/, int& /*id*/, double& /*psi*/) const {
    return false;
  }
  // True when the metric has near-kink transition shells (quadrature upgrade).
  virtual bool has_kink() const { return false; }
  // True when a segment of half-length halflen centered at mid may straddle a
  // kink shell; such segments get an upgraded quadrature.
  virtual bool near_kink(const Vec& /*mid*/, double /*halflen*/) const {
    return false;
  }
  // Distance to the nearest metric feature (tube system); +inf when none.
  virtual double feature_distance(const Vec& /*p*/) const { return 1e300; }

  // Canonical base points for separation probes and structured sample points
  // (e.g. points on the Hedlund line system).
  virtual std::vector<Vec> suggested_bases() const { return {vec(0, 0, 0)}; }
  virtual std::vector<Vec> special_points() const { return {}; }

  virtual std::string family() const = 0;
  virtual std::string params_json() const { return "{}"; }

  // A point without special structure, used for generic-position evaluations.
  virtual Vec generic_point() const { return vec(0.137, 0.291, 0.413); }

  double fd_step = 1e-5;           // finite-difference step for derivatives
  double lightlike_tol = 1e-9;     // |g(v,v)| < tol*|v|_R^2 => lightlike

 protected:
  explicit MetricField(int dim) : dim_(dim) {}
  int dim_;
};

CausalClass classify(const MetricField& m, const Vec& base, const Vec& comp);

// |v|_g = sqrt(|g(v,v)|) evaluated at base.
double lorentz_norm(const MetricField& m, const Vec& base, const Vec& comp);

// --- flat torus ---

class FlatMetric final : public MetricField {
 public:
  explicit FlatMetric(int dim);
  Form g_at(const Vec&) const override { return eta_; }
  Vec orient(const Vec&) const override { return vec(1, 0, 0); }
  IVec temporal_int() const override { return {1, 0, 0}; }
  double constant_radius(const Vec&) const override { return 1e300; }
  bool dg_at(const Vec&, int, Form& out) const override {
    out = Form{};
    return true;
  }
  std::string family() const override { return "flat"; }
  std::string params_json() const override;

 private:
  Form eta_;
};

// --- conformally flat: g = f^2 <.,.>_1 with f = 1 + sum amp*sin(2 pi k.x + phase) ---

struct FourierTerm {
  double amp = 0.0;
  IVec k = {0, 0, 0};
  double phase = 0.0;
};

class ConformalMetric final : public MetricField {
 public:
  ConformalMetric(int dim, std::vector<FourierTerm> terms);
  double f(const Vec& p) const;
  Vec grad_f(const Vec& p) const;
  Form g_at(const Vec& p) const override;
  Vec orient(const Vec&) const override { return vec(1, 0, 0); }
  IVec temporal_int() const override { return {1, 0, 0}; }
  bool dg_at(const Vec& p, int k, Form& out) const override;
  int profile_count() const override { return 1; }
  Form base_form() const override { return eta_; }
  Form profile_form(int) const override { return 2.0 * eta_; }
  bool profile_at(const Vec& p, int& id, double& psi) const override {
    double ff = f(p);
    id = 0;
    psi = ff * ff - 1.0;
    return true;
  }
  std::string family() const override { return "conformal"; }
  std::string params_json() const override;
  const std::vector<FourierTerm>& terms() const { return terms_; }

 private:
  std::vector<FourierTerm> terms_;
  Form eta_;
};

// --- Hedlund (the three-tube construction on T^3) ---

struct HedlundParams {
  std::array<double, 3> lambdas = {0.5, 0.3, 0.2};
  double eps = 0.01;
  bool flagged_nonconforming = false;  // eps > 1e-2
  void normalize();                    // enforces sum lambda = 1 exactly
};

// The line system L = L1 u L2 u L3 with
//   l1 = R x {0} x {0},  l2 = {0} x R x {1/2},  l3 = {1/2} x {1/2} x R.
struct LineHit {
  int family = 0;       // 1, 2, or 3
  double dist = 0.0;    // Euclidean distance to the nearest line of the system
  Vec foot;             // nearest point on that line
  Vec anchor;           // a reference point identifying the line
  IVec label;           // lattice label of the line within its family
};

class LineSystem {
 public:
  // Distance to the nearest line of family i (1-based) and its description.
  LineHit nearest_in_family(const Vec& p, int family) const;
  // Nearest line over the whole system.
  LineHit nearest(const Vec& p) const;
  static Vec axis(int family) {
    return family == 1 ? vec(1, 0, 0) : family == 2 ? vec(0, 1, 0) : vec(0, 0, 1);
  }
  // A point on the canonical base line l_family.
  static Vec base_anchor(int family) {
    return family == 1 ? vec(0, 0, 0) : family == 2 ? vec(0, 0, 0.5) : vec(0.5, 0.5, 0);
  }
};

class HedlundMetric final : public MetricField {
 public:
  explicit HedlundMetric(const HedlundParams& params, bool tamper_psi0 = false);

  const HedlundParams& params() const { return params_; }
  const LineSystem& lines() const { return lines_; }
  double eps() const { return params_.eps; }
  double lambda(int i) const { return params_.lambdas[i - 1]; }

  // Bump profile psi(t) = exp(1 - 1/(1 - t^2)) on [0,1), 0 for t >= 1.
  double psi(double t) const;

  Form g_eps_form() const { return g_eps_; }
  Form g_line_form(int family) const { return g_line_[family - 1]; }

  Form g_at(const Vec& p) const override;
  Vec orient(const Vec&) const override { return v1_; }
  IVec temporal_int() const override { return {1, 1, 1}; }
  double constant_radius(const Vec& p) const override;
  int profile_count() const override { return 3; }
  Form base_form() const override { return g_eps_; }
  Form profile_form(int id) const override { return g_line_[id]; }
  bool profile_at(const Vec& p, int& id, double& psi_out) const override;
  bool has_kink() const override { return true; }
  bool near_kink(const Vec& mid, double halflen) const override {
    double d = lines_.nearest(mid).dist;
    return std::abs(d - params_.eps) <= halflen;
  }
  double feature_distance(const Vec& p) const override {
    return lines_.nearest(p).dist;
  }
  std::vector<Vec> suggested_bases() const override;
  std::vector<Vec> special_points() const override;
  std::string family() const override { return "hedlund"; }
  std::string params_json() const override;
  Vec generic_point() const override { return vec(0.21, 0.69, 0.17); }

 private:
  HedlundParams params_;
  LineSystem lines_;
  Vec v1_;
  Form g_eps_;
  Form g_line_[3];
  bool tamper_psi0_;
};

// --- the end-of-section-5 boundary 2-torus ---
// Lightlike frame X1 = (-sin^2(pi x), 1), X2 = (1, sin^2(pi y)), dx future.

class BoundaryTorusMetric final : public MetricField {
 public:
  BoundaryTorusMetric();
  static Vec X1(const Vec& p);
  static Vec X2(const Vec& p);
  Form g_at(const Vec& p) const override;
  Vec orient(const Vec& p) const override;
  IVec temporal_int() const override { return {1, 2, 0}; }
  std::string family() const override { return "boundary2t"; }
};

// --- factories ---

std::unique_ptr<MetricField> make_flat(int n);
std::unique_ptr<MetricField> make_conformally_flat(int n,
                                                   std::vector<FourierTerm> f);
std::unique_ptr<MetricField> make_boundary_2torus();
// Builds and verifies (throws ConditionViolated on a broken construction).
std::unique_ptr<MetricField> make_hedlund(const HedlundParams& params);
// From a structured JSON config {"family": ..., ...}.
std::unique_ptr<MetricField> make_metric(const std::string& config_json);

// --- Hedlund condition verification ---

struct HedlundVerifyReport {
  bool pass_i = false, pass_ii = false, pass_iii = false;
  // Worst margins; the conditions require them to be <= 0 (condition ii is an
  // exact form inequality, reported as the max eigenvalue of the difference).
  double worst_i = 0, worst_ii = 0, worst_iii = 0;
  // The v1-direction margin -(lambda_i^2)/9 + eps^2/4 per family.
  std::array<double, 3> v1_margin = {0, 0, 0};
  bool equality_on_lines = false;
  double worst_equality_gap = 0;
  bool pass() const { return pass_i && pass_ii && pass_iii && equality_on_lines; }
};

HedlundVerifyReport verify_hedlund(const MetricField& m,
                                   const HedlundParams& params, int samples,
                                   std::uint64_t seed = 1);

// Sample a future-causal vector for form G with orientation o (used by the
// verifier and the sampling batteries). strict in (0,1]: 1 samples the whole
// cone including near-lightlike directions.
Vec sample_causal_vector(const Form& G, const Vec& orient_dir, int dim,
                         std::mt19937_64& rng, double strict = 1.0);

}  // namespace lor
