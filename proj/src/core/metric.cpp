#include "metric.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "errors.hpp"

namespace lor {

using json = nlohmann::json;

const char* to_string(CausalClass c) {
  switch (c) {
    case CausalClass::TimelikeFuture: return "timelike-future";
    case CausalClass::TimelikePast: return "timelike-past";
    case CausalClass::LightlikeFuture: return "lightlike-future";
    case CausalClass::LightlikePast: return "lightlike-past";
    case CausalClass::Spacelike: return "spacelike";
    case CausalClass::Zero: return "zero";
  }
  return "?";
}

CausalClass classify(const MetricField& m, const Vec& base, const Vec& comp) {
  Form G = m.g_at(base);
  Form GR = m.gR_at(base);
  double r2 = GR(comp, comp);
  if (r2 < 1e-30) return CausalClass::Zero;
  double q = G(comp, comp);
  double o = G(comp, m.orient(base));
  bool future = o < 0.0;
  if (std::fabs(q) < m.lightlike_tol * r2)
    return future ? CausalClass::LightlikeFuture : CausalClass::LightlikePast;
  if (q < 0.0)
    return future ? CausalClass::TimelikeFuture : CausalClass::TimelikePast;
  return CausalClass::Spacelike;
}

double lorentz_norm(const MetricField& m, const Vec& base, const Vec& comp) {
  return std::sqrt(std::fabs(m.g_at(base)(comp, comp)));
}

// ---------------------------------------------------------------- FlatMetric

FlatMetric::FlatMetric(int dim) : MetricField(dim) {
  if (dim < 2 || dim > 3) throw InvalidArgument("flat metric: dim must be 2 or 3");
  eta_ = form_diag(-1, 1, 1);
}

std::string FlatMetric::params_json() const {
  std::ostringstream os;
  os << "{\"family\":\"flat\",\"dim\":" << dim_ << "}";
  return os.str();
}

// ----------------------------------------------------------- ConformalMetric

ConformalMetric::ConformalMetric(int dim, std::vector<FourierTerm> terms)
    : MetricField(dim), terms_(std::move(terms)) {
  if (dim < 2 || dim > 3)
    throw InvalidArgument("conformal metric: dim must be 2 or 3");
  eta_ = form_diag(-1, 1, 1);
  // Positivity of f, sampled.
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int s = 0; s < 20000; ++s) {
    Vec p = {uni(rng), uni(rng), dim_ == 3 ? uni(rng) : 0.0};
    if (f(p) <= 0.0)
      throw NonPositiveConformalFactor("conformal factor f is not positive");
  }
}

double ConformalMetric::f(const Vec& p) const {
  double v = 1.0;
  for (const auto& t : terms_)
    v += t.amp * std::sin(2.0 * M_PI * (t.k[0] * p[0] + t.k[1] * p[1] + t.k[2] * p[2]) +
                          t.phase);
  return v;
}

Vec ConformalMetric::grad_f(const Vec& p) const {
  Vec g = {0, 0, 0};
  for (const auto& t : terms_) {
    double c = t.amp * 2.0 * M_PI *
               std::cos(2.0 * M_PI * (t.k[0] * p[0] + t.k[1] * p[1] + t.k[2] * p[2]) +
                        t.phase);
    g[0] += c * t.k[0];
    g[1] += c * t.k[1];
    g[2] += c * t.k[2];
  }
  return g;
}

Form ConformalMetric::g_at(const Vec& p) const {
  double ff = f(p);
  Form r = (ff * ff) * eta_;
  if (dim_ == 2) r.at(2, 2) = 1.0;  // padding
  return r;
}

bool ConformalMetric::dg_at(const Vec& p, int k, Form& out) const {
  double ff = f(p);
  double dk = grad_f(p)[k];
  out = (2.0 * ff * dk) * eta_;
  if (dim_ == 2) out.at(2, 2) = 0.0;
  return true;
}

std::string ConformalMetric::params_json() const {
  json j;
  j["family"] = "conformal";
  j["dim"] = dim_;
  j["terms"] = json::array();
  for (const auto& t : terms_)
    j["terms"].push_back({{"amp", t.amp},
                          {"k", {t.k[0], t.k[1], t.k[2]}},
                          {"phase", t.phase}});
  return j.dump();
}

// ---------------------------------------------------------------- LineSystem

namespace {
inline double wrap_offset(double x) { return x - std::round(x); }
}  // namespace

LineHit LineSystem::nearest_in_family(const Vec& p, int family) const {
  LineHit h;
  h.family = family;
  if (family == 1) {
    double dy = wrap_offset(p[1]);
    double dz = wrap_offset(p[2]);
    h.dist = std::hypot(dy, dz);
    h.foot = {p[0], p[1] - dy, p[2] - dz};
    h.label = {0, std::llround(p[1]), std::llround(p[2])};
    h.anchor = {0.0, p[1] - dy, p[2] - dz};
  } else if (family == 2) {
    double dx = wrap_offset(p[0]);
    double dz = wrap_offset(p[2] - 0.5);
    h.dist = std::hypot(dx, dz);
    h.foot = {p[0] - dx, p[1], p[2] - dz};
    h.label = {std::llround(p[0]), 0, std::llround(p[2] - 0.5)};
    h.anchor = {p[0] - dx, 0.0, p[2] - dz};
  } else {
    double dx = wrap_offset(p[0] - 0.5);
    double dy = wrap_offset(p[1] - 0.5);
    h.dist = std::hypot(dx, dy);
    h.foot = {p[0] - dx, p[1] - dy, p[2]};
    h.label = {std::llround(p[0] - 0.5), std::llround(p[1] - 0.5), 0};
    h.anchor = {p[0] - dx, p[1] - dy, 0.0};
  }
  return h;
}

LineHit LineSystem::nearest(const Vec& p) const {
  LineHit best = nearest_in_family(p, 1);
  for (int f = 2; f <= 3; ++f) {
    LineHit h = nearest_in_family(p, f);
    if (h.dist < best.dist) best = h;
  }
  return best;
}

// ------------------------------------------------------------- HedlundParams

void HedlundParams::normalize() {
  double s = lambdas[0] + lambdas[1] + lambdas[2];
  if (s <= 0 || lambdas[0] <= 0 || lambdas[1] <= 0 || lambdas[2] <= 0)
    throw InvalidArgument("hedlund lambdas must be positive");
  for (auto& l : lambdas) l /= s;
  if (eps <= 0) throw InvalidArgument("hedlund eps must be positive");
  flagged_nonconforming = eps > 1e-2;
}

// ------------------------------------------------------------- HedlundMetric

HedlundMetric::HedlundMetric(const HedlundParams& params, bool tamper_psi0)
    : MetricField(3), params_(params), tamper_psi0_(tamper_psi0) {
  params_.normalize();
  double inv_sqrt3 = 1.0 / std::sqrt(3.0);
  v1_ = {inv_sqrt3, inv_sqrt3, inv_sqrt3};
  double e = params_.eps;
  // g_eps = v2* x v2* + v3* x v3* - (eps^2/4) v1* x v1*  =  I - (1 + eps^2/4) v1 v1^T
  g_eps_ = form_identity() - ((1.0 + e * e / 4.0) * outer(v1_));
  for (int i = 0; i < 3; ++i) {
    double l2 = params_.lambdas[i] * params_.lambdas[i];
    Vec d = {l2 / 3.0, l2 / 3.0, l2 / 3.0};
    d[i] = -l2;
    g_line_[i] = form_diag(d[0], d[1], d[2]);
  }
}

double HedlundMetric::psi(double t) const {
  if (t >= 1.0) return 0.0;
  if (t < 0.0) t = 0.0;
  double val = std::exp(1.0 - 1.0 / (1.0 - t * t));
  if (tamper_psi0_) val *= 0.5;
  return val;
}

Form HedlundMetric::g_at(const Vec& p) const {
  LineHit h = lines_.nearest(p);
  if (h.dist >= params_.eps) return g_eps_;
  double w = psi(h.dist / params_.eps);
  return g_eps_ + w * (g_line_[h.family - 1] - g_eps_);
}

double HedlundMetric::constant_radius(const Vec& p) const {
  double d = lines_.nearest(p).dist - params_.eps;
  return d > 0 ? d : 0.0;
}

bool HedlundMetric::profile_at(const Vec& p, int& id, double& psi_out) const {
  LineHit h = lines_.nearest(p);
  if (h.dist >= params_.eps) {
    id = -1;
    psi_out = 0.0;
  } else {
    id = h.family - 1;
    psi_out = psi(h.dist / params_.eps);
  }
  return true;
}

std::vector<Vec> HedlundMetric::suggested_bases() const {
  return {LineSystem::base_anchor(1), LineSystem::base_anchor(2),
          LineSystem::base_anchor(3)};
}

std::vector<Vec> HedlundMetric::special_points() const {
  std::vector<Vec> pts;
  for (int f = 1; f <= 3; ++f) {
    Vec a = LineSystem::base_anchor(f);
    Vec ax = LineSystem::axis(f);
    for (int k = 0; k < 8; ++k) pts.push_back(a + (0.125 * k) * ax);
  }
  return pts;
}

std::string HedlundMetric::params_json() const {
  json j;
  j["family"] = "hedlund";
  j["lambdas"] = {params_.lambdas[0], params_.lambdas[1], params_.lambdas[2]};
  j["eps"] = params_.eps;
  j["nonconforming_eps"] = params_.flagged_nonconforming;
  return j.dump();
}

// ------------------------------------------------------- BoundaryTorusMetric

BoundaryTorusMetric::BoundaryTorusMetric() : MetricField(2) {}

Vec BoundaryTorusMetric::X1(const Vec& p) {
  double s = std::sin(M_PI * p[0]);
  return {-s * s, 1.0, 0.0};
}

Vec BoundaryTorusMetric::X2(const Vec& p) {
  double s = std::sin(M_PI * p[1]);
  return {1.0, s * s, 0.0};
}

Form BoundaryTorusMetric::g_at(const Vec& p) const {
  // Coframe (sigma1, sigma2) dual to (X1, X2); g = -2 (s1 x s2 + s2 x s1).
  Vec x1 = X1(p), x2 = X2(p);
  double det = x1[0] * x2[1] - x2[0] * x1[1];  // always <= -1
  Vec s1 = {x2[1] / det, -x2[0] / det, 0.0};
  Vec s2 = {-x1[1] / det, x1[0] / det, 0.0};
  Form g = -2.0 * sym_outer(s1, s2);
  g.at(2, 2) = 1.0;  // padding
  return g;
}

Vec BoundaryTorusMetric::orient(const Vec& p) const {
  return X1(p) + X2(p);
}

// ----------------------------------------------------------------- factories

std::unique_ptr<MetricField> make_flat(int n) {
  return std::make_unique<FlatMetric>(n);
}

std::unique_ptr<MetricField> make_conformally_flat(int n,
                                                   std::vector<FourierTerm> f) {
  return std::make_unique<ConformalMetric>(n, std::move(f));
}

std::unique_ptr<MetricField> make_boundary_2torus() {
  return std::make_unique<BoundaryTorusMetric>();
}

std::unique_ptr<MetricField> make_hedlund(const HedlundParams& params) {
  auto m = std::make_unique<HedlundMetric>(params);
  HedlundVerifyReport rep = verify_hedlund(*m, m->params(), 4000);
  if (!rep.pass())
    throw ConditionViolated("hedlund construction rejected by verifier");
  return m;
}

std::unique_ptr<MetricField> make_metric(const std::string& config_json) {
  json j;
  try {
    j = json::parse(config_json);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("metric config parse error: ") + e.what());
  }
  if (!j.contains("family")) throw ConfigError("metric config missing key: family");
  std::string fam = j["family"].get<std::string>();
  if (fam == "flat") {
    int n = j.value("dim", 2);
    return make_flat(n);
  }
  if (fam == "conformal") {
    int n = j.value("dim", 2);
    std::vector<FourierTerm> terms;
    if (j.contains("terms")) {
      for (const auto& t : j["terms"]) {
        FourierTerm ft;
        ft.amp = t.value("amp", 0.0);
        if (t.contains("k")) {
          auto k = t["k"];
          for (std::size_t i = 0; i < k.size() && i < 3; ++i)
            ft.k[i] = k[i].get<std::int64_t>();
        }
        ft.phase = t.value("phase", 0.0);
        terms.push_back(ft);
      }
    }
    return make_conformally_flat(n, std::move(terms));
  }
  if (fam == "hedlund") {
    HedlundParams p;
    if (j.contains("lambdas")) {
      auto l = j["lambdas"];
      if (l.size() != 3)
        throw ConfigError("metric config key lambdas: expected 3 values");
      for (int i = 0; i < 3; ++i) p.lambdas[i] = l[i].get<double>();
    }
    p.eps = j.value("eps", 0.01);
    return make_hedlund(p);
  }
  if (fam == "boundary2t") return make_boundary_2torus();
  throw ConfigError("metric config: unknown family '" + fam + "'");
}

// --------------------------------------------------------- causal sampling

Vec sample_causal_vector(const Form& G, const Vec& orient_dir, int dim,
                         std::mt19937_64& rng, double strict) {
  std::array<double, 3> ev;
  std::array<Vec, 3> evec;
  form_eigen_sym(G, ev, evec);
  if (!(ev[0] < 0 && ev[1] > 0 && ev[2] > 0))
    throw InvalidArgument("sample_causal_vector: form is not Lorentzian");
  Vec t = (1.0 / std::sqrt(-ev[0])) * evec[0];
  if (G(t, orient_dir) > 0) t = -t;
  // Spacelike directions; for dim==2 drop the padded axis (the eigenvector
  // closest to e_z).
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Vec s;
  if (dim == 2) {
    int keep = std::fabs(evec[1][2]) < std::fabs(evec[2][2]) ? 1 : 2;
    double sign = uni(rng) < 0.5 ? -1.0 : 1.0;
    s = (sign / std::sqrt(ev[keep])) * evec[keep];
  } else {
    double phi = 2.0 * M_PI * uni(rng);
    s = (std::cos(phi) / std::sqrt(ev[1])) * evec[1] +
        (std::sin(phi) / std::sqrt(ev[2])) * evec[2];
  }
  double rho = strict * uni(rng);
  double scale = 0.25 + 1.75 * uni(rng);
  return scale * (t + rho * s);
}

// ------------------------------------------------------------ verify_hedlund

HedlundVerifyReport verify_hedlund(const MetricField& m,
                                   const HedlundParams& params_in, int samples,
                                   std::uint64_t seed) {
  HedlundParams params = params_in;
  params.normalize();
  HedlundVerifyReport rep;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  const double e = params.eps;
  double inv_sqrt3 = 1.0 / std::sqrt(3.0);
  Vec v1 = {inv_sqrt3, inv_sqrt3, inv_sqrt3};
  Form g_eps = form_identity() - ((1.0 + e * e / 4.0) * outer(v1));
  Form g_2eps = form_identity() - ((1.0 + e * e) * outer(v1));
  Form g_line[3];
  for (int i = 0; i < 3; ++i) {
    double l2 = params.lambdas[i] * params.lambdas[i];
    Vec d = {l2 / 3.0, l2 / 3.0, l2 / 3.0};
    d[i] = -l2;
    g_line[i] = form_diag(d[0], d[1], d[2]);
    rep.v1_margin[i] = -l2 / 9.0 + e * e / 4.0;
  }
  LineSystem lines;

  auto random_point = [&]() -> Vec { return {uni(rng), uni(rng), uni(rng)}; };
  auto random_tube_point = [&](int fam) -> Vec {
    Vec a = LineSystem::base_anchor(fam) + (4.0 * uni(rng) - 2.0) * LineSystem::axis(fam);
    // Radial offset inside the tube.
    Vec r;
    double phi = 2.0 * M_PI * uni(rng);
    if (fam == 1) r = {0, std::cos(phi), std::sin(phi)};
    else if (fam == 2) r = {std::cos(phi), 0, std::sin(phi)};
    else r = {std::cos(phi), std::sin(phi), 0};
    return a + (e * uni(rng)) * r;
  };

  // Condition (i): every g_eps-future-causal v is gbar-future-causal with
  // larger length, i.e. gbar(v,v) <= g_eps(v,v) on the g_eps cone.
  double worst_i = -1e300;
  for (int s = 0; s < samples; ++s) {
    Vec p = (s % 2 == 0) ? random_point() : random_tube_point(1 + s % 3);
    // Normalize: the condition is homogeneous and the raw samples can be large
    // (the g_eps timelike eigenvalue is -eps^2/4), which costs precision.
    Vec v = normalized(sample_causal_vector(g_eps, v1, 3, rng));
    Form gbar = m.g_at(p);
    worst_i = std::max(worst_i, gbar(v, v) - g_eps(v, v));
    if (gbar(v, v1) >= 0) worst_i = std::max(worst_i, 1.0);  // orientation flip
  }
  rep.worst_i = worst_i;
  rep.pass_i = worst_i <= 1e-12;

  // Condition (ii): outside the tubes gbar = g_eps and g_2eps - g_eps <= 0 as
  // forms; report the largest eigenvalue of the difference.
  {
    Form diff = g_2eps - g_eps;
    std::array<double, 3> ev;
    std::array<Vec, 3> evec;
    form_eigen_sym(diff, ev, evec);
    double worst = ev[2];
    for (int s = 0; s < samples / 4; ++s) {
      Vec p = random_point();
      if (lines.nearest(p).dist < e) continue;
      Form gbar = m.g_at(p);
      for (int i = 0; i < 9; ++i)
        worst = std::max(worst, std::fabs(gbar.m[i] - g_eps.m[i]));
    }
    rep.worst_ii = worst;
    rep.pass_ii = worst <= 1e-12;
  }

  // Condition (iii): inside B_eps(L_i) every gbar-future-causal v satisfies
  // g_i(v,v) <= gbar(v,v), with equality exactly on L_i.
  double worst_iii = -1e300;
  for (int s = 0; s < samples; ++s) {
    int fam = 1 + s % 3;
    Vec p = random_tube_point(fam);
    Form gbar = m.g_at(p);
    Vec v;
    try {
      v = normalized(sample_causal_vector(gbar, v1, 3, rng));
    } catch (const InvalidArgument&) {
      worst_iii = std::max(worst_iii, 1.0);  // signature broken
      continue;
    }
    worst_iii = std::max(worst_iii, g_line[fam - 1](v, v) - gbar(v, v));
  }
  rep.worst_iii = worst_iii;
  rep.pass_iii = worst_iii <= 1e-12;

  // Equality exactly on L_i: on-line forms agree, off-line they differ.
  {
    double worst_gap = 0.0;
    bool off_line_strict = true;
    for (int fam = 1; fam <= 3; ++fam) {
      Vec on = LineSystem::base_anchor(fam) + 0.37 * LineSystem::axis(fam);
      Form gbar = m.g_at(on);
      for (int i = 0; i < 9; ++i)
        worst_gap = std::max(worst_gap, std::fabs(gbar.m[i] - g_line[fam - 1].m[i]));
      Vec off = on;
      off[fam % 3] += e / 2.0;  // transverse offset
      Form goff = m.g_at(off);
      double d = 0.0;
      for (int i = 0; i < 9; ++i)
        d = std::max(d, std::fabs(goff.m[i] - g_line[fam - 1].m[i]));
      if (d < 1e-12) off_line_strict = false;
    }
    rep.worst_equality_gap = worst_gap;
    rep.equality_on_lines = worst_gap <= 1e-12 && off_line_strict;
  }
  return rep;
}

}  // namespace lor
