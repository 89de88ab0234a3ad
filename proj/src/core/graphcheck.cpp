#include "graphcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "errors.hpp"
#include "path.hpp"

namespace lor {

double torus_dist(const Vec& a, const Vec& b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) {
    double d = std::fabs(a[i] - b[i]);
    d -= std::floor(d);
    d = std::min(d, 1.0 - d);
    s += d * d;
  }
  return std::sqrt(s);
}

// --- distance to the light cone ---------------------------------------------

namespace {

// Distance from x to the line through the origin with direction l.
double dist_to_line(const Vec& x, const Vec& l) {
  Vec u = normalized(l);
  double t = dot(x, u);
  return std::sqrt(std::max(0.0, dot(x, x) - t * t));
}

}  // namespace

double dist_to_light(const Form& G, const Vec& v, int dim) {
  std::array<double, 3> mu;
  std::array<Vec, 3> e;
  form_eigen_sym(G, mu, e);
  // Ascending eigenvalues: mu[0] < 0 is the timelike one.
  Vec vt = vec(dot(v, e[0]), dot(v, e[1]), dot(v, e[2]));
  double m0 = -mu[0];
  if (dim == 2) {
    // The padded axis is an exact +1 eigenvector; the cone is the pair of
    // lines m0 u0^2 = mu_s u1^2 in the (e0, e_s) plane.
    int s = std::fabs(dot(e[1], vec(0, 0, 1))) < 0.5 ? 1 : 2;
    double best = 1e300;
    for (double sgn : {1.0, -1.0}) {
      Vec l = vec(0, 0, 0);
      l[0] = std::sqrt(mu[s]);
      l[s] = sgn * std::sqrt(m0);
      best = std::min(best, dist_to_line(vt, l));
    }
    return best;
  }
  auto cone_dist = [&](double th) {
    Vec l = vec(std::sqrt(mu[1] * std::cos(th) * std::cos(th) +
                          mu[2] * std::sin(th) * std::sin(th)) /
                    std::sqrt(m0),
                std::cos(th), std::sin(th));
    return dist_to_line(vt, l);
  };
  int N = 512;
  double best = 1e300, best_th = 0.0;
  for (int i = 0; i < N; ++i) {
    double th = 2.0 * M_PI * i / N;
    double d = cone_dist(th);
    if (d < best) {
      best = d;
      best_th = th;
    }
  }
  // Golden-section polish around the best sampled direction.
  double a = best_th - 2.0 * M_PI / N, b = best_th + 2.0 * M_PI / N;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a), d = a + gr * (b - a);
  for (int it = 0; it < 60; ++it) {
    if (cone_dist(c) < cone_dist(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - gr * (b - a);
    d = a + gr * (b - a);
  }
  return std::min(best, cone_dist(0.5 * (a + b)));
}

// --- reverse Cauchy-Schwarz constants ---------------------------------------

L20aReport lemma20a_check(const MetricField& m, int samples,
                          std::uint64_t seed) {
  L20aReport rep;
  rep.eps_tilde = 1e300;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const int dim = m.dim();
  for (int i = 0; i < samples; ++i) {
    Vec p = vec(uni(rng), uni(rng), dim == 3 ? uni(rng) : 0.0);
    Form G = m.g_at(p);
    Vec o = m.orient(p);
    Vec v = sample_causal_vector(G, o, dim, rng, 1.0);
    Vec w = sample_causal_vector(G, o, dim, rng, 1.0);
    double nv = std::sqrt(std::fabs(G(v, v)));
    double nw = std::sqrt(std::fabs(G(w, w)));
    double lhs = -G(v, w) - nv * nw;
    double cosang = dot(v, w) / (norm(v) * norm(w));
    double sin2 = std::max(0.0, 1.0 - cosang * cosang);
    if (sin2 > 1e-10) {
      rep.eps_tilde =
          std::min(rep.eps_tilde, lhs / (norm(v) * norm(w) * sin2));
      ++rep.pairs;
    }
    double dl = dist_to_light(G, v, dim);
    if (dl * norm(v) > 1e-12)
      rep.C_tilde =
          std::max(rep.C_tilde, std::fabs(G(v, v)) / (norm(v) * dl));
  }
  rep.pass = rep.pairs > 0 && rep.eps_tilde > 0.0 && rep.C_tilde < 1e6;
  return rep;
}

// --- Holder / Lipschitz fits -------------------------------------------------

HolderReport holder_check(const SupportSample& sample) {
  HolderReport rep;
  const auto& s = sample.s;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      double db = torus_dist(s[i].base, s[j].base, 3);
      double dv = norm(s[i].dir - s[j].dir);
      if (db < 1e-9) {
        if (dv > 1e-6) ++rep.injectivity_violations;
        continue;
      }
      rep.K = std::max(rep.K, dv * dv / db);
      ++rep.pairs;
    }
  return rep;
}

LipschitzReport lipschitz_check(const MetricField& m,
                                const SupportSample& sample, double kappa) {
  LipschitzReport rep;
  const auto& s = sample.s;
  for (const TangentSample& t : s)
    if (lorentz_norm(m, t.base, t.dir) < kappa) ++rep.outside_kappa;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      double db = torus_dist(s[i].base, s[j].base, 3);
      if (db < 1e-9) continue;
      rep.Kprime = std::max(rep.Kprime, norm(s[i].dir - s[j].dir) / db);
      ++rep.pairs;
    }
  return rep;
}

std::string holder_scatter_csv(const SupportSample& sample) {
  std::string out = "dist_base,dist_tangent\n";
  char buf[80];
  const auto& s = sample.s;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      double db = torus_dist(s[i].base, s[j].base, 3);
      double dv = norm(s[i].dir - s[j].dir);
      if (db < 1e-12 || dv < 1e-12) continue;
      std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", db, dv);
      out += buf;
    }
  return out;
}

// --- crossing exchange -------------------------------------------------------

namespace {

// High-accuracy local d-hat: straight causal chord (optimal in constant
// metrics) refined by coordinate ascent; grid DP fallback for chords that
// leave the cone. Endpoint snapping at the DP spacing would swamp the
// exchange gain, hence the chord-first strategy.
double local_dhat(const MetricField& m, const Vec& a, const Vec& b,
                  double spacing) {
  const int S = 16;
  // Constant-metric shortcut: the straight chord is exactly optimal.
  Vec mid = 0.5 * (a + b);
  if (m.constant_radius(mid) >= 0.5 * norm(b - a) + 1e-12) {
    if (!segment_causal(m, a, b, kPermissiveMargin))
      throw NotCrossingConfiguration("exchange endpoints not causally related");
    return segment_lorentz_length(m, a, b);
  }
  bool chord_ok = true;
  for (int i = 0; i < S && chord_ok; ++i) {
    Vec p = a + (double(i) / S) * (b - a);
    Vec q = a + (double(i + 1) / S) * (b - a);
    chord_ok = segment_causal(m, p, q, kPermissiveMargin);
  }
  CausalPath path;
  if (chord_ok) {
    std::vector<Vec> verts;
    for (int i = 0; i <= S; ++i)
      verts.push_back(a + (double(i) / S) * (b - a));
    path = make_path(m, std::move(verts));
  } else {
    ReachOptions o;
    o.spacing = spacing;
    o.want_path = true;
    Prober prober = make_diamond_prober(m, o);
    ReachResult rr = prober(a, b, true);
    if (!rr.reachable || rr.path.empty())
      throw NotCrossingConfiguration("exchange endpoints not causally related");
    // Morph the snapped DP endpoints onto the exact ones.
    std::vector<Vec> verts = rr.path.v;
    Vec dp = a - verts.front();
    Vec dq = b - verts.back();
    std::size_t n = verts.size() - 1;
    for (std::size_t i = 0; i < verts.size(); ++i) {
      double t = double(i) / double(n);
      verts[i] = verts[i] + (1.0 - t) * dp + t * dq;
    }
    try {
      path = make_path(m, std::move(verts));
    } catch (const NonCausalSegment&) {
      return rr.d;  // morph left the cone: keep the snapped lower bound
    }
  }
  RefineResult r1 = refine_maximizer(m, path, 30, spacing);
  RefineResult r2 = refine_maximizer(m, r1.path, 15, spacing / 32.0);
  return r2.path.Lg;
}

}  // namespace

CrossingGain crossing_gain(const MetricField& m, const Segment& x1,
                           const Segment& x2, double spacing) {
  if (spacing <= 0.0) spacing = std::min(x1.half, x2.half) / 50.0;
  Vec a1 = x1.center - x1.half * x1.dir, b1 = x1.center + x1.half * x1.dir;
  Vec a2 = x2.center - x2.half * x2.dir, b2 = x2.center + x2.half * x2.dir;
  CrossingGain g;
  g.Lg1 = segment_lorentz_length(m, a1, b1);
  g.Lg2 = segment_lorentz_length(m, a2, b2);
  g.d_cross_12 = local_dhat(m, a1, b2, spacing);
  g.d_cross_21 = local_dhat(m, a2, b1, spacing);
  g.gain = g.d_cross_12 + g.d_cross_21 - g.Lg1 - g.Lg2;
  g.dist_tangents = norm(x1.dir - x2.dir);
  g.dist_bases = norm(x1.center - x2.center);
  return g;
}

GainBattery crossing_battery(const MetricField& m, int configs,
                             std::uint64_t seed, double half) {
  GainBattery bat;
  bat.min_gain_ratio = 1e300;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int i = 0; i < configs; ++i) {
    double rap = -0.6 + 1.2 * uni(rng);
    Vec u = normalized(vec(std::cosh(rap), std::sinh(rap)));
    double delta = 0.05 + 0.15 * uni(rng);
    double ca = std::cos(delta), sa = std::sin(delta);
    Vec w = vec(ca * u[0] - sa * u[1], sa * u[0] + ca * u[1]);
    Vec x0 = vec(uni(rng), uni(rng));
    double psi = 2.0 * M_PI * uni(rng);
    double dt = norm(u - w);
    Vec p2 = x0 + (0.9 * dt * dt) * vec(std::cos(psi), std::sin(psi));
    Segment s1{x0, u, half}, s2{p2, w, half};
    try {
      CrossingGain g = crossing_gain(m, s1, s2);
      double ratio = g.gain / (g.dist_tangents * g.dist_tangents);
      bat.min_gain_ratio = std::min(bat.min_gain_ratio, ratio);
      ++bat.configs;
    } catch (const NotCrossingConfiguration&) {
      ++bat.skipped;
    }
  }
  bat.pass = bat.configs > 0 && bat.min_gain_ratio > 0.0;
  return bat;
}

// --- the Minkowski all-maximizer ladder --------------------------------------

SupportSample r20_family(double delta, double half, int per_segment) {
  SupportSample out;
  Vec u = vec(1, 0);
  double phi = 2.0 * std::asin(0.5 * delta);
  Vec w = vec(std::cos(phi), std::sin(phi));
  Vec p0 = vec(0.0, delta * delta);
  for (int i = 0; i < per_segment; ++i) {
    double t = -half + 2.0 * half * i / (per_segment - 1);
    out.s.push_back({t * u, u});
    out.s.push_back({p0 + t * w, w});
  }
  return out;
}

R20Ladder r20_ladder(const std::vector<double>& deltas, double half) {
  R20Ladder lad;
  lad.deltas = deltas;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double d : deltas) {
    Vec u = vec(1, 0);
    double phi = 2.0 * std::asin(0.5 * d);
    Vec w = vec(std::cos(phi), std::sin(phi));
    // Canonical closest cross pair: x1(0) = 0 against x2(0) = p0.
    double db = d * d;
    double dv = norm(u - w);
    lad.base_dist.push_back(db);
    lad.dir_dist.push_back(dv);
    lad.holder_K.push_back(dv * dv / db);
    lad.lip_K.push_back(dv / db);
    double lx = std::log(db), ly = std::log(dv);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    (void)half;
  }
  double n = double(deltas.size());
  lad.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return lad;
}

}  // namespace lor
