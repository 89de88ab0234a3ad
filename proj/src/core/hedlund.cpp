#include "hedlund.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace lor {

namespace {

using HV = std::array<std::int64_t, 3>;  // coordinates in half-units (x2)

bool to_half(const Vec& v, HV& out) {
  for (int i = 0; i < 3; ++i) {
    double d = 2.0 * v[i];
    out[i] = std::llround(d);
    if (std::fabs(d - double(out[i])) > 1e-9) return false;
  }
  return true;
}

Vec from_half(const HV& z) { return {0.5 * z[0], 0.5 * z[1], 0.5 * z[2]}; }

int mod2(std::int64_t v) { return int(((v % 2) + 2) % 2); }

// Line lattice classes in half-units:
//   family 1: x2 = 0, x3 = 0 (mod 1)   -> half-units even, even
//   family 2: x1 = 0, x3 = 1/2 (mod 1) -> even, odd
//   family 3: x1 = 1/2, x2 = 1/2       -> odd, odd
bool on_family(const HV& z, int fam) {
  switch (fam) {
    case 1: return mod2(z[1]) == 0 && mod2(z[2]) == 0;
    case 2: return mod2(z[0]) == 0 && mod2(z[2]) == 1;
    case 3: return mod2(z[0]) == 1 && mod2(z[1]) == 1;
  }
  return false;
}

int family_of_point(const Vec& p) {
  HV z;
  if (!to_half(p, z)) return 0;
  for (int f = 1; f <= 3; ++f)
    if (on_family(z, f)) return f;
  return 0;
}

struct SearchState {
  std::vector<HV> nodes;
  int jumps = 0;
};

bool guide_search(const HV& z, int f, const HV& q, int depth, SearchState& st) {
  const int ax = f - 1;
  // Finish with a run along the current line?
  bool fixed_ok = true;
  for (int i = 0; i < 3; ++i)
    if (i != ax && z[i] != q[i]) fixed_ok = false;
  if (fixed_ok && q[ax] >= z[ax]) {
    if (q != z) st.nodes.push_back(q);
    return true;
  }
  if (depth == 0) return false;

  int others[2], no = 0;
  for (int g = 1; g <= 3; ++g)
    if (g != f) others[no++] = g;
  // Prefer the family whose axis has the larger remaining deficit.
  if (q[others[1] - 1] - z[others[1] - 1] > q[others[0] - 1] - z[others[0] - 1])
    std::swap(others[0], others[1]);

  for (int oi = 0; oi < 2; ++oi) {
    int f2 = others[oi];
    // Run-stop parity so that the (1/2,1/2,1/2) jump lands on a family-f2 line.
    std::int64_t t0 = 0;
    bool parity_found = false;
    for (std::int64_t t = z[ax]; t <= z[ax] + 1; ++t) {
      HV w = z;
      w[ax] = t;
      HV j = {w[0] + 1, w[1] + 1, w[2] + 1};
      if (on_family(j, f2)) {
        t0 = t;
        parity_found = true;
        break;
      }
    }
    if (!parity_found) continue;
    std::int64_t tcap = q[ax] - 1;  // jump adds 1 on this axis, never overshoot
    if (tcap < t0) continue;
    std::int64_t tmax = t0 + 2 * ((tcap - t0) / 2);
    std::int64_t cands[4] = {tmax, t0, tmax - 2, t0 + 2};
    std::int64_t prev = -1000000000;
    for (std::int64_t t : cands) {
      if (t < t0 || t > tmax || t == prev) continue;
      prev = t;
      HV w = z;
      w[ax] = t;
      HV j = {w[0] + 1, w[1] + 1, w[2] + 1};
      bool over = false;
      for (int i = 0; i < 3; ++i)
        if (j[i] > q[i]) over = true;
      if (over) continue;
      std::size_t mark = st.nodes.size();
      if (w != z) st.nodes.push_back(w);
      st.nodes.push_back(j);
      ++st.jumps;
      if (guide_search(j, f2, q, depth - 1, st)) return true;
      st.nodes.resize(mark);
      --st.jumps;
    }
  }
  return false;
}

Vec half_ones() { return {0.5, 0.5, 0.5}; }

// Path position at a given cumulative-arclength parameter.
Vec path_at(const CausalPath& path, double t) {
  const auto& par = path.param;
  if (t <= par.front()) return path.v.front();
  if (t >= par.back()) return path.v.back();
  auto it = std::upper_bound(par.begin(), par.end(), t);
  std::size_t i = std::size_t(it - par.begin());
  double a = par[i - 1], b = par[i];
  double u = b > a ? (t - a) / (b - a) : 0.0;
  return path.v[i - 1] + u * (path.v[i] - path.v[i - 1]);
}

std::vector<double> sample_params(const CausalPath& path, double ds) {
  std::vector<double> ts;
  double T = path.param.back();
  int n = std::max(2, int(std::ceil(T / ds)) + 1);
  ts.reserve(std::size_t(n));
  for (int i = 0; i < n; ++i) ts.push_back(T * double(i) / (n - 1));
  return ts;
}

// Distance from a point to the full line {anchor + t axis(family)}.
double dist_to_line(const Vec& p, int family, const Vec& anchor) {
  Vec d = p - anchor;
  d[family - 1] = 0.0;
  return norm(d);
}

std::int64_t quant(double x) { return std::llround(2.0 * x); }

struct AnchorKey {
  int family;
  std::int64_t a, b;
  bool operator==(const AnchorKey& o) const {
    return family == o.family && a == o.a && b == o.b;
  }
};

AnchorKey key_of(const LineHit& h) {
  // The two transverse coordinates identify the line within its family.
  int ax = h.family - 1;
  std::int64_t c[3] = {quant(h.anchor[0]), quant(h.anchor[1]), quant(h.anchor[2])};
  c[ax] = 0;
  int i0 = ax == 0 ? 1 : 0;
  int i1 = ax == 2 ? 1 : 2;
  return {h.family, c[i0], c[i1]};
}

// Subtract a union of sorted disjoint intervals from [0, T].
std::vector<std::pair<double, double>> complement_intervals(
    std::vector<std::pair<double, double>> covered, double T) {
  std::sort(covered.begin(), covered.end());
  std::vector<std::pair<double, double>> merged;
  for (auto& iv : covered) {
    if (!merged.empty() && iv.first <= merged.back().second + 1e-12)
      merged.back().second = std::max(merged.back().second, iv.second);
    else
      merged.push_back(iv);
  }
  std::vector<std::pair<double, double>> out;
  double cur = 0.0;
  for (auto& iv : merged) {
    if (iv.first > cur + 1e-12) out.push_back({cur, iv.first});
    cur = std::max(cur, iv.second);
  }
  if (T > cur + 1e-12) out.push_back({cur, T});
  return out;
}

}  // namespace

// ------------------------------------------------------------- guide planning

GuidePlan plan_hedlund_guide(const Vec& p, const Vec& q) {
  HV zp, zq;
  if (!to_half(p, zp) || !to_half(q, zq))
    throw NotConstructible("guide endpoints must lie on the half-integer lattice");
  GuidePlan plan;
  if (zp == zq) {
    plan.vertices = {p};
    plan.direct = true;
    return plan;
  }
  int fams[3] = {0, 0, 0};
  int nf = 0;
  for (int f = 1; f <= 3; ++f)
    if (on_family(zp, f)) fams[nf++] = f;
  if (nf == 0)
    throw NotConstructible("guide start point does not lie on the line system");
  // Prefer starting along the family with the largest displacement component.
  std::sort(fams, fams + nf, [&](int a, int b) {
    return zq[a - 1] - zp[a - 1] > zq[b - 1] - zp[b - 1];
  });
  for (int fi = 0; fi < nf; ++fi) {
    SearchState st;
    if (guide_search(zp, fams[fi], zq, 5, st)) {
      plan.vertices.push_back(p);
      for (const HV& z : st.nodes) {
        Vec v = from_half(z);
        if (norm(v - plan.vertices.back()) > 1e-12) plan.vertices.push_back(v);
      }
      plan.jumps = st.jumps;
      plan.direct = st.jumps == 0;
      return plan;
    }
  }
  throw NotConstructible("no run/jump guide connects the endpoints");
}

// -------------------------------------------------------------- standard path

CausalPath standard_path(const HedlundMetric& m, const Vec& p, const Vec& q) {
  const double tol = 1e-9;
  int i = family_of_point(p);
  int j = family_of_point(q);
  if (i == 0 || j == 0)
    throw NotConstructible("standard path endpoints must lie on the line system");
  if (i == j)
    throw NotConstructible("standard path endpoints must lie on different families");
  Vec h = q - p;
  for (int a = 0; a < 3; ++a)
    if (h[a] < 0.5 - tol)
      throw NotConstructible("standard path requires h >= 1/2 componentwise");
  int k = 6 - i - j;
  double hk = h[k - 1];

  std::vector<Vec> verts;
  if (std::fabs(hk - 0.5) <= tol) {
    Vec pi = p;
    pi[i - 1] = q[i - 1] - 0.5;
    if (pi[i - 1] < p[i - 1] - tol)
      throw NotConstructible("standard path: initial run would be past-pointing");
    Vec j1 = pi + half_ones();
    for (int a = 0; a < 3; ++a)
      if (a != j - 1 && std::fabs(j1[a] - q[a]) > tol)
        throw NotConstructible("standard path: jump does not land on the target line");
    if (q[j - 1] < j1[j - 1] - tol)
      throw NotConstructible("standard path: final run would be past-pointing");
    verts = {p, pi, j1, q};
  } else if (hk >= 1.0 - tol) {
    Vec pi = p;
    pi[i - 1] = q[i - 1] - 1.0;
    if (pi[i - 1] < p[i - 1] - tol)
      throw NotConstructible("standard path: initial run would be past-pointing");
    Vec j1 = pi + half_ones();
    if (family_of_point(j1) != k)
      throw NotConstructible("standard path: no intermediate line at the jump point");
    Vec pk = j1;
    pk[k - 1] = q[k - 1] - 0.5;
    if (pk[k - 1] < j1[k - 1] - tol)
      throw NotConstructible("standard path: intermediate run would be past-pointing");
    Vec j2 = pk + half_ones();
    for (int a = 0; a < 3; ++a)
      if (a != j - 1 && std::fabs(j2[a] - q[a]) > tol)
        throw NotConstructible("standard path: jump does not land on the target line");
    if (q[j - 1] < j2[j - 1] - tol)
      throw NotConstructible("standard path: final run would be past-pointing");
    verts = {p, pi, j1, pk, j2, q};
  } else {
    throw NotConstructible("standard path requires h^k >= 1 or h^k = 1/2");
  }
  std::vector<Vec> dedup;
  for (const Vec& v : verts)
    if (dedup.empty() || norm(v - dedup.back()) > 1e-12) dedup.push_back(v);
  return make_path(m, std::move(dedup));
}

// ----------------------------------------------------------- tube partitioning

TubePartition count_tube_changes(const HedlundMetric& m, const CausalPath& path) {
  TubePartition tp;
  if (path.size() < 2) return tp;
  const double eps = m.eps();
  const double ds = std::min(eps / 4.0, 0.01);
  std::vector<double> ts = sample_params(path, ds);
  const double T = path.param.back();

  struct Sample {
    double t;
    bool in;
    AnchorKey key;
    Vec anchor;
  };
  std::vector<Sample> samples;
  samples.reserve(ts.size());
  for (double t : ts) {
    Vec x = path_at(path, t);
    LineHit h = m.lines().nearest(x);
    Sample s;
    s.t = t;
    s.in = h.dist <= eps;
    if (s.in) {
      s.key = key_of(h);
      s.anchor = h.anchor;
    }
    samples.push_back(s);
  }

  // Visits to tube components (consecutive-deduped).
  for (const Sample& s : samples) {
    if (!s.in) continue;
    if (!tp.visits.empty()) {
      LineHit hh;
      hh.family = tp.visits.back().family;
      hh.anchor = tp.visits.back().anchor;
      if (key_of(hh) == s.key) {
        tp.visits.back().t1 = s.t;
        continue;
      }
    }
    TubePartition::Visit v;
    v.t0 = v.t1 = s.t;
    v.family = s.key.family;
    v.anchor = s.anchor;
    tp.visits.push_back(v);
  }
  tp.tube_changes = tp.visits.empty() ? 0 : int(tp.visits.size()) - 1;

  // Per-family A_i: closed tube preimages united with gaps between visits of
  // the same line.
  for (int fam = 1; fam <= 3; ++fam) {
    struct Marked {
      double a, b;
      AnchorKey key;
    };
    std::vector<Marked> marked;
    for (const Sample& s : samples) {
      if (!s.in || s.key.family != fam) continue;
      if (!marked.empty() && marked.back().key == s.key &&
          s.t - marked.back().b <= 1.5 * (T / double(ts.size() - 1)))
        marked.back().b = s.t;
      else
        marked.push_back({s.t, s.t, s.key});
    }
    auto& out = tp.Ai[fam - 1];
    for (std::size_t a = 0; a < marked.size(); ++a) {
      if (!out.empty() && marked[a].key == marked[a - 1].key)
        out.back().second = marked[a].b;  // bridge the same-line gap B_{i,k}
      else
        out.push_back({marked[a].a, marked[a].b});
    }
  }

  std::vector<std::pair<double, double>> covered;
  for (const auto& famiv : tp.Ai)
    covered.insert(covered.end(), famiv.begin(), famiv.end());
  tp.A = complement_intervals(std::move(covered), T);
  return tp;
}

// --------------------------------------------------------------------- checks

double check_F30(const HedlundMetric& m, const CausalPath& path) {
  Vec h = path.v.back() - path.v.front();
  double rhs = 2.0 * (h[0] + h[1] + h[2] + 4.0 * m.eps());
  return rhs - riemann_length(path);
}

double check_L31(const HedlundMetric& m, const CausalPath& path) {
  TubePartition tp = count_tube_changes(m, path);
  double lhs = 0.0;
  for (const auto& iv : tp.A) {
    Vec d = path_at(path, iv.second) - path_at(path, iv.first);
    for (int i = 0; i < 3; ++i) lhs += m.lambda(i + 1) * d[i];
  }
  Vec h = path.v.back() - path.v.front();
  double lin = 0.0;
  for (int i = 0; i < 3; ++i) lin += m.lambda(i + 1) * h[i];
  const double eps = m.eps();
  // Coefficient from the change-count estimate:
  //   L^g <= sum lambda_i h^i - c * sum lambda_i int_A dgamma^i + 4 eps
  // with c = 1 - 8 eps / (1 - 4 eps) - eps.
  double c = 1.0 - 8.0 * eps / (1.0 - 4.0 * eps) - eps;
  double rhs = (lin - path.Lg + 4.0 * eps) / c;
  return rhs - lhs;
}

double hausdorff_distance(const std::vector<Vec>& a, const std::vector<Vec>& b) {
  auto one_sided = [](const std::vector<Vec>& from, const std::vector<Vec>& to) {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < from.size(); ++i) {
      Vec d = from[i + 1] - from[i];
      int n = std::max(1, int(std::ceil(norm(d) / 0.005)));
      for (int k = 0; k <= n; ++k) {
        Vec x = from[i] + (double(k) / n) * d;
        worst = std::max(worst, dist_point_polyline(x, to));
      }
    }
    if (from.size() == 1) worst = dist_point_polyline(from[0], to);
    return worst;
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

double shadowing_check(const HedlundMetric& m, const CausalPath& maximizer) {
  CausalPath std_path = standard_path(m, maximizer.v.front(), maximizer.v.back());
  return hausdorff_distance(maximizer.v, std_path.v);
}

double tube_confinement_radius(const CausalPath& path, int family,
                               const Vec& anchor, double delta) {
  if (path.size() < 2) return 0.0;
  const double T = path.param.back();
  double r = 0.0;
  for (double t : sample_params(path, 0.01)) {
    Vec x = path_at(path, t);
    if (dist_to_line(x, family, anchor) > delta)
      r = std::max(r, std::min(t, T - t));
  }
  return r;
}

double hedlund_eps_prime(const HedlundMetric& m, int samples,
                         std::uint64_t seed) {
  // Largest radius r <= eps such that at tube points within r of a line every
  // sampled future-causal vector keeps a definite margin in the widened line
  // cone (lambda_j^2/3)(-(dx^j)^2 + (dx^l)^2 + (dx^m)^2).
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double eps = m.eps();
  double best = eps / 2.0;  // conservative fallback
  for (double r = eps * 0.95; r > eps * 0.1; r -= eps * 0.05) {
    bool ok = true;
    for (int s = 0; s < samples && ok; ++s) {
      int fam = 1 + s % 3;
      Vec a = LineSystem::base_anchor(fam) +
              (2.0 * uni(rng) - 1.0) * LineSystem::axis(fam);
      double phi = 2.0 * M_PI * uni(rng);
      Vec rad;
      if (fam == 1) rad = {0, std::cos(phi), std::sin(phi)};
      else if (fam == 2) rad = {std::cos(phi), 0, std::sin(phi)};
      else rad = {std::cos(phi), std::sin(phi), 0};
      Vec p = a + (r * uni(rng)) * rad;
      Form G = m.g_at(p);
      Vec v;
      try {
        v = sample_causal_vector(G, m.orient(p), 3, rng);
      } catch (const InvalidArgument&) {
        ok = false;
        break;
      }
      double l2 = m.lambda(fam) * m.lambda(fam);
      double wide = 0.0;
      for (int c = 0; c < 3; ++c)
        wide += (c == fam - 1 ? -1.0 : 1.0) * v[c] * v[c];
      if ((l2 / 3.0) * wide > 0.0) ok = false;
    }
    if (ok) {
      best = std::max(best, r);
      break;
    }
  }
  return best;
}

HeteroclinicReport heteroclinic_experiment(const HedlundMetric& m, int fam_i,
                                           const Vec& anchor_i, int fam_j,
                                           const Vec& anchor_j,
                                           const std::vector<int>& ladder,
                                           const ReachOptions& base) {
  HeteroclinicReport rep;
  Prober prober = make_hedlund_prober(m, base);
  const double eps = m.eps();
  rep.confined = true;
  for (int n : ladder) {
    Vec p = anchor_i - double(n) * LineSystem::axis(fam_i);
    Vec q = anchor_j + double(n) * LineSystem::axis(fam_j);
    // Fail early (NotConstructible) when the reachability ordering is broken.
    plan_hedlund_guide(p, q);
    ReachResult rr = prober(p, q, true);
    if (!rr.reachable || rr.path.empty())
      throw NotConstructible("heteroclinic endpoints are not connectable");
    const CausalPath& path = rr.path;
    double T = path.param.back();
    double head = 0.0, tail = 0.0;
    for (double t : sample_params(path, 0.01)) {
      Vec x = path_at(path, t);
      if (t <= T / 3.0)
        head = std::max(head, dist_to_line(x, fam_i, anchor_i));
      if (t >= 2.0 * T / 3.0)
        tail = std::max(tail, dist_to_line(x, fam_j, anchor_j));
    }
    rep.ns.push_back(n);
    rep.head_confinement.push_back(head);
    rep.tail_confinement.push_back(tail);
    if (head > eps || tail > eps) rep.confined = false;
  }
  return rep;
}

bool connectability_check(const HedlundMetric& m, const Vec& p, const Vec& q,
                          const ReachOptions& base) {
  Prober prober = make_hedlund_prober(m, base);
  ReachResult rr = prober(p, q, false);
  return rr.reachable;
}

Prober make_hedlund_prober(const HedlundMetric& m, ReachOptions base) {
  base.mode = ReachOptions::Mode::Tube;
  if (base.tube_radius <= 0) base.tube_radius = 8.0 * m.eps();
  return [&m, base](const Vec& p, const Vec& q, bool want_path) {
    ReachOptions o = base;
    o.want_path = want_path;
    Vec qs;
    for (int i = 0; i < 3; ++i) qs[i] = std::round(2.0 * q[i]) / 2.0;
    GuidePlan plan;
    try {
      plan = plan_hedlund_guide(p, qs);
    } catch (const NotConstructible&) {
      return ReachResult{};  // unplannable: report unreachable
    }
    o.guide = plan.vertices;
    return time_separation(m, p, qs, o);
  };
}

}  // namespace lor
