#include "reach.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>

#include "errors.hpp"

namespace lor {

namespace {

// ------------------------------------------------------------------ stencil

struct StencilData {
  std::vector<IVec> s;
  std::vector<Vec> delta;               // spacing * s
  std::vector<double> r2;               // |delta|^2 (Euclidean background)
  std::vector<int> dl;                  // temporal layer jump c.s
  std::vector<double> base_q, base_o;   // base-form quadratic / orientation values
  std::vector<double> base_weight;
  std::vector<int> base_list;           // base-admissible stencil indices
  std::vector<std::vector<double>> prof_q, prof_o;  // per profile id
  bool profiles = false;
  int maxdl = 1;
  double max_halflen = 0.0;
};

StencilData build_stencil(const MetricField& m, const IVec& c, double spacing,
                          double margin, int k) {
  StencilData sd;
  int zmax = m.dim() == 3 ? k : 0;
  for (std::int64_t sx = -k; sx <= k; ++sx)
    for (std::int64_t sy = -k; sy <= k; ++sy)
      for (std::int64_t sz = -zmax; sz <= zmax; ++sz) {
        IVec s = {sx, sy, sz};
        std::int64_t inc = c[0] * sx + c[1] * sy + c[2] * sz;
        if (inc < 1) continue;
        std::int64_t g = igcd(igcd(sx, sy), sz);
        if (g != 1) continue;
        sd.s.push_back(s);
      }
  std::sort(sd.s.begin(), sd.s.end());
  if (sd.s.empty()) throw EmptyStencil("no stencil direction with positive temporal increment");

  const int n = int(sd.s.size());
  sd.delta.resize(n);
  sd.r2.resize(n);
  sd.dl.resize(n);
  sd.base_q.resize(n);
  sd.base_o.resize(n);
  sd.base_weight.assign(n, 0.0);

  Form base = m.base_form();
  Vec orient0 = m.orient(m.generic_point());
  for (int i = 0; i < n; ++i) {
    Vec d = {spacing * sd.s[i][0], spacing * sd.s[i][1], spacing * sd.s[i][2]};
    sd.delta[i] = d;
    sd.r2[i] = dot(d, d);
    sd.dl[i] = int(c[0] * sd.s[i][0] + c[1] * sd.s[i][1] + c[2] * sd.s[i][2]);
    sd.maxdl = std::max(sd.maxdl, sd.dl[i]);
    sd.max_halflen = std::max(sd.max_halflen, 0.5 * std::sqrt(sd.r2[i]));
    sd.base_q[i] = base(d, d);
    sd.base_o[i] = base(d, orient0);
    if (sd.base_q[i] <= margin * sd.r2[i] && sd.base_o[i] < 0.0) {
      sd.base_weight[i] = std::sqrt(std::fabs(sd.base_q[i]));
      sd.base_list.push_back(i);
    }
  }
  int np = m.profile_count();
  if (np > 0) {
    sd.profiles = true;
    sd.prof_q.resize(np);
    sd.prof_o.resize(np);
    for (int id = 0; id < np; ++id) {
      Form G = m.profile_form(id);
      sd.prof_q[id].resize(n);
      sd.prof_o[id].resize(n);
      for (int i = 0; i < n; ++i) {
        sd.prof_q[id][i] = G(sd.delta[i], sd.delta[i]);
        sd.prof_o[id][i] = G(sd.delta[i], orient0);
      }
    }
  }
  return sd;
}

// ------------------------------------------------------------------- region

struct Region {
  ReachOptions::Mode mode;
  Vec p, q;
  double radius = 0.0;
  std::vector<Vec> guide;
  std::vector<double> gcum;  // temporal value theta.(v - p) at guide vertices
  Vec theta;
  double slack = 0.0;        // |theta| * radius

  bool contains(const Vec& x, double tval) const {
    if (mode == ReachOptions::Mode::Diamond)
      return dist_point_segment(x, p, q) <= radius;
    // Tube: only guide segments whose temporal span can reach tval matter.
    auto lo = std::lower_bound(gcum.begin(), gcum.end(), tval - slack);
    std::size_t j0 = lo == gcum.begin() ? 0 : (lo - gcum.begin()) - 1;
    for (std::size_t j = j0; j + 1 < guide.size(); ++j) {
      if (gcum[j] > tval + slack) break;
      if (dist_point_segment(x, guide[j], guide[j + 1]) <= radius) return true;
    }
    return false;
  }

  // A point of the chord/guide at temporal value tval (for node counting).
  // The guide polyline is populated in both modes (chord {p,q} for diamonds).
  Vec center(double tval) const {
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < guide.size(); ++j) {
      double seg = dot(theta, guide[j + 1] - guide[j]);
      if (acc + seg >= tval || j + 2 == guide.size()) {
        double t = seg > 0 ? std::clamp((tval - acc) / seg, 0.0, 1.0) : 0.0;
        return guide[j] + t * (guide[j + 1] - guide[j]);
      }
      acc += seg;
    }
    return p;
  }

  double min_temporal_slope() const {
    double s = 1e300;
    for (std::size_t j = 0; j + 1 < guide.size(); ++j) {
      Vec d = guide[j + 1] - guide[j];
      double len = norm(d);
      if (len > 0) s = std::min(s, dot(theta, d) / len);
    }
    return s;
  }
};

Region make_region(const Vec& theta, const Vec& p, const Vec& q,
                   const ReachOptions& opts) {
  Region r;
  r.mode = opts.mode;
  r.p = p;
  r.q = q;
  r.theta = theta;
  if (opts.mode == ReachOptions::Mode::Diamond) {
    r.radius = std::max(opts.diamond_factor * norm(q - p), opts.diamond_min_radius);
    r.guide = {p, q};
  } else {
    r.radius = opts.tube_radius;
    r.guide = opts.guide.empty() ? std::vector<Vec>{p, q} : opts.guide;
    if (norm(r.guide.front() - p) > 1e-9 || norm(r.guide.back() - q) > 1e-9)
      throw InvalidArgument("tube guide must run from p to q");
    double acc = 0.0;
    r.gcum.push_back(0.0);
    for (std::size_t j = 0; j + 1 < r.guide.size(); ++j) {
      double seg = dot(r.theta, r.guide[j + 1] - r.guide[j]);
      if (seg <= 0)
        throw InvalidArgument("tube guide must be temporally monotone");
      acc += seg;
      r.gcum.push_back(acc);
    }
    r.slack = norm(r.theta) * (r.radius + 1e-9);
  }
  return r;
}

// --------------------------------------------------------- per-layer storage

struct NodeMap {
  std::vector<std::uint32_t> table;  // slot -> index+1 (0 empty)
  std::vector<std::uint32_t> keys;
  std::vector<double> dist;
  std::vector<std::int32_t> pred;
  std::uint32_t mask = 0;

  static std::uint32_t hash(std::uint32_t k) {
    k ^= k >> 16;
    k *= 0x7feb352dU;
    k ^= k >> 15;
    k *= 0x846ca68bU;
    k ^= k >> 16;
    return k;
  }
  void ensure_table() {
    if (table.empty()) {
      table.assign(64, 0);
      mask = 63;
    } else if ((keys.size() + 1) * 10 > table.size() * 7) {
      std::vector<std::uint32_t> old;
      old.swap(table);
      table.assign(old.size() * 2, 0);
      mask = std::uint32_t(table.size() - 1);
      for (std::uint32_t idx = 0; idx < keys.size(); ++idx) {
        std::uint32_t h = hash(keys[idx]) & mask;
        while (table[h]) h = (h + 1) & mask;
        table[h] = idx + 1;
      }
    }
  }
  // Returns index; created=true if new.
  std::uint32_t find_or_insert(std::uint32_t key, bool& created) {
    ensure_table();
    std::uint32_t h = hash(key) & mask;
    while (table[h]) {
      std::uint32_t idx = table[h] - 1;
      if (keys[idx] == key) {
        created = false;
        return idx;
      }
      h = (h + 1) & mask;
    }
    table[h] = std::uint32_t(keys.size()) + 1;
    keys.push_back(key);
    dist.push_back(-1e300);
    pred.push_back(-2);
    created = true;
    return std::uint32_t(keys.size()) - 1;
  }
  std::int64_t find(std::uint32_t key) const {
    if (table.empty()) return -1;
    std::uint32_t h = hash(key) & mask;
    while (table[h]) {
      std::uint32_t idx = table[h] - 1;
      if (keys[idx] == key) return idx;
      h = (h + 1) & mask;
    }
    return -1;
  }
};

struct Layer {
  bool has_base = false;
  std::int64_t base_a = 0, base_b = 0;
  NodeMap map;
  // Compressed predecessor record kept for path reconstruction.
  bool compressed = false;
  std::vector<std::uint32_t> ckeys;      // sorted
  std::vector<std::int32_t> cpred;
};

inline std::uint32_t pack_key(std::int64_t a, std::int64_t b, const Layer& L) {
  std::int64_t oa = a - L.base_a + 32768;
  std::int64_t ob = b - L.base_b + 32768;
  if (oa < 0 || oa > 65535 || ob < 0 || ob > 65535)
    throw InvalidArgument("reach: region extent exceeds layer key range");
  return std::uint32_t((oa << 16) | ob);
}

inline void unpack_key(std::uint32_t key, const Layer& L, std::int64_t& a,
                       std::int64_t& b) {
  a = std::int64_t(key >> 16) - 32768 + L.base_a;
  b = std::int64_t(key & 0xffff) - 32768 + L.base_b;
}

}  // namespace

// ------------------------------------------------------------------- graphs

bool CausalGraph::in_region(const Vec& x) const {
  // The region predicate is cheap to rebuild relative to any DP run.
  Vec theta = {double(temporal[0]), double(temporal[1]), double(temporal[2])};
  Region region = make_region(theta, p, q, opts);
  return region.contains(x, dot(theta, x - p));
}

CausalGraph build_graph(const MetricField& m, const Vec& p, const Vec& q,
                        const ReachOptions& opts) {
  CausalGraph g;
  g.p = p;
  g.q = q;
  g.opts = opts;
  g.temporal = m.temporal_int();
  const double dx = opts.spacing;
  Vec rel = q - p;
  for (int i = 0; i < 3; ++i) {
    double zi = rel[i] / dx;
    g.zq[i] = std::llround(zi);
    if (std::fabs(zi - double(g.zq[i])) > 1e-6)
      throw GridMismatch("q - p is not representable on the grid");
  }
  g.layers = g.temporal[0] * g.zq[0] + g.temporal[1] * g.zq[1] +
             g.temporal[2] * g.zq[2];
  StencilData sd = build_stencil(m, g.temporal, dx, opts.margin, opts.stencil_k);
  g.stencil = sd.s;

  // EmptyStencil probe: some direction must be future-causal somewhere.
  Region region = make_region(m.temporal(), p, q, opts);
  bool any = false;
  for (int t = 0; t <= 16 && !any; ++t) {
    Vec x = region.center(double(t) / 16.0 * dx * double(std::max<std::int64_t>(g.layers, 1)));
    Form G = m.g_at(x);
    Vec o = m.orient(x);
    for (std::size_t i = 0; i < sd.s.size() && !any; ++i) {
      Vec d = sd.delta[i];
      if (G(d, d) <= opts.margin * sd.r2[i] && G(d, o) < 0.0) any = true;
    }
  }
  if (!any)
    throw EmptyStencil("no stencil direction is future-causal in the region");
  return g;
}

std::int64_t CausalGraph::count_nodes(const MetricField& m) const {
  Region region = make_region(m.temporal(), p, q, opts);
  LayerBasis lb = layer_basis(temporal);
  const double dx = opts.spacing;
  double slope = region.min_temporal_slope();
  double cnorm = norm(region.theta);
  double B = region.radius * (1.0 + (slope > 0 ? cnorm / slope : 0.0)) + 2 * dx;
  double ra = std::sqrt(double(lb.inv_rows[1][0] * lb.inv_rows[1][0] +
                               lb.inv_rows[1][1] * lb.inv_rows[1][1] +
                               lb.inv_rows[1][2] * lb.inv_rows[1][2]));
  double rb = std::sqrt(double(lb.inv_rows[2][0] * lb.inv_rows[2][0] +
                               lb.inv_rows[2][1] * lb.inv_rows[2][1] +
                               lb.inv_rows[2][2] * lb.inv_rows[2][2]));
  std::int64_t ha = std::int64_t(std::ceil(ra * B / dx)) + 1;
  std::int64_t hb = m.dim() == 3 ? std::int64_t(std::ceil(rb * B / dx)) + 1 : 0;
  std::int64_t count = 0;
  for (std::int64_t l = 0; l <= layers; ++l) {
    Vec xc = region.center(l * dx);
    IVec zc;
    for (int i = 0; i < 3; ++i) zc[i] = std::llround((xc[i] - p[i]) / dx);
    std::int64_t l0, a0, b0;
    lb.decompose(zc, l0, a0, b0);
    for (std::int64_t a = a0 - ha; a <= a0 + ha; ++a)
      for (std::int64_t b = b0 - hb; b <= b0 + hb; ++b) {
        IVec z = lb.compose(l, a, b);
        Vec x = {p[0] + dx * z[0], p[1] + dx * z[1], p[2] + dx * z[2]};
        if (region.contains(x, l * dx)) ++count;
      }
  }
  return count;
}

// ----------------------------------------------------------- time_separation

ReachResult time_separation(const MetricField& m, const Vec& p, const Vec& q,
                            const ReachOptions& opts) {
  ReachResult res;
  const double dx = opts.spacing;
  IVec c = m.temporal_int();
  IVec zq;
  Vec rel = q - p;
  for (int i = 0; i < 3; ++i) {
    double zi = rel[i] / dx;
    zq[i] = std::llround(zi);
    if (std::fabs(zi - double(zq[i])) > 1e-6)
      throw GridMismatch("q - p is not representable on the grid");
  }
  std::int64_t Lq = c[0] * zq[0] + c[1] * zq[1] + c[2] * zq[2];
  if (zq[0] == 0 && zq[1] == 0 && zq[2] == 0) {
    res.reachable = true;
    res.d = 0.0;
    res.path.v = {p};
    res.path.param = {0.0};
    return res;
  }
  if (Lq <= 0) return res;  // temporal function must increase: unreachable

  StencilData sd = build_stencil(m, c, dx, opts.margin, opts.stencil_k);
  Region region = make_region(m.temporal(), p, q, opts);
  LayerBasis lb = layer_basis(c);

  std::int64_t lqq, aq, bq;
  lb.decompose(zq, lqq, aq, bq);

  std::vector<std::unique_ptr<Layer>> layers(std::size_t(Lq) + 1);
  auto layer_at = [&](std::int64_t l) -> Layer& {
    auto& ptr = layers[std::size_t(l)];
    if (!ptr) ptr = std::make_unique<Layer>();
    return *ptr;
  };

  // Source.
  {
    Layer& L0 = layer_at(0);
    L0.has_base = true;
    L0.base_a = 0;
    L0.base_b = 0;
    bool created;
    std::uint32_t idx = L0.map.find_or_insert(pack_key(0, 0, L0), created);
    L0.map.dist[idx] = 0.0;
    L0.map.pred[idx] = -1;
  }

  const bool kinky = m.has_kink();
  const int nprof = m.profile_count();
  std::int64_t total_nodes = 0, total_edges = 0;

  std::vector<std::uint32_t> order;
  for (std::int64_t l = 0; l < Lq; ++l) {
    Layer* Lp = layers[std::size_t(l)].get();
    if (!Lp || Lp->map.keys.empty()) continue;
    Layer& L = *Lp;
    order.resize(L.map.keys.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) {
      return L.map.keys[x] < L.map.keys[y];
    });
    total_nodes += std::int64_t(order.size());
    if (total_nodes > opts.max_nodes)
      throw InvalidArgument("reach: node budget exceeded");

    for (std::uint32_t oi : order) {
      const double du = L.map.dist[oi];
      std::int64_t a, b;
      unpack_key(L.map.keys[oi], L, a, b);
      IVec z = lb.compose(l, a, b);
      Vec pos = {p[0] + dx * z[0], p[1] + dx * z[1], p[2] + dx * z[2]};

      const bool fast = m.constant_radius(pos) >= sd.max_halflen;
      const std::size_t nlist = fast ? sd.base_list.size() : sd.s.size();
      for (std::size_t ii = 0; ii < nlist; ++ii) {
        const int si = fast ? sd.base_list[ii] : int(ii);
        const std::int64_t lv = l + sd.dl[si];
        if (lv > Lq) continue;
        ++total_edges;
        const Vec& d = sd.delta[si];
        Vec posv = pos + d;
        if (!region.contains(posv, lv * dx)) continue;

        double weight;
        if (fast) {
          weight = sd.base_weight[si];
        } else {
          Vec mid = pos + 0.5 * d;
          double qv, ov;
          if (sd.profiles) {
            int id;
            double psiv;
            m.profile_at(mid, id, psiv);
            if (id < 0) {
              qv = sd.base_q[si];
              ov = sd.base_o[si];
            } else {
              qv = sd.base_q[si] + psiv * (sd.prof_q[id][si] - sd.base_q[si]);
              ov = sd.base_o[si] + psiv * (sd.prof_o[id][si] - sd.base_o[si]);
            }
          } else {
            Form G = m.g_at(mid);
            qv = G(d, d);
            ov = G(d, m.orient(mid));
          }
          if (qv > opts.margin * sd.r2[si] || ov >= 0.0) continue;
          weight = std::sqrt(std::fabs(qv));
          if (kinky && sd.profiles &&
              m.near_kink(mid, 0.5 * std::sqrt(sd.r2[si]))) {
            // Simpson upgrade across the tube-boundary kink.
            auto qval = [&](const Vec& x) {
              int id;
              double psiv;
              m.profile_at(x, id, psiv);
              double v = id < 0 ? sd.base_q[si]
                                : sd.base_q[si] +
                                      psiv * (sd.prof_q[id][si] - sd.base_q[si]);
              return std::sqrt(std::fabs(std::min(v, 0.0)));
            };
            weight = (qval(pos) + 4.0 * weight + qval(posv)) / 6.0;
          }
        }

        std::int64_t av = a + lb.inv_rows[1][0] * sd.s[si][0] +
                          lb.inv_rows[1][1] * sd.s[si][1] +
                          lb.inv_rows[1][2] * sd.s[si][2];
        std::int64_t bv = b + lb.inv_rows[2][0] * sd.s[si][0] +
                          lb.inv_rows[2][1] * sd.s[si][1] +
                          lb.inv_rows[2][2] * sd.s[si][2];
        // (l, a, b) of the target: a/b computed incrementally — the decomposition
        // is linear, and s contributes dl to l.
        Layer& LT = layer_at(lv);
        if (!LT.has_base) {
          LT.has_base = true;
          LT.base_a = av;
          LT.base_b = bv;
        }
        bool created;
        std::uint32_t idx = LT.map.find_or_insert(pack_key(av, bv, LT), created);
        double nd = du + weight;
        if (created || nd > LT.map.dist[idx]) {
          LT.map.dist[idx] = nd;
          LT.map.pred[idx] = si;
        }
      }
    }

    // Layer l is final; keep only what path reconstruction needs.
    if (opts.want_path) {
      std::vector<std::uint32_t> idx(L.map.keys.size());
      std::iota(idx.begin(), idx.end(), 0u);
      std::sort(idx.begin(), idx.end(), [&](std::uint32_t x, std::uint32_t y) {
        return L.map.keys[x] < L.map.keys[y];
      });
      L.ckeys.reserve(idx.size());
      L.cpred.reserve(idx.size());
      for (std::uint32_t i : idx) {
        L.ckeys.push_back(L.map.keys[i]);
        L.cpred.push_back(L.map.pred[i]);
      }
      L.compressed = true;
      L.map = NodeMap();
    } else {
      layers[std::size_t(l)].reset();
    }
  }

  res.nodes_expanded = total_nodes;
  res.edges_relaxed = total_edges;

  Layer* Lq_layer = layers[std::size_t(Lq)].get();
  if (!Lq_layer || !Lq_layer->has_base) return res;
  std::int64_t qidx = Lq_layer->map.find(pack_key(aq, bq, *Lq_layer));
  if (qidx < 0) return res;
  res.reachable = true;
  res.d = Lq_layer->map.dist[std::size_t(qidx)];

  if (!opts.want_path) return res;

  // Backtrack.
  std::vector<Vec> verts;
  std::int64_t l = Lq, a = aq, b = bq;
  std::int32_t pred = Lq_layer->map.pred[std::size_t(qidx)];
  for (;;) {
    IVec z = lb.compose(l, a, b);
    verts.push_back({p[0] + dx * z[0], p[1] + dx * z[1], p[2] + dx * z[2]});
    if (pred == -1) break;
    if (pred < 0) throw InvalidArgument("reach: broken predecessor chain");
    const IVec& s = sd.s[std::size_t(pred)];
    l -= sd.dl[std::size_t(pred)];
    a -= lb.inv_rows[1][0] * s[0] + lb.inv_rows[1][1] * s[1] + lb.inv_rows[1][2] * s[2];
    b -= lb.inv_rows[2][0] * s[0] + lb.inv_rows[2][1] * s[1] + lb.inv_rows[2][2] * s[2];
    Layer& LL = *layers[std::size_t(l)];
    std::uint32_t key = pack_key(a, b, LL);
    auto it = std::lower_bound(LL.ckeys.begin(), LL.ckeys.end(), key);
    if (it == LL.ckeys.end() || *it != key)
      throw InvalidArgument("reach: predecessor not found during backtrack");
    pred = LL.cpred[std::size_t(it - LL.ckeys.begin())];
  }
  std::reverse(verts.begin(), verts.end());

  if (verts.size() <= 20000) {
    res.path = make_path(m, std::move(verts));
  } else {
    res.path.v = std::move(verts);
    res.path.param.resize(res.path.v.size());
    double s = 0.0;
    res.path.param[0] = 0.0;
    for (std::size_t i = 0; i + 1 < res.path.v.size(); ++i) {
      s += norm(res.path.v[i + 1] - res.path.v[i]);
      res.path.param[i + 1] = s;
    }
    res.path.LR = s;
    res.path.Lg = res.d;
  }
  return res;
}

// ----------------------------------------------------------- refine_maximizer

RefineResult refine_maximizer(const MetricField& m, const CausalPath& path,
                              int max_sweeps, double step) {
  RefineResult rr;
  rr.path = path;
  if (path.size() < 3) return rr;
  std::vector<Vec>& v = rr.path.v;
  const int dim = m.dim();

  auto local_len = [&](const Vec& a, const Vec& x, const Vec& b) {
    return segment_lorentz_length(m, a, x) + segment_lorentz_length(m, x, b);
  };
  auto local_causal = [&](const Vec& a, const Vec& x, const Vec& b) {
    return segment_causal(m, a, x, kPermissiveMargin) &&
           segment_causal(m, x, b, kPermissiveMargin);
  };

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double improvement = 0.0;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      const Vec a = v[i - 1], b = v[i + 1];
      double best = local_len(a, v[i], b);
      Vec best_x = v[i];
      for (int axis = 0; axis < dim; ++axis) {
        for (double sgn : {1.0, -1.0}) {
          for (double h = step; h >= step / 1024.0; h *= 0.5) {
            Vec x = v[i];
            x[axis] += sgn * h;
            if (!local_causal(a, x, b)) continue;
            double len = local_len(a, x, b);
            if (len > best + 1e-15) {
              best = len;
              best_x = x;
            }
          }
        }
      }
      improvement += best - local_len(a, v[i], b);
      v[i] = best_x;
    }
    rr.sweeps = sweep + 1;
    if (improvement < 1e-12) {
      rr.stalled = true;
      break;
    }
  }
  // Recompute cached quantities.
  rr.path = make_path(m, std::move(v));
  return rr;
}

// ------------------------------------------------------------------- probers

Prober make_diamond_prober(const MetricField& m, ReachOptions base) {
  base.mode = ReachOptions::Mode::Diamond;
  return [&m, base](const Vec& p, const Vec& q, bool want_path) {
    ReachOptions o = base;
    o.want_path = want_path;
    // Snap the target displacement to the grid; probers accept arbitrary
    // cover points.
    Vec qs = p;
    for (int i = 0; i < 3; ++i)
      qs[i] += o.spacing * std::round((q[i] - p[i]) / o.spacing);
    return time_separation(m, p, qs, o);
  };
}

// ------------------------------------------------------------- fit_constants

namespace {

// Distance from u to the polyhedral cone described by facet normals
// (inside: n.u >= 0 for all normals). Approximated by the largest violation.
double dist_outside_cone(const Vec& u, const std::vector<Vec>& normals) {
  double worst = 0.0;
  for (const Vec& n : normals)
    worst = std::max(worst, -dot(normalized(n), u));
  return worst;
}

double depth_inside_cone(const Vec& u, const std::vector<Vec>& normals) {
  double depth = 1e300;
  for (const Vec& n : normals) depth = std::min(depth, dot(normalized(n), u));
  return std::max(depth, 0.0);
}

}  // namespace

DiagnosticsConstants fit_constants(const MetricField& m, int samples,
                                   std::uint64_t seed, const Prober& prober,
                                   const std::vector<Vec>* cone_normals) {
  DiagnosticsConstants dc;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const int dim = m.dim();

  struct Probe {
    Vec p, q;
    double d;
    bool reachable;
    CausalPath path;
  };
  std::vector<Probe> probes;

  std::vector<Vec> bases = m.suggested_bases();
  for (int s = 0; s < samples; ++s) {
    Probe pr;
    pr.p = bases[std::size_t(s) % bases.size()];
    // Displacement biased around the orientation direction, plus occasional
    // wild directions to exercise unreachability.
    Vec o = normalized(m.orient(pr.p));
    Vec r = {uni(rng) * 2 - 1, uni(rng) * 2 - 1, dim == 3 ? uni(rng) * 2 - 1 : 0.0};
    double scale = 1.0 + 3.0 * uni(rng);
    double mix = (s % 4 == 0) ? 1.2 : 0.45 * uni(rng);
    Vec h = scale * (o + mix * r);
    ReachResult rr = prober(pr.p, pr.q = pr.p + h, s % 3 == 0);
    pr.d = rr.d;
    pr.reachable = rr.reachable;
    pr.path = std::move(rr.path);
    probes.push_back(std::move(pr));
  }
  dc.samples = int(probes.size());

  for (const Probe& pr : probes) {
    Vec disp = pr.q - pr.p;
    double nd = norm(disp);
    if (pr.reachable && nd > 1e-9) {
      if (!pr.path.empty()) {
        double lr = riemann_length(pr.path);
        dc.C_causal = std::max(dc.C_causal, lr / nd);
      }
      if (cone_normals)
        dc.err_cone = std::max(dc.err_cone,
                               dist_outside_cone(normalized(disp), *cone_normals));
    }
    if (!pr.reachable && cone_normals)
      dc.K_cone = std::max(dc.K_cone, depth_inside_cone(normalized(disp), *cone_normals));
    // Riemannian distance on the flat cover is the Euclidean norm exactly.
    dc.std_burago = std::max(dc.std_burago, std::fabs(nd - norm(disp)));
  }

  // Cbar from an N-ladder along reachable directions.
  int used = 0;
  for (const Probe& pr : probes) {
    if (!pr.reachable || pr.d <= 0 || used >= 4) continue;
    ++used;
    Vec h = pr.q - pr.p;
    std::vector<int> ladder = {1, 2, 3};
    std::vector<double> dn(ladder.size(), 0.0);
    for (std::size_t i = 0; i < ladder.size(); ++i) {
      ReachResult rr = prober(pr.p, pr.p + double(ladder[i]) * h, false);
      dn[i] = rr.d;
    }
    double lhat = dn.back() / ladder.back();
    for (std::size_t i = 0; i < ladder.size(); ++i)
      dc.Cbar = std::max(dc.Cbar, std::fabs(dn[i] - ladder[i] * lhat));
  }

  // Coarse-Lipschitz fit and reverse-triangle slack.
  int lc_used = 0;
  for (const Probe& pr : probes) {
    if (!pr.reachable || pr.path.empty() || pr.path.size() < 3 || lc_used >= 6)
      continue;
    ++lc_used;
    // Reverse triangle through a midpoint vertex of the argmax.
    const Vec r = pr.path.v[pr.path.size() / 2];
    double d1 = prober(pr.p, r, false).d;
    double d2 = prober(r, pr.q, false).d;
    dc.reverse_triangle_worst =
        std::min(dc.reverse_triangle_worst, pr.d - (d1 + d2));
    // Perturbed-endpoint Lipschitz sample.
    Vec dp = {0.25 * (uni(rng) - 0.5), 0.25 * (uni(rng) - 0.5),
              dim == 3 ? 0.25 * (uni(rng) - 0.5) : 0.0};
    Vec p2 = pr.p + dp, q2 = pr.q + dp;  // same displacement, shifted base
    ReachResult rr = prober(p2, q2, false);
    double denom = norm(p2 - pr.p) + norm(q2 - pr.q) + 1.0;
    dc.Lc = std::max(dc.Lc, std::fabs(rr.d - pr.d) / denom);
  }
  return dc;
}

}  // namespace lor
