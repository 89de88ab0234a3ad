#include "stable.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "errors.hpp"

namespace lor {

namespace {

// Euclidean projection of x onto the probability simplex over the first n
// coordinates (remaining coordinates forced to 0).
Vec project_simplex(const Vec& x, int n) {
  std::array<double, 3> u{};
  for (int i = 0; i < n; ++i) u[i] = x[i];
  std::array<double, 3> s = u;
  std::sort(s.begin(), s.begin() + n, std::greater<>());
  double css = 0.0, theta = 0.0;
  int rho = 0;
  for (int i = 0; i < n; ++i) {
    css += s[i];
    double t = (css - 1.0) / (i + 1);
    if (s[i] - t > 0) {
      rho = i + 1;
      theta = t;
    }
  }
  (void)rho;
  Vec out = vec(0, 0, 0);
  for (int i = 0; i < n; ++i) out[i] = std::max(0.0, u[i] - theta);
  return out;
}

std::vector<Vec> unit_directions(int n, int count) {
  std::vector<Vec> dirs;
  dirs.reserve(std::size_t(count));
  if (n == 2) {
    for (int i = 0; i < count; ++i) {
      double phi = 2.0 * M_PI * i / count;
      dirs.push_back(vec(std::cos(phi), std::sin(phi)));
    }
  } else {
    // Fibonacci sphere: deterministic quasi-uniform sample.
    const double ga = M_PI * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      double z = 1.0 - 2.0 * (i + 0.5) / count;
      double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      double phi = ga * i;
      dirs.push_back(vec(r * std::cos(phi), r * std::sin(phi), z));
    }
  }
  return dirs;
}

}  // namespace

Vec rotation_vector(const CausalPath& path) {
  if (path.size() < 2 || path.param.back() <= 0.0)
    throw ZeroLengthPath("rotation vector of a zero-length path");
  return (1.0 / path.param.back()) * (path.v.back() - path.v.front());
}

ConeEstimate estimate_cone(const MetricField& m, int direction_samples,
                           double R, const Prober& prober) {
  ConeEstimate ce;
  ce.probe_radius = R;
  ce.sampled_dirs = unit_directions(m.dim(), direction_samples);
  std::vector<Vec> bases = {vec(0, 0, 0)};
  for (const Vec& b : m.suggested_bases()) {
    bool dup = false;
    for (const Vec& x : bases)
      if (norm(x - b) < 1e-12) dup = true;
    if (!dup) bases.push_back(b);
  }
  // Cone membership is causal reachability (q in J+(p)), so lightlike chains
  // with d = 0 count; probers for cone estimation should use the permissive
  // causality margin.
  for (const Vec& u : ce.sampled_dirs) {
    for (const Vec& base : bases) {
      ReachResult rr = prober(base, base + R * u, false);
      if (rr.reachable) {
        ce.reachable_dirs.push_back(u);
        break;
      }
    }
  }
  // 0 is excluded from the hull iff some covector is positive on every
  // reachable direction; search for one by perceptron iteration.
  if (!ce.reachable_dirs.empty()) {
    Vec w = vec(0, 0, 0);
    for (const Vec& d : ce.reachable_dirs) w = w + d;
    for (int it = 0; it < 2000; ++it) {
      bool all_pos = true;
      for (const Vec& d : ce.reachable_dirs) {
        if (dot(w, d) <= 1e-9 * norm(w)) {
          w = w + d;
          all_pos = false;
        }
      }
      if (all_pos) {
        ce.zero_excluded = true;
        break;
      }
    }
  }
  return ce;
}

double cone_hausdorff_simplex(const std::vector<Vec>& dirs, int n) {
  std::vector<Vec> pts;
  for (const Vec& d : dirs) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += d[i];
    if (s > 1e-9) pts.push_back((1.0 / s) * d);
  }
  if (pts.empty()) return 1e300;
  double fwd = 0.0;  // sampled cone directions vs the simplex
  for (const Vec& p : pts) fwd = std::max(fwd, norm(p - project_simplex(p, n)));
  double bwd = 0.0;  // simplex coverage by sampled directions
  const int grid = 50;
  auto nearest = [&](const Vec& s) {
    double best = 1e300;
    for (const Vec& p : pts) best = std::min(best, norm(p - s));
    return best;
  };
  if (n == 2) {
    for (int i = 0; i <= grid; ++i) {
      double a = double(i) / grid;
      bwd = std::max(bwd, nearest(vec(a, 1.0 - a)));
    }
  } else {
    for (int i = 0; i <= grid; ++i)
      for (int j = 0; i + j <= grid; ++j) {
        double a = double(i) / grid, b = double(j) / grid;
        bwd = std::max(bwd, nearest(vec(a, b, 1.0 - a - b)));
      }
  }
  return std::max(fwd, bwd);
}

StableResult stable_time_separation(const MetricField& m, const Vec& h,
                                    const std::vector<int>& schedule,
                                    const Prober& prober, double Cbar,
                                    const Vec& base) {
  StableResult sr;
  if (schedule.empty()) return sr;
  // Probe from the preferred base; when a direction is unreachable there
  // (e.g. Hedlund e2 from a point of l1), fall back to the metric's
  // structured bases — the stable limit is base-independent.
  std::vector<Vec> bases = {base};
  for (const Vec& b : m.suggested_bases()) {
    bool dup = false;
    for (const Vec& x : bases)
      if (norm(x - b) < 1e-12) dup = true;
    if (!dup) bases.push_back(b);
  }
  Vec b0 = bases.front();
  for (const Vec& b : bases) {
    ReachResult rr = prober(b, b + double(schedule.front()) * h, false);
    if (rr.reachable && rr.d > 0.0) {
      b0 = b;
      break;
    }
  }
  double prev_d = 0.0;
  int prev_N = 0;
  for (int N : schedule) {
    ReachResult rr = prober(b0, b0 + double(N) * h, false);
    if (!rr.reachable || rr.d <= 0.0) continue;
    if (prev_N > 0 && N % prev_N == 0)
      if (rr.d < double(N / prev_N) * prev_d - 1e-6) sr.monotone_ok = false;
    prev_d = rr.d;
    prev_N = N;
    sr.lhat = rr.d / N;
    sr.N_used = N;
    sr.in_cone = true;
  }
  if (sr.in_cone) sr.err = Cbar / sr.N_used;
  return sr;
}

StableSepTable build_stable_table(const MetricField& m,
                                  const std::vector<Vec>& directions,
                                  const std::vector<int>& schedule,
                                  const Prober& prober, double Cbar) {
  StableSepTable table;
  for (const Vec& d : directions) {
    StableEntry e;
    e.h = normalized(d);
    StableResult sr = stable_time_separation(m, e.h, schedule, prober, Cbar);
    e.lhat = sr.lhat;
    e.err = sr.err;
    e.N_used = sr.N_used;
    // Reachable at the final scheduled N: interior; never reachable: outside;
    // reachable only at some smaller N: treated as boundary (the limsup
    // convention keeps the largest interior estimate).
    if (!sr.in_cone)
      e.flag = -1;
    else
      e.flag = sr.N_used == schedule.back() ? 1 : 0;
    table.entries.push_back(e);
  }
  return table;
}

std::string StableSepTable::to_csv() const {
  std::string out = "h1,h2,h3,lhat,err,N,flag\n";
  char buf[256];
  for (const StableEntry& e : entries) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g,%d,%d\n",
                  e.h[0], e.h[1], e.h[2], e.lhat, e.err, e.N_used, e.flag);
    out += buf;
  }
  return out;
}

T17Report check_T17_properties(const MetricField& m, const StableSepTable& table,
                               const std::vector<int>& schedule,
                               const Prober& prober, double Cbar, double Lc,
                               int pairs, std::uint64_t seed) {
  T17Report rep;
  std::vector<const StableEntry*> in_cone;
  for (const StableEntry& e : table.entries)
    if (e.flag == 1 && e.lhat > 0.0) in_cone.push_back(&e);
  if (in_cone.size() < 2) return rep;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, in_cone.size() - 1);
  rep.worst_superadd = 1e300;
  rep.worst_concavity = 1e300;
  rep.coarse_lipschitz_worst = 1e300;
  for (int k = 0; k < pairs; ++k) {
    const StableEntry& a = *in_cone[pick(rng)];
    const StableEntry& b = *in_cone[pick(rng)];
    Vec hc = a.h + b.h;
    StableResult rc = stable_time_separation(m, hc, schedule, prober, Cbar);
    if (rc.in_cone) {
      // Superadditivity: l(h+h') >= l(h) + l(h') - combined error.
      double margin = rc.lhat - a.lhat - b.lhat + a.err + b.err + rc.err;
      rep.worst_superadd = std::min(rep.worst_superadd, margin);
      if (margin < 0) ++rep.violations;
      // Concavity at the midpoint via positive homogeneity.
      StableResult rm =
          stable_time_separation(m, 0.5 * hc, schedule, prober, Cbar);
      if (rm.in_cone) {
        double cmargin = rm.lhat - 0.5 * (a.lhat + b.lhat) +
                         0.5 * (a.err + b.err) + rm.err;
        rep.worst_concavity = std::min(rep.worst_concavity, cmargin);
        if (cmargin < 0) ++rep.violations;
      }
      ++rep.pairs_checked;
    }
    // Coarse Lipschitz (T16 form) on a shifted probe of direction a.
    int N = schedule.back();
    Vec y = double(N) * a.h;
    Vec shift = 0.5 * b.h;
    ReachResult r0 = prober(vec(0, 0, 0), y, false);
    ReachResult r1 = prober(shift, y + shift, false);
    if (r0.reachable && r1.reachable) {
      double lhs = std::fabs(r0.d - r1.d);
      double rhs = Lc * (2.0 * norm(shift) + 1.0);
      rep.coarse_lipschitz_worst =
          std::min(rep.coarse_lipschitz_worst, rhs - lhs);
      if (rhs < lhs) ++rep.violations;
    }
  }
  rep.pass = rep.violations == 0;
  return rep;
}

double dual_stable(const StableSepTable& table, const Vec& alpha) {
  double best = 1e300;
  for (const StableEntry& e : table.entries) {
    if (e.flag < 0) continue;
    double a = dot(alpha, e.h);
    if (a < -1e-9)
      throw NotInDualCone("alpha is negative on a stable-cone sample");
    if (e.flag == 1 && e.lhat > 1e-9) best = std::min(best, a / e.lhat);
  }
  return best;
}

}  // namespace lor
