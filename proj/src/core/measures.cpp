#include "measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "errors.hpp"

namespace lor {

namespace {

void subdivide(const Vec& a, const Vec& b, const Vec& c, int depth,
               std::vector<Vec>& centers) {
  if (depth == 0) {
    centers.push_back(normalized(a + b + c));
    return;
  }
  Vec ab = normalized(0.5 * (a + b));
  Vec bc = normalized(0.5 * (b + c));
  Vec ca = normalized(0.5 * (c + a));
  subdivide(a, ab, ca, depth - 1, centers);
  subdivide(ab, b, bc, depth - 1, centers);
  subdivide(ca, bc, c, depth - 1, centers);
  subdivide(ab, bc, ca, depth - 1, centers);
}

std::vector<Vec> icosphere_centers() {
  const double phi = 0.5 * (1.0 + std::sqrt(5.0));
  std::vector<Vec> v;
  for (double s0 : {-1.0, 1.0})
    for (double s1 : {-1.0, 1.0}) {
      v.push_back(normalized(vec(s0, s1 * phi, 0)));
      v.push_back(normalized(vec(0, s0, s1 * phi)));
      v.push_back(normalized(vec(s1 * phi, 0, s0)));
    }
  std::sort(v.begin(), v.end(), [](const Vec& a, const Vec& b) {
    for (int i = 0; i < 3; ++i) {
      if (a[i] < b[i] - 1e-12) return true;
      if (a[i] > b[i] + 1e-12) return false;
    }
    return false;
  });
  // Faces = triples of mutually nearest-neighbor vertices.
  double edge = 1e300;
  for (std::size_t i = 1; i < v.size(); ++i)
    edge = std::min(edge, norm(v[i] - v[0]));
  auto adj = [&](const Vec& a, const Vec& b) {
    return std::fabs(norm(a - b) - edge) < 1e-9;
  };
  std::vector<Vec> centers;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j)
      for (std::size_t k = j + 1; k < v.size(); ++k)
        if (adj(v[i], v[j]) && adj(v[j], v[k]) && adj(v[i], v[k]))
          subdivide(v[i], v[j], v[k], 2, centers);  // 20 faces x 16 = 320
  return centers;
}

std::int64_t position_cell(const Vec& p, int dim, int grid) {
  std::int64_t idx = 0;
  for (int i = dim - 1; i >= 0; --i) {
    double f = p[i] - std::floor(p[i]);
    int c = std::min(grid - 1, int(f * grid));
    idx = idx * grid + c;
  }
  return idx;
}

int dir_bin_count(int dim, const Cellization& c) {
  return dim == 2 ? c.dir_bins_2d : c.dir_bins_3d;
}

}  // namespace

const std::vector<Vec>& direction_bin_centers(int dim, const Cellization& c) {
  if (dim == 2) {
    static std::vector<Vec> circle;
    static int cached = 0;
    if (cached != c.dir_bins_2d) {
      circle.clear();
      for (int i = 0; i < c.dir_bins_2d; ++i) {
        double phi = 2.0 * M_PI * (i + 0.5) / c.dir_bins_2d;
        circle.push_back(vec(std::cos(phi), std::sin(phi)));
      }
      cached = c.dir_bins_2d;
    }
    return circle;
  }
  static const std::vector<Vec> sphere = icosphere_centers();
  return sphere;
}

int direction_bin(const Vec& u, int dim, const Cellization& c) {
  if (dim == 2) {
    double phi = std::atan2(u[1], u[0]);
    double t = phi / (2.0 * M_PI) + 0.5;
    int b = int(t * c.dir_bins_2d) % c.dir_bins_2d;
    return b < 0 ? b + c.dir_bins_2d : b;
  }
  const std::vector<Vec>& centers = direction_bin_centers(3, c);
  int best = 0;
  double bd = -2.0;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    double d = dot(u, centers[i]);
    if (d > bd) {
      bd = d;
      best = int(i);
    }
  }
  return best;
}

OccupationMeasure occupation_measure(const CausalPath& path,
                                     const Cellization& c, int dim) {
  if (path.size() < 2 || path.LR <= 0.0)
    throw EmptyPath("occupation measure of an empty path");
  OccupationMeasure mu;
  mu.dim = dim;
  mu.cells = c;
  mu.window = path.param.back();
  mu.total_mass = 1.0;
  const int B = dir_bin_count(dim, c);
  const double ds = std::min(0.02, 0.5 / c.pos_grid);
  for (std::size_t i = 0; i + 1 < path.v.size(); ++i) {
    Vec d = path.v[i + 1] - path.v[i];
    double len = norm(d);
    if (len < 1e-15) continue;
    Vec u = (1.0 / len) * d;
    int bin = direction_bin(u, dim, c);
    int nsub = std::max(1, int(std::ceil(len / ds)));
    double w = len / nsub / path.LR;
    for (int k = 0; k < nsub; ++k) {
      Vec mid = path.v[i] + ((k + 0.5) / nsub) * d;
      Vec wrapped = mid;
      for (int a = 0; a < dim; ++a) wrapped[a] = mid[a] - std::floor(mid[a]);
      std::int64_t key = position_cell(mid, dim, c.pos_grid) * B + bin;
      MeasureCell& cell = mu.hist[key];
      cell.weight += w;
      cell.pos_sum = cell.pos_sum + w * wrapped;
      cell.dir_sum = cell.dir_sum + w * u;
    }
  }
  return mu;
}

OccupationMeasure mix(
    const std::vector<std::pair<double, OccupationMeasure>>& parts) {
  if (parts.empty()) throw EmptyPath("mixture of no measures");
  OccupationMeasure out;
  out.dim = parts.front().second.dim;
  out.cells = parts.front().second.cells;
  out.window = 1e300;
  out.total_mass = 0.0;
  for (const auto& [alpha, mu] : parts) {
    out.window = std::min(out.window, mu.window);
    out.total_mass += alpha * mu.total_mass;
    for (const auto& [key, cell] : mu.hist) {
      MeasureCell& o = out.hist[key];
      o.weight += alpha * cell.weight;
      o.pos_sum = o.pos_sum + alpha * cell.pos_sum;
      o.dir_sum = o.dir_sum + alpha * cell.dir_sum;
    }
  }
  return out;
}

Vec rotation_class(const OccupationMeasure& mu) {
  Vec r = vec(0, 0, 0);
  for (const auto& [key, cell] : mu.hist) r = r + cell.dir_sum;
  return r;
}

double average_length(const MetricField& m, const OccupationMeasure& mu) {
  double L = 0.0;
  for (const auto& [key, cell] : mu.hist) {
    Vec x = cell.position();
    Vec u = cell.direction();
    double q = m.g_at(x)(u, u);
    if (q > 1e-6)
      throw NonCausalCell("measure cell with spacelike direction");
    L += cell.weight * std::sqrt(std::fabs(std::min(0.0, q)));
  }
  return L;
}

double invariance_defect(const OccupationMeasure& mu,
                         const std::function<double(const Vec&)>& f) {
  const double h = 1e-4;
  double defect = 0.0;
  for (const auto& [key, cell] : mu.hist) {
    Vec x = cell.position();
    Vec u = cell.direction();
    defect += cell.weight * (f(x + h * u) - f(x - h * u)) / (2.0 * h);
  }
  return defect;
}

MaximalMeasureResult find_maximal_measure(const MetricField& m, const Vec& h,
                                          int N, const Prober& prober,
                                          const Cellization& c,
                                          const Vec& base) {
  std::vector<Vec> bases = {base};
  for (const Vec& b : m.suggested_bases()) {
    bool dup = false;
    for (const Vec& x : bases)
      if (norm(x - b) < 1e-12) dup = true;
    if (!dup) bases.push_back(b);
  }
  ReachResult rr;
  for (const Vec& b : bases) {
    rr = prober(b, b + double(N) * h, true);
    if (rr.reachable && !rr.path.empty()) break;
  }
  if (!rr.reachable || rr.path.empty())
    throw OutsideCone("homology direction not reachable for measure search");
  MaximalMeasureResult res;
  res.path = rr.path;
  res.mu = occupation_measure(rr.path, c, m.dim());
  // Rescale mass so rho(mu) equals the per-N displacement (= h up to target
  // snapping): probability measure has rho = (q - p)/window.
  double scale = res.mu.window / double(N);
  for (auto& [key, cell] : res.mu.hist) {
    cell.weight *= scale;
    cell.pos_sum = scale * cell.pos_sum;
    cell.dir_sum = scale * cell.dir_sum;
  }
  res.mu.total_mass = scale;
  res.L = average_length(m, res.mu);
  res.lhat = rr.d / N;
  res.gap = res.lhat - res.L;
  return res;
}

bool disjoint_support(const OccupationMeasure& a, const OccupationMeasure& b) {
  const OccupationMeasure& small = a.hist.size() <= b.hist.size() ? a : b;
  const OccupationMeasure& big = a.hist.size() <= b.hist.size() ? b : a;
  for (const auto& [key, cell] : small.hist) {
    if (cell.weight <= 1e-12) continue;
    auto it = big.hist.find(key);
    if (it != big.hist.end() && it->second.weight > 1e-12) return false;
  }
  return true;
}

std::string OccupationMeasure::to_csv() const {
  std::string out = "cell,p1,p2,p3,d1,d2,d3,weight\n";
  char buf[320];
  for (const auto& [key, cell] : hist) {
    Vec p = cell.position();
    Vec u = cell.direction();
    std::snprintf(buf, sizeof buf,
                  "%lld,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                  (long long)key, p[0], p[1], p[2], u[0], u[1], u[2],
                  cell.weight);
    out += buf;
  }
  return out;
}

}  // namespace lor
