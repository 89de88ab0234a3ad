#include "path.hpp"

#include <cmath>
#include <sstream>

#include "errors.hpp"

namespace lor {

bool segment_causal(const MetricField& m, const Vec& a, const Vec& b,
                    double margin) {
  Vec d = b - a;
  Vec mid = a + 0.5 * d;
  Form G = m.g_at(mid);
  double r2 = m.gR_at(mid)(d, d);
  if (r2 < 1e-30) return true;  // zero segment
  if (G(d, d) > margin * r2) return false;
  return G(d, m.orient(mid)) < 0.0;
}

void validate_causal(const MetricField& m, const std::vector<Vec>& vertices,
                     double margin) {
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
    if (!segment_causal(m, vertices[i], vertices[i + 1], margin)) {
      std::ostringstream os;
      os << "segment " << i << " violates the causality margin";
      throw NonCausalSegment(os.str());
    }
  }
}

double segment_lorentz_length(const MetricField& m, const Vec& a, const Vec& b) {
  Vec d = b - a;
  double len = norm(d);
  if (len < 1e-300) return 0.0;
  auto integrate = [&](int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      Vec mid = a + ((i + 0.5) / n) * d;
      s += std::sqrt(std::fabs(m.g_at(mid)(d, d)));
    }
    return s / n;
  };
  // Richardson control: double the subdivision until stable.
  double prev = integrate(1);
  for (int n = 2; n <= 256; n *= 2) {
    double cur = integrate(n);
    if (std::fabs(cur - prev) <= 1e-11 * std::max(1.0, std::fabs(cur)))
      return cur;
    prev = cur;
  }
  return prev;
}

CausalPath make_path(const MetricField& m, std::vector<Vec> vertices,
                     double margin) {
  validate_causal(m, vertices, margin);
  CausalPath p;
  p.v = std::move(vertices);
  p.param.resize(p.v.size());
  double s = 0.0, lg = 0.0;
  if (!p.param.empty()) p.param[0] = 0.0;
  for (std::size_t i = 0; i + 1 < p.v.size(); ++i) {
    s += norm(p.v[i + 1] - p.v[i]);
    lg += segment_lorentz_length(m, p.v[i], p.v[i + 1]);
    p.param[i + 1] = s;
  }
  p.LR = s;
  p.Lg = lg;
  return p;
}

double lorentz_length(const MetricField& m, const CausalPath& path) {
  double lg = 0.0;
  for (std::size_t i = 0; i + 1 < path.v.size(); ++i)
    lg += segment_lorentz_length(m, path.v[i], path.v[i + 1]);
  return lg;
}

double riemann_length(const CausalPath& path) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < path.v.size(); ++i)
    s += norm(path.v[i + 1] - path.v[i]);
  return s;
}

CausalPath concatenate(const MetricField& m, const CausalPath& a,
                       const CausalPath& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (norm(a.v.back() - b.v.front()) > 1e-9)
    throw InvalidArgument("concatenate: endpoint mismatch");
  std::vector<Vec> verts = a.v;
  verts.insert(verts.end(), b.v.begin() + 1, b.v.end());
  return make_path(m, std::move(verts));
}

CausalPath resample_with_tangents(const MetricField& m, const CausalPath& path,
                                  double h) {
  std::vector<Vec> verts;
  for (std::size_t i = 0; i + 1 < path.v.size(); ++i) {
    Vec d = path.v[i + 1] - path.v[i];
    double len = norm(d);
    int n = std::max(1, int(std::ceil(len / h)));
    for (int k = 0; k < n; ++k) verts.push_back(path.v[i] + (double(k) / n) * d);
  }
  if (!path.v.empty()) verts.push_back(path.v.back());
  CausalPath r = make_path(m, std::move(verts));
  r.tangent.resize(r.v.size());
  for (std::size_t i = 0; i < r.v.size(); ++i) {
    Vec d;
    if (i + 1 < r.v.size())
      d = r.v[i + 1] - r.v[i];
    else if (i > 0)
      d = r.v[i] - r.v[i - 1];
    r.tangent[i] = normalized(d);
  }
  return r;
}

}  // namespace lor
