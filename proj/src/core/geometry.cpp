#include "geometry.hpp"

#include <algorithm>
#include <cstdlib>

#include "errors.hpp"

namespace lor {

double form_det(const Form& f) {
  const auto& m = f.m;
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Form form_inverse(const Form& f) {
  const auto& m = f.m;
  double det = form_det(f);
  double scale = 0.0;
  for (double x : m) scale = std::max(scale, std::fabs(x));
  if (std::fabs(det) < 1e-12 * scale * scale * scale || det == 0.0)
    throw SingularMetric("metric matrix numerically non-invertible");
  Form r;
  r.m[0] = (m[4] * m[8] - m[5] * m[7]) / det;
  r.m[1] = (m[2] * m[7] - m[1] * m[8]) / det;
  r.m[2] = (m[1] * m[5] - m[2] * m[4]) / det;
  r.m[3] = (m[5] * m[6] - m[3] * m[8]) / det;
  r.m[4] = (m[0] * m[8] - m[2] * m[6]) / det;
  r.m[5] = (m[2] * m[3] - m[0] * m[5]) / det;
  r.m[6] = (m[3] * m[7] - m[4] * m[6]) / det;
  r.m[7] = (m[1] * m[6] - m[0] * m[7]) / det;
  r.m[8] = (m[0] * m[4] - m[1] * m[3]) / det;
  return r;
}

void form_eigen_sym(const Form& f, std::array<double, 3>& eigenvalues,
                    std::array<Vec, 3>& eigenvectors) {
  // Cyclic Jacobi on a symmetric 3x3 matrix.
  double a[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a[i][j] = 0.5 * (f.at(i, j) + f.at(j, i));
  double v[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = std::fabs(a[0][1]) + std::fabs(a[0][2]) + std::fabs(a[1][2]);
    if (off < 1e-15 * (std::fabs(a[0][0]) + std::fabs(a[1][1]) + std::fabs(a[2][2]) + 1e-300))
      break;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (std::fabs(a[p][q]) < 1e-300) continue;
        double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int k = 0; k < 3; ++k) {
          double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < 3; ++k) {
          double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (int k = 0; k < 3; ++k) {
          double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::array<int, 3> order = {0, 1, 2};
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return a[i][i] < a[j][j]; });
  for (int i = 0; i < 3; ++i) {
    eigenvalues[i] = a[order[i]][order[i]];
    eigenvectors[i] = {v[0][order[i]], v[1][order[i]], v[2][order[i]]};
  }
}

std::int64_t igcd(std::int64_t a, std::int64_t b) {
  a = std::llabs(a);
  b = std::llabs(b);
  while (b) {
    std::int64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

namespace {

// Multiply 3x3 integer matrices.
void imat_mul(const std::int64_t x[3][3], const std::int64_t y[3][3],
              std::int64_t out[3][3]) {
  std::int64_t r[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      r[i][j] = 0;
      for (int k = 0; k < 3; ++k) r[i][j] += x[i][k] * y[k][j];
    }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i][j] = r[i][j];
}

}  // namespace

LayerBasis layer_basis(const IVec& c) {
  std::int64_t g = igcd(igcd(c[0], c[1]), c[2]);
  if (g != 1) throw InvalidArgument("temporal covector must be primitive");

  // Column-reduce the row vector c by unimodular operations until it becomes
  // (1, 0, 0); V accumulates the operations, so c V = (1,0,0).
  std::int64_t row[3] = {c[0], c[1], c[2]};
  std::int64_t V[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  auto col_addmul = [&](int dst, int src, std::int64_t k) {
    row[dst] += k * row[src];
    for (int i = 0; i < 3; ++i) V[i][dst] += k * V[i][src];
  };
  auto col_swap = [&](int i, int j) {
    std::swap(row[i], row[j]);
    for (int r = 0; r < 3; ++r) std::swap(V[r][i], V[r][j]);
  };
  auto col_neg = [&](int i) {
    row[i] = -row[i];
    for (int r = 0; r < 3; ++r) V[r][i] = -V[r][i];
  };
  for (int iter = 0; iter < 256; ++iter) {
    // Put the smallest nonzero |entry| first.
    int piv = -1;
    for (int i = 0; i < 3; ++i)
      if (row[i] != 0 &&
          (piv < 0 || std::llabs(row[i]) < std::llabs(row[piv])))
        piv = i;
    if (piv != 0) col_swap(0, piv);
    if (row[0] < 0) col_neg(0);
    bool done = true;
    for (int i = 1; i < 3; ++i) {
      if (row[i] != 0) {
        std::int64_t k = row[i] / row[0];
        col_addmul(i, 0, -k);
        if (row[i] != 0) done = false;
      }
    }
    if (done) break;
  }
  if (row[0] != 1 || row[1] != 0 || row[2] != 0)
    throw InvalidArgument("temporal covector reduction failed");

  LayerBasis lb;
  lb.e = {V[0][0], V[1][0], V[2][0]};
  lb.u = {V[0][1], V[1][1], V[2][1]};
  lb.w = {V[0][2], V[1][2], V[2][2]};

  // Integer inverse of V via adjugate (det is +-1 by construction).
  std::int64_t det = V[0][0] * (V[1][1] * V[2][2] - V[1][2] * V[2][1]) -
                     V[0][1] * (V[1][0] * V[2][2] - V[1][2] * V[2][0]) +
                     V[0][2] * (V[1][0] * V[2][1] - V[1][1] * V[2][0]);
  if (det != 1 && det != -1)
    throw InvalidArgument("layer basis is not unimodular");
  std::int64_t adj[3][3];
  adj[0][0] = V[1][1] * V[2][2] - V[1][2] * V[2][1];
  adj[0][1] = V[0][2] * V[2][1] - V[0][1] * V[2][2];
  adj[0][2] = V[0][1] * V[1][2] - V[0][2] * V[1][1];
  adj[1][0] = V[1][2] * V[2][0] - V[1][0] * V[2][2];
  adj[1][1] = V[0][0] * V[2][2] - V[0][2] * V[2][0];
  adj[1][2] = V[0][2] * V[1][0] - V[0][0] * V[1][2];
  adj[2][0] = V[1][0] * V[2][1] - V[1][1] * V[2][0];
  adj[2][1] = V[0][1] * V[2][0] - V[0][0] * V[2][1];
  adj[2][2] = V[0][0] * V[1][1] - V[0][1] * V[1][0];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) lb.inv_rows[i][j] = det * adj[i][j];

  // Self-check: V^{-1} V = I.
  std::int64_t Vm[3][3] = {{V[0][0], V[0][1], V[0][2]},
                           {V[1][0], V[1][1], V[1][2]},
                           {V[2][0], V[2][1], V[2][2]}};
  std::int64_t Inv[3][3] = {
      {lb.inv_rows[0][0], lb.inv_rows[0][1], lb.inv_rows[0][2]},
      {lb.inv_rows[1][0], lb.inv_rows[1][1], lb.inv_rows[1][2]},
      {lb.inv_rows[2][0], lb.inv_rows[2][1], lb.inv_rows[2][2]}};
  std::int64_t P[3][3];
  imat_mul(Inv, Vm, P);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (P[i][j] != (i == j ? 1 : 0))
        throw InvalidArgument("layer basis inverse check failed");
  return lb;
}

double dist_point_segment(const Vec& x, const Vec& a, const Vec& b) {
  Vec d = b - a;
  double len2 = dot(d, d);
  if (len2 <= 0) return norm(x - a);
  double t = dot(x - a, d) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return norm(x - (a + t * d));
}

double dist_point_polyline(const Vec& x, const std::vector<Vec>& poly) {
  if (poly.empty()) return 0.0;
  if (poly.size() == 1) return norm(x - poly[0]);
  double best = 1e300;
  for (std::size_t i = 0; i + 1 < poly.size(); ++i)
    best = std::min(best, dist_point_segment(x, poly[i], poly[i + 1]));
  return best;
}

}  // namespace lor
