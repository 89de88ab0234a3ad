#pragma once

// Small fixed-size linear algebra for points, tangents and symmetric bilinear
// forms on R^n with n <= 3. Vectors always carry three components; unused
// trailing components are zero and forms are padded with +1 on the unused
// diagonal so that all arithmetic is uniformly three-dimensional.

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace lor {

constexpr int kMaxDim = 3;

using Vec = std::array<double, 3>;

inline Vec vec(double x, double y = 0.0, double z = 0.0) { return {x, y, z}; }

inline Vec operator+(const Vec& a, const Vec& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec operator-(const Vec& a, const Vec& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec operator*(double s, const Vec& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline Vec operator-(const Vec& a) { return {-a[0], -a[1], -a[2]}; }

inline double dot(const Vec& a, const Vec& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }
inline double norm_inf(const Vec& a) {
  return std::max({std::fabs(a[0]), std::fabs(a[1]), std::fabs(a[2])});
}
inline Vec normalized(const Vec& a) {
  double n = norm(a);
  return n > 0 ? (1.0 / n) * a : a;
}
inline Vec cross(const Vec& a, const Vec& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

// Symmetric bilinear form stored as a full row-major 3x3 matrix.
struct Form {
  std::array<double, 9> m{};

  double& at(int i, int j) { return m[3 * i + j]; }
  double at(int i, int j) const { return m[3 * i + j]; }

  // q(u, v) = u^T M v
  double operator()(const Vec& u, const Vec& v) const {
    return u[0] * (m[0] * v[0] + m[1] * v[1] + m[2] * v[2]) +
           u[1] * (m[3] * v[0] + m[4] * v[1] + m[5] * v[2]) +
           u[2] * (m[6] * v[0] + m[7] * v[1] + m[8] * v[2]);
  }

  Vec apply(const Vec& v) const {
    return {m[0] * v[0] + m[1] * v[1] + m[2] * v[2],
            m[3] * v[0] + m[4] * v[1] + m[5] * v[2],
            m[6] * v[0] + m[7] * v[1] + m[8] * v[2]};
  }
};

inline Form form_identity() {
  Form f;
  f.m = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  return f;
}

inline Form form_diag(double a, double b, double c) {
  Form f;
  f.m = {a, 0, 0, 0, b, 0, 0, 0, c};
  return f;
}

inline Form operator+(const Form& a, const Form& b) {
  Form r;
  for (int i = 0; i < 9; ++i) r.m[i] = a.m[i] + b.m[i];
  return r;
}
inline Form operator-(const Form& a, const Form& b) {
  Form r;
  for (int i = 0; i < 9; ++i) r.m[i] = a.m[i] - b.m[i];
  return r;
}
inline Form operator*(double s, const Form& a) {
  Form r;
  for (int i = 0; i < 9; ++i) r.m[i] = s * a.m[i];
  return r;
}

// a b^T + b a^T
inline Form sym_outer(const Vec& a, const Vec& b) {
  Form r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r.at(i, j) = a[i] * b[j] + b[i] * a[j];
  return r;
}

// a a^T
inline Form outer(const Vec& a) {
  Form r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r.at(i, j) = a[i] * a[j];
  return r;
}

double form_det(const Form& f);
// Inverse of a (symmetric) 3x3 matrix. Throws SingularMetric when the
// condition estimate exceeds 1e12.
Form form_inverse(const Form& f);

// Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a
// symmetric 3x3 matrix via cyclic Jacobi rotations.
void form_eigen_sym(const Form& f, std::array<double, 3>& eigenvalues,
                    std::array<Vec, 3>& eigenvectors);

// --- integer lattice helpers (temporal layering in reach) ---

using IVec = std::array<std::int64_t, 3>;

std::int64_t igcd(std::int64_t a, std::int64_t b);

// Given a primitive integer covector c (trailing zeros past `dim`), produce a
// unimodular column basis V = [e, u, w] of Z^3 with c.e = 1 and c.u = c.w = 0,
// together with its integer inverse. Every z in Z^3 decomposes uniquely as
// z = (c.z) e + a u + b w.
struct LayerBasis {
  IVec e, u, w;       // columns of V
  IVec inv_rows[3];   // rows of V^{-1}
  std::int64_t layer_of(const IVec& z) const {
    return inv_rows[0][0] * z[0] + inv_rows[0][1] * z[1] + inv_rows[0][2] * z[2];
  }
  void decompose(const IVec& z, std::int64_t& l, std::int64_t& a,
                 std::int64_t& b) const {
    l = inv_rows[0][0] * z[0] + inv_rows[0][1] * z[1] + inv_rows[0][2] * z[2];
    a = inv_rows[1][0] * z[0] + inv_rows[1][1] * z[1] + inv_rows[1][2] * z[2];
    b = inv_rows[2][0] * z[0] + inv_rows[2][1] * z[1] + inv_rows[2][2] * z[2];
  }
  IVec compose(std::int64_t l, std::int64_t a, std::int64_t b) const {
    return {l * e[0] + a * u[0] + b * w[0], l * e[1] + a * u[1] + b * w[1],
            l * e[2] + a * u[2] + b * w[2]};
  }
};

LayerBasis layer_basis(const IVec& c);

// Distance from point x to segment [a, b].
double dist_point_segment(const Vec& x, const Vec& a, const Vec& b);
// Distance from point x to a polyline.
double dist_point_polyline(const Vec& x, const std::vector<Vec>& poly);

}  // namespace lor
