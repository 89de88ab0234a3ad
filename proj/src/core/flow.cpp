#include "flow.hpp"

#include <cmath>

#include "errors.hpp"

namespace lor {

namespace {

Form metric_derivative(const MetricField& m, const Vec& p, int k) {
  Form out;
  if (m.dg_at(p, k, out)) return out;
  Vec pp = p, pm = p;
  pp[k] += m.fd_step;
  pm[k] -= m.fd_step;
  return (1.0 / (2.0 * m.fd_step)) * (m.g_at(pp) - m.g_at(pm));
}

}  // namespace

Christoffels christoffels(const MetricField& m, const Vec& p) {
  Form G = m.g_at(p);
  std::array<double, 3> evals;
  std::array<Vec, 3> evecs;
  form_eigen_sym(G, evals, evecs);
  double lo = 1e300, hi = 0.0;
  for (double e : evals) {
    lo = std::min(lo, std::fabs(e));
    hi = std::max(hi, std::fabs(e));
  }
  if (lo <= 0.0 || hi / lo > 1e12)
    throw SingularMetric("metric is numerically non-invertible at this point");
  Form Ginv = form_inverse(G);

  Form dg[3];
  for (int k = 0; k < 3; ++k) dg[k] = metric_derivative(m, p, k);

  Christoffels ch;
  for (int k = 0; k < 3; ++k) {
    Form gk;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int l = 0; l < 3; ++l)
          s += Ginv.at(k, l) * (dg[i].at(j, l) + dg[j].at(i, l) - dg[l].at(i, j));
        gk.at(i, j) = 0.5 * s;
      }
    ch.g[k] = gk;
  }
  return ch;
}

Vec pregeodesic_accel(const MetricField& m, const Vec& x, const Vec& v) {
  Christoffels ch = christoffels(m, x);
  Vec T = {ch.g[0](v, v), ch.g[1](v, v), ch.g[2](v, v)};
  double v2 = dot(v, v);
  if (v2 < 1e-24) throw StepUnderflow("pregeodesic tangent collapsed to zero");
  return (dot(T, v) / v2) * v - T;
}

namespace {

struct Deriv {
  Vec dx, dv;
};

template <typename Accel>
FlowResult integrate(const MetricField& m, const FlowState& s0, double span,
                     const FlowOptions& opts, Accel accel, bool renormalize) {
  if (span < 0.0) throw InvalidArgument("integration span must be nonnegative");
  if (opts.step < opts.min_step)
    throw StepUnderflow("integration step below the minimum step");

  FlowResult fr;
  Vec x = s0.x, v = s0.v;
  std::int64_t nsteps = std::llround(span / opts.step);
  double h = nsteps > 0 ? span / double(nsteps) : 0.0;
  if (nsteps > 0 && h < opts.min_step)
    throw StepUnderflow("integration step below the minimum step");

  auto f = [&](const Vec& xx, const Vec& vv) {
    return Deriv{vv, accel(xx, vv)};
  };

  fr.path.v.reserve(std::size_t(nsteps) + 1);
  fr.path.param.reserve(std::size_t(nsteps) + 1);
  fr.path.tangent.reserve(std::size_t(nsteps) + 1);
  double lg = 0.0;
  auto record = [&](double t) {
    fr.path.v.push_back(x);
    fr.path.param.push_back(t);
    fr.path.tangent.push_back(normalized(v));
  };
  record(s0.t);

  for (std::int64_t i = 0; i < nsteps; ++i) {
    Deriv k1 = f(x, v);
    Deriv k2 = f(x + 0.5 * h * k1.dx, v + 0.5 * h * k1.dv);
    Deriv k3 = f(x + 0.5 * h * k2.dx, v + 0.5 * h * k2.dv);
    Deriv k4 = f(x + h * k3.dx, v + h * k3.dv);
    Vec xm = x + 0.5 * h * k1.dx;  // midpoint estimate for the length quadrature
    x = x + (h / 6.0) * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
    v = v + (h / 6.0) * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
    lg += std::sqrt(std::fabs(m.g_at(xm)(k2.dx, k2.dx))) * h;
    ++fr.steps;

    if (renormalize) {
      double nv = norm(v);
      fr.max_norm_drift = std::max(fr.max_norm_drift, std::fabs(nv - 1.0));
      if ((i + 1) % opts.renorm_every == 0) {
        if (nv < 1e-12) throw StepUnderflow("tangent norm collapsed");
        v = (1.0 / nv) * v;
        ++fr.renormalizations;
      }
    }
    record(s0.t + (i + 1) * h);
  }

  if (!renormalize) {
    // First-integral drift of the affine geodesic: g(v,v) is conserved.
    double q0 = m.g_at(s0.x)(s0.v, s0.v);
    double q1 = m.g_at(x)(v, v);
    fr.max_norm_drift = std::fabs(q1 - q0);
  }

  fr.path.Lg = lg;
  fr.path.LR = 0.0;
  for (std::size_t i = 0; i + 1 < fr.path.v.size(); ++i)
    fr.path.LR += norm(fr.path.v[i + 1] - fr.path.v[i]);
  fr.final_state = {x, v, s0.t + span};
  return fr;
}

}  // namespace

FlowResult integrate_pregeodesic(const MetricField& m, const FlowState& v0,
                                 double t_span, const FlowOptions& opts) {
  if (std::fabs(norm(v0.v) - 1.0) > 1e-9)
    throw InvalidArgument("pregeodesic initial tangent must be g_R-unit");
  return integrate(
      m, v0, t_span, opts,
      [&](const Vec& x, const Vec& v) { return pregeodesic_accel(m, x, v); },
      /*renormalize=*/true);
}

FlowResult integrate_affine_geodesic(const MetricField& m, const FlowState& v0,
                                     double tau_span, const FlowOptions& opts) {
  return integrate(
      m, v0, tau_span, opts,
      [&](const Vec& x, const Vec& v) {
        Christoffels ch = christoffels(m, x);
        return Vec{-ch.g[0](v, v), -ch.g[1](v, v), -ch.g[2](v, v)};
      },
      /*renormalize=*/false);
}

}  // namespace lor
