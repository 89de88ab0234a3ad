#include "calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "errors.hpp"
#include "path.hpp"

namespace lor {

double Calibration::tau(const Vec& x) const {
  double t = dot(alpha, x);
  for (const FourierTerm& f : correction) {
    double arg = 2.0 * M_PI *
                     (f.k[0] * x[0] + f.k[1] * x[1] + f.k[2] * x[2]) +
                 f.phase;
    t += f.amp * std::sin(arg);
  }
  return t;
}

Vec Calibration::grad_tau(const Vec& x) const {
  Vec g = alpha;
  for (const FourierTerm& f : correction) {
    double arg = 2.0 * M_PI *
                     (f.k[0] * x[0] + f.k[1] * x[1] + f.k[2] * x[2]) +
                 f.phase;
    double c = 2.0 * M_PI * f.amp * std::cos(arg);
    g = g + c * vec(double(f.k[0]), double(f.k[1]), double(f.k[2]));
  }
  return g;
}

Calibration make_linear_calibration(const Vec& alpha, double lstar) {
  Calibration cal;
  cal.alpha = alpha;
  cal.lstar = lstar;
  cal.lipschitz = norm(alpha);
  return cal;
}

// --- pseudo-time verification ------------------------------------------------

PseudoTimeReport is_pseudo_time(const MetricField& m, const Calibration& cal,
                                double l, int pairs, std::uint64_t seed,
                                const Prober& prober, double tol) {
  PseudoTimeReport rep;
  rep.worst_margin = 1e300;
  rep.eps_hat = 1e300;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> scale(1.0, 4.0);
  std::vector<Vec> bases = m.suggested_bases();
  if (bases.empty()) bases.push_back(vec(0, 0, 0));
  // Displacements are snapped to the half lattice so that structured probers
  // (Hedlund guides) can plan; unreachable snaps are skipped, not counted.
  int attempts = 0;
  const int max_attempts = 12 * pairs;
  while (rep.pairs < pairs && attempts < max_attempts) {
    ++attempts;
    Vec p = bases[attempts % bases.size()];
    Vec v = sample_causal_vector(m.g_at(p), m.orient(p), m.dim(), rng, 0.7);
    Vec delta = scale(rng) * v;
    for (int i = 0; i < m.dim(); ++i)
      delta[i] = 0.5 * std::round(2.0 * delta[i]);
    if (norm(delta) < 0.25) continue;
    Vec q = p + delta;
    ReachResult rr = prober(p, q, false);
    if (!rr.reachable) continue;
    ++rep.pairs;
    double dt = cal.tau(q) - cal.tau(p);
    double margin = dt - l * rr.d;
    rep.worst_margin = std::min(rep.worst_margin, margin);
    if (margin < -tol) ++rep.violations;
    rep.eps_hat = std::min(rep.eps_hat, dt / norm(q - p));
  }
  rep.pass = rep.pairs > 0 && rep.violations == 0;
  return rep;
}

// --- calibrated curves -------------------------------------------------------

CalibratedCheck check_calibrated(const MetricField& m, const Calibration& cal,
                                 const CausalPath& path, const Prober* prober,
                                 double spot_tol) {
  if (path.size() < 2) throw EmptyPath("calibration check of an empty path");
  CalibratedCheck out;
  // D_i = tau(v_i) - lstar * L^g(v_0..v_i); the worst subinterval defect is
  // max D - min D.
  double lg = 0.0, dmin = 1e300, dmax = -1e300;
  for (std::size_t i = 0; i < path.v.size(); ++i) {
    if (i > 0) lg += segment_lorentz_length(m, path.v[i - 1], path.v[i]);
    double D = cal.tau(path.v[i]) - cal.lstar * lg;
    dmin = std::min(dmin, D);
    dmax = std::max(dmax, D);
  }
  out.Lg = lg;
  out.defect_per_unit = (dmax - dmin) / std::max(path.param.back(), 1e-300);
  if (prober) {
    ReachResult rr = (*prober)(path.v.front(), path.v.back(), false);
    out.dhat = rr.d;
    out.maximizer_ok = rr.reachable && std::fabs(rr.d - lg) <= spot_tol;
  }
  return out;
}

// --- the l-infinity functional ----------------------------------------------

namespace {

std::vector<Vec> linf_samples(const MetricField& m, int grid) {
  std::vector<Vec> pts;
  int n = m.dim();
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j)
      for (int k = 0; k < (n == 3 ? grid : 1); ++k)
        pts.push_back(vec((i + 0.37) / grid, (j + 0.37) / grid,
                          n == 3 ? (k + 0.37) / grid : 0.0));
  // Feature points (e.g. the Hedlund line system) are exactly where the
  // minimum tends to sit; sample them explicitly.
  for (const Vec& b : m.suggested_bases()) pts.push_back(b);
  for (const Vec& s : m.special_points()) pts.push_back(s);
  return pts;
}

// l_infty of a (possibly position-dependent) representative.
double linf_eval(const MetricField& m, const std::vector<Vec>& pts,
                 const std::function<Vec(const Vec&)>& omega) {
  double best = 1e300;
  for (const Vec& p : pts) {
    Vec w = omega(p);
    Form Ginv = form_inverse(m.g_at(p));
    Vec sharp = Ginv.apply(w);
    CausalClass c = classify(m, p, -sharp);
    if (c != CausalClass::TimelikeFuture && c != CausalClass::LightlikeFuture)
      return -HUGE_VAL;
    best = std::min(best, std::sqrt(std::fabs(dot(w, sharp))));
  }
  return best;
}

}  // namespace

double l_infty(const MetricField& m, const Vec& omega, int grid) {
  return linf_eval(m, linf_samples(m, grid),
                   [&](const Vec&) { return omega; });
}

// --- duality -----------------------------------------------------------------

DualityReport duality_check(const MetricField& m, const Vec& alpha,
                            double lstar, int degree, double tol) {
  DualityReport rep;
  rep.alpha = alpha;
  rep.lstar = lstar;
  const int n = m.dim();
  // Truncated Fourier family for phi: axis harmonics up to `degree` plus the
  // mixed unit modes.
  std::vector<IVec> modes;
  for (int i = 0; i < n; ++i)
    for (int d = 1; d <= degree; ++d) {
      IVec k = {0, 0, 0};
      k[i] = d;
      modes.push_back(k);
    }
  if (n >= 2) modes.push_back({1, 1, 0});
  if (n == 3) {
    modes.push_back({1, 0, 1});
    modes.push_back({0, 1, 1});
    modes.push_back({1, 1, 1});
  }
  // coeff[2m] = sine amplitude, coeff[2m+1] = cosine amplitude of mode m.
  std::vector<double> coeff(2 * modes.size(), 0.0);
  std::vector<Vec> pts = linf_samples(m, 7);
  auto omega_at = [&](const Vec& x) {
    Vec w = alpha;
    for (std::size_t mi = 0; mi < modes.size(); ++mi) {
      const IVec& k = modes[mi];
      double arg =
          2.0 * M_PI * (k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
      double c = 2.0 * M_PI *
                 (coeff[2 * mi] * std::cos(arg) - coeff[2 * mi + 1] * std::sin(arg));
      w = w + c * vec(double(k[0]), double(k[1]), double(k[2]));
    }
    return w;
  };
  auto evaluate = [&]() {
    double v = linf_eval(m, pts, omega_at);
    rep.tried_linf.push_back(v);
    if (std::isfinite(v) && v > lstar + tol) rep.one_sided_ok = false;
    if (v > rep.best_linf) rep.best_linf = v;
    return v;
  };
  double cur = evaluate();
  const double steps[] = {0.3, 0.1, 0.03, 0.01};
  for (int pass = 0; pass < 3; ++pass)
    for (std::size_t ci = 0; ci < coeff.size(); ++ci)
      for (double s : steps)
        for (double sgn : {1.0, -1.0}) {
          double saved = coeff[ci];
          coeff[ci] = saved + sgn * s;
          double v = evaluate();
          if (v > cur)
            cur = v;
          else
            coeff[ci] = saved;
        }
  rep.gap = lstar - rep.best_linf;
  return rep;
}

// --- the boundary-torus flowline witness -------------------------------------

FlowlineWitness boundary_flowline_witness(const MetricField& m, int n,
                                          double x0, double y0) {
  if (m.dim() != 2) throw InvalidArgument("flowline witness needs a 2-torus");
  // X1 = -sin^2(pi x) d_x + d_y integrates in closed form:
  // cot(pi x(t)) = cot(pi x0) + pi t, so x(t) = acot(z)/pi in (0,1).
  double z0 = std::cos(M_PI * x0) / std::sin(M_PI * x0);
  auto x_of = [&](double t) { return std::atan2(1.0, z0 + M_PI * t) / M_PI; };
  FlowlineWitness w;
  CausalPath& fp = w.flow_part;
  const double dt = 0.005;
  int steps = int(std::llround(2.0 * n / dt));
  fp.param.push_back(0.0);
  for (int i = 0; i <= steps; ++i) {
    double t = -double(n) + i * dt;
    fp.v.push_back(vec(x_of(t), y0 + t));
    if (i > 0) {
      double dl = norm(fp.v.back() - fp.v[fp.v.size() - 2]);
      fp.LR += dl;
      fp.param.push_back(fp.param.back() + dl);
      fp.Lg += segment_lorentz_length(m, fp.v[fp.v.size() - 2], fp.v.back());
    }
  }
  // Close up to the deck translate that cancels the flow's y-progress:
  // end + closing = start + (-1, 2n), so the loop class is 2n e2 - e1.
  Vec start = fp.v.front();
  Vec end = fp.v.back();
  Vec closed_target = start + vec(-1.0, 2.0 * n);
  w.closing_gap = norm(closed_target - end);
  w.homology = {-1, 2 * n, 0};
  w.alpha_period = (closed_target - start)[0];  // integral of dx^1 = -1
  return w;
}

}  // namespace lor
