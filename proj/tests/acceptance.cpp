// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are pinned here; each line reports the measured
// quantities next to its bound.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include "core/calibrate.hpp"
#include "core/errors.hpp"
#include "core/flow.hpp"
#include "core/graphcheck.hpp"
#include "core/hedlund.hpp"
#include "core/lab.hpp"
#include "core/measures.hpp"
#include "core/metric.hpp"
#include "core/path.hpp"
#include "core/reach.hpp"
#include "core/stable.hpp"

using namespace lor;

namespace {

using Clock = std::chrono::steady_clock;

double secs(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int g_failures = 0;

void report(int idx, const char* name, bool ok, const std::string& detail) {
  std::printf("%s  criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", idx, name,
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// --- 1. Minkowski distance oracle -------------------------------------------

void criterion1() {
  auto m = make_flat(2);
  const double target = std::sqrt(3.0);
  auto run = [&](double dx) {
    ReachOptions opts;
    opts.spacing = dx;
    opts.stencil_k = 5;
    opts.want_path = false;
    return make_diamond_prober(*m, opts)(vec(0, 0), vec(2, 1), false);
  };
  auto t0 = Clock::now();
  ReachResult coarse = run(0.02);
  double t_coarse = secs(t0);
  ReachResult fine = run(0.01);
  double err_c = std::fabs(coarse.d - target);
  double err_f = std::fabs(fine.d - target);
  // The DP is exact here ((2,1) is a stencil chord), so the halving check
  // carries an additive epsilon for the err ~ 0 regime.
  bool ok = coarse.reachable && err_c / target < 0.01 && t_coarse < 5.0 &&
            err_f <= 0.5 * err_c + 1e-9;
  report(1, "Minkowski distance oracle d((0,0),(2,1)) = sqrt(3)", ok,
         fmt("d=%.6f err=%.2e refined_err=%.2e t=%.2fs", coarse.d, err_c,
             err_f, t_coarse));
}

// --- 2. pregeodesic flow vs the affine oracle --------------------------------

Vec sample_at_arclength(const CausalPath& path, const std::vector<double>& arc,
                        double s) {
  auto it = std::lower_bound(arc.begin(), arc.end(), s);
  std::size_t i = std::min<std::size_t>(
      std::max<std::ptrdiff_t>(it - arc.begin(), 1), arc.size() - 2);
  double s0 = arc[i - 1], s1 = arc[i], s2 = arc[i + 1];
  double w0 = (s - s1) * (s - s2) / ((s0 - s1) * (s0 - s2));
  double w1 = (s - s0) * (s - s2) / ((s1 - s0) * (s1 - s2));
  double w2 = (s - s0) * (s - s1) / ((s2 - s0) * (s2 - s1));
  return w0 * path.v[i - 1] + w1 * path.v[i] + w2 * path.v[i + 1];
}

std::vector<double> cumulative_arclength(const CausalPath& path) {
  std::vector<double> arc(path.v.size(), 0.0);
  for (std::size_t i = 1; i < path.v.size(); ++i)
    arc[i] = arc[i - 1] + norm(path.v[i] - path.v[i - 1]);
  return arc;
}

void criterion2() {
  std::vector<FourierTerm> terms = {{0.3, {1, 0, 0}, 0.0},
                                    {0.1, {0, 1, 0}, 0.5}};
  auto m = make_conformally_flat(2, terms);
  Vec x0 = vec(0.25, 0.55);
  Vec v0 = normalized(vec(1.0, 0.3));

  FlowOptions opts;  // RK4 step 1e-3
  auto t0 = Clock::now();
  FlowResult drift_run = integrate_pregeodesic(*m, {x0, v0, 0.0}, 10.0, opts);
  double t_traj = secs(t0);

  FlowOptions fine;
  fine.step = 5e-4;
  auto t1 = Clock::now();
  FlowResult pre = integrate_pregeodesic(*m, {x0, v0, 0.0}, 5.0, fine);
  FlowResult aff = integrate_affine_geodesic(*m, {x0, v0, 0.0}, 9.0, fine);
  double t_pair = secs(t1) / 2;
  auto arc = cumulative_arclength(aff.path);
  double worst = 0.0;
  for (std::size_t i = 0; i < pre.path.v.size(); ++i) {
    double s = pre.path.param[i];
    if (s > 5.0 || s > arc.back()) break;
    worst = std::max(worst,
                     norm(pre.path.v[i] - sample_at_arclength(aff.path, arc, s)));
  }
  bool ok = drift_run.max_norm_drift < 1e-8 && worst < 1e-6 && t_traj < 2.0 &&
            t_pair < 2.0;
  report(2, "pregeodesic flow drift and affine-oracle agreement", ok,
         fmt("drift=%.2e sup_dist=%.2e t/traj=%.2fs", drift_run.max_norm_drift,
             worst, std::max(t_traj, t_pair)));
}

// --- 3. Hedlund stable time separation brackets ------------------------------

void criterion3() {
  HedlundMetric m{HedlundParams{}};  // lambda = (0.5, 0.3, 0.2), eps = 0.01
  ReachOptions opts;
  opts.spacing = 0.0025;
  opts.tube_radius = 8 * m.eps();
  opts.want_path = false;
  Prober prober = make_hedlund_prober(m, opts);
  const Vec lambda = vec(0.5, 0.3, 0.2);
  const std::vector<Vec> hs = {vec(1, 0, 0), vec(0, 1, 0), vec(0, 0, 1),
                               vec(1, 1, 1)};
  // Axis directions are only direct runs from a base on their own line
  // family, so probe from the metric's structured bases and keep the first
  // reachable result (the stable limit is base-independent).
  std::vector<Vec> bases = {vec(0, 0, 0)};
  for (const Vec& b : m.suggested_bases()) bases.push_back(b);
  const int N = 20;
  auto t0 = Clock::now();
  bool ok = true;
  std::string detail;
  for (const Vec& h : hs) {
    ReachResult rr;
    for (const Vec& b : bases) {
      rr = prober(b, b + double(N) * h, false);
      if (rr.reachable) break;
    }
    double exact = N * dot(lambda, h);
    bool this_ok = rr.reachable && rr.d >= exact - 5.2 && rr.d <= exact + 1e-9;
    ok = ok && this_ok;
    detail += fmt("h=(%g,%g,%g): d=%.4f/%g ", h[0], h[1], h[2], rr.d, exact);
  }
  double el = secs(t0);
  ok = ok && el < 600.0;
  report(3, "Hedlund stable separation brackets at N=20", ok,
         detail + fmt("t=%.0fs", el));
}

// --- 4. Hedlund combinatorics battery ----------------------------------------

void criterion4() {
  HedlundMetric m{HedlundParams{}};
  ReachOptions opts;
  opts.spacing = 0.01;
  // Maximal segments are computed in the tube around the canonical standard
  // path between the endpoints (radius 4 eps contains the true maximizer),
  // so the shadowing bound is tube radius + grid snapping.
  opts.tube_radius = 4 * m.eps();
  opts.mode = ReachOptions::Mode::Tube;
  // Endpoint pairs on lines of distinct families (p on a family-i line, q on
  // a family-j line), componentwise displacement >= 1/2.
  struct Cfg {
    Vec p, q;
  };
  const Vec p1 = vec(0, 0, 0);      // family 1 line
  const Vec p2 = vec(0, 0, 0.5);    // family 2 line
  const Vec p3 = vec(0.5, 0.5, 0);  // family 3 line
  const std::vector<Cfg> cfgs = {
      {p1, vec(1, 1, 0.5)},     {p1, vec(2, 1, 1.5)},
      {p1, vec(2, 2, 0.5)},     {p1, vec(3, 1.5, 1.5)},
      {p1, vec(1.5, 1.5, 1)},   {p1, vec(2.5, 1.5, 2)},
      {p1, vec(1.5, 2.5, 1)},   {p1, vec(2.5, 2.5, 3)},
      {p2, vec(1, 1, 1)},       {p2, vec(2, 1, 2)},
      {p2, vec(1.5, 2, 1)},     {p2, vec(2.5, 1, 2)},
      {p2, vec(0.5, 0.5, 1.5)}, {p2, vec(1.5, 1.5, 2)},
      {p2, vec(0.5, 1.5, 2)},   {p2, vec(1.5, 2.5, 2)},
      {p3, vec(1, 1, 1)},       {p3, vec(2, 1, 2)},
      {p3, vec(2, 2, 1)},       {p3, vec(3, 2, 1)},
      {p3, vec(1, 1, 0.5)},     {p3, vec(2, 1.5, 1.5)},
      {p3, vec(1, 2.5, 2.5)},   {p3, vec(2, 2.5, 1.5)},
  };
  const double shadow_bound = 4 * m.eps() + 2 * opts.spacing;
  double worst_f30 = 1e300, worst_l31 = 1e300, worst_shadow = 0;
  int worst_changes = 0, segments = 0;
  bool ok = true;
  auto t0 = Clock::now();
  for (const Cfg& c : cfgs) {
    CausalPath sp = standard_path(m, c.p, c.q);
    ReachOptions run = opts;
    run.guide = sp.v;
    ReachResult rr = time_separation(m, c.p, c.q, run);
    if (!rr.reachable || rr.path.empty()) {
      ok = false;
      continue;
    }
    ++segments;
    worst_f30 = std::min(worst_f30, check_F30(m, rr.path));
    worst_l31 = std::min(worst_l31, check_L31(m, rr.path));
    worst_changes =
        std::max(worst_changes, count_tube_changes(m, rr.path).tube_changes);
    worst_shadow = std::max(worst_shadow, shadowing_check(m, rr.path));
  }
  ok = ok && segments >= 20 && worst_f30 >= 0.0 && worst_l31 >= 0.0 &&
       worst_changes <= 6 && worst_shadow <= shadow_bound;
  report(4, "Hedlund maximizer combinatorics battery", ok,
         fmt("segments=%d F30>=%.2e L31>=%.2e changes<=%d shadow=%.3f/%.3f "
             "t=%.0fs",
             segments, worst_f30, worst_l31, worst_changes, worst_shadow,
             shadow_bound, secs(t0)));
}

// --- 5. cone recovery ---------------------------------------------------------

void criterion5() {
  auto t0 = Clock::now();
  bool ok_h, ok_b;
  double haus_h, haus_b;
  {
    HedlundMetric m{HedlundParams{}};
    ReachOptions opts;
    opts.spacing = 0.05;
    opts.tube_radius = 8 * m.eps();
    opts.want_path = false;
    opts.margin = kPermissiveMargin;
    Prober prober = make_hedlund_prober(m, opts);
    ConeEstimate ce = estimate_cone(m, 3000, 20.0, prober);
    // The Fibonacci sample alone under-resolves the simplex boundary: a
    // direction is probed through its half-lattice snap at R = 20, and near
    // the cone faces only one parity class of snapped targets is guide-
    // plannable. Augment with a simplex-aligned direction grid, probing the
    // parity variants of each snapped target and recording the achieved
    // (snapped) direction.
    std::vector<Vec> bases = {vec(0, 0, 0)};
    for (const Vec& b : m.suggested_bases()) bases.push_back(b);
    auto snap_half = [](const Vec& x) {
      return vec(0.5 * std::round(2 * x[0]), 0.5 * std::round(2 * x[1]),
                 0.5 * std::round(2 * x[2]));
    };
    std::map<std::array<long, 3>, bool> memo;
    auto probe_target = [&](const Vec& T) {
      std::array<long, 3> key = {std::lround(2 * T[0]), std::lround(2 * T[1]),
                                 std::lround(2 * T[2])};
      auto it = memo.find(key);
      if (it != memo.end()) return it->second;
      bool reach = false;
      for (const Vec& b : bases)
        if (prober(b, b + T, false).reachable) {
          reach = true;
          break;
        }
      memo[key] = reach;
      return reach;
    };
    const int G = 40;
    const double R = 20.0;
    for (int i = 0; i <= G; ++i)
      for (int j = 0; i + j <= G; ++j) {
        Vec s = vec(double(i) / G, double(j) / G, 1.0 - double(i + j) / G);
        Vec T0 = snap_half(R * normalized(s));
        for (int v = 0; v < 7; ++v) {
          Vec T = T0;
          if (v > 0) T[(v - 1) % 3] += (v <= 3 ? 0.5 : -0.5);
          if (T[0] < 0 || T[1] < 0 || T[2] < 0 || norm(T) < 1e-9) continue;
          if (probe_target(T)) ce.reachable_dirs.push_back(normalized(T));
        }
      }
    haus_h = cone_hausdorff_simplex(ce.reachable_dirs, 3);
    ok_h = ce.zero_excluded && haus_h < 0.05;
  }
  {
    auto m = make_boundary_2torus();
    ReachOptions opts;
    opts.spacing = 0.05;
    opts.want_path = false;
    opts.diamond_factor = 0.15;
    opts.diamond_min_radius = 1.0;
    opts.stencil_k = 12;
    opts.margin = kPermissiveMargin;  // lightlike chains count as reachable
    Prober prober = make_diamond_prober(*m, opts);
    ConeEstimate ce = estimate_cone(*m, 256, 20.0, prober);
    haus_b = cone_hausdorff_simplex(ce.reachable_dirs, 2);
    ok_b = ce.zero_excluded && haus_b < 0.05;
  }
  report(5, "stable time cone recovery at probe radius 20", ok_h && ok_b,
         fmt("hedlund_hausdorff=%.4f boundary_hausdorff=%.4f t=%.0fs", haus_h,
             haus_b, secs(t0)));
}

// --- 6. calibration suite -----------------------------------------------------

void criterion6() {
  HedlundMetric m{HedlundParams{}};
  const Vec lambda = vec(0.5, 0.3, 0.2);
  ReachOptions opts;
  opts.spacing = 0.05;
  opts.tube_radius = 8 * m.eps();
  opts.want_path = false;
  Prober prober = make_hedlund_prober(m, opts);
  auto t0 = Clock::now();

  Calibration cal = make_linear_calibration(lambda, 1.0);
  PseudoTimeReport pt =
      is_pseudo_time(m, cal, 1.0, 1000, 7, prober, 2 * opts.spacing);
  bool ok_pt = pt.pass && pt.pairs == 1000 &&
               pt.worst_margin >= -2 * opts.spacing;

  // Line defects against the closed forms (alpha_j / lambda_j - lstar) *
  // lambda_j per unit, 0 at the argmin indices.
  struct LineRun {
    CausalPath path;
    int j;
  };
  std::vector<LineRun> runs;
  runs.push_back({make_path(m, {vec(0, 0, 0), vec(6, 0, 0)}), 0});
  runs.push_back({make_path(m, {vec(0, 0, 0.5), vec(0, 6, 0.5)}), 1});
  runs.push_back({make_path(m, {vec(0.5, 0.5, 0), vec(0.5, 0.5, 6)}), 2});
  const std::vector<Vec> alphas = {lambda, vec(0.5, 0.6, 0.2),
                                   vec(1.0, 0.3, 0.2)};
  bool ok_def = true;
  double worst_def = 0;
  for (const Vec& a : alphas) {
    double lstar = 1e300;
    for (int j = 0; j < 3; ++j) lstar = std::min(lstar, a[j] / lambda[j]);
    Calibration ca = make_linear_calibration(a, lstar);
    for (const LineRun& r : runs) {
      double want = (a[r.j] / lambda[r.j] - lstar) * lambda[r.j];
      double got = check_calibrated(m, ca, r.path).defect_per_unit;
      worst_def = std::max(worst_def, std::fabs(got - want));
      ok_def = ok_def && std::fabs(got - want) <= 1e-6;
    }
  }

  bool ok_linf = l_infty(m, lambda) < -1e299;
  DualityReport dr = duality_check(m, lambda, 1.0);
  bool ok_dual = dr.one_sided_ok && !dr.tried_linf.empty();

  report(6, "calibration suite", ok_pt && ok_def && ok_linf && ok_dual,
         fmt("pseudo_time_margin=%.2e defect_err=%.2e linf=-inf%s "
             "duality_evals=%zu%s t=%.0fs",
             pt.worst_margin, worst_def, ok_linf ? "" : "(!)",
             dr.tried_linf.size(), ok_dual ? "" : "(!)", secs(t0)));
}

// --- 7. graph theorem ---------------------------------------------------------

void criterion7() {
  auto t0 = Clock::now();
  R20Ladder lad = r20_ladder({1e-1, 1e-2, 1e-3, 1e-4});
  bool ok_lad = std::fabs(lad.exponent - 0.5) <= 0.05 && !lad.lip_K.empty() &&
                lad.lip_K.back() >= 10.0 * lad.lip_K.front();

  auto flat = make_flat(2);
  GainBattery gb = crossing_battery(*flat, 1000, 11);
  bool ok_gain = gb.pass && gb.min_gain_ratio > 0 && gb.configs >= 1000;

  HedlundMetric m{HedlundParams{}};
  L20aReport l20 = lemma20a_check(m, 100000, 5);
  bool ok_l20 = l20.pass && l20.eps_tilde > 0 && std::isfinite(l20.C_tilde);

  report(7, "graph theorem: R20 ladder, crossing gain, L20a constants",
         ok_lad && ok_gain && ok_l20,
         fmt("exponent=%.3f lipK_growth=%.0fx gain_ratio=%.2e eps~=%.3f "
             "C~=%.2f t=%.0fs",
             lad.exponent, lad.lip_K.back() / lad.lip_K.front(),
             gb.min_gain_ratio, l20.eps_tilde, l20.C_tilde, secs(t0)));
}

// --- 8. measures ---------------------------------------------------------------

void criterion8() {
  HedlundMetric m{HedlundParams{}};
  ReachOptions opts;
  opts.spacing = 0.01;
  opts.tube_radius = 8 * m.eps();
  Prober prober = make_hedlund_prober(m, opts);
  Cellization c;
  auto t0 = Clock::now();
  MaximalMeasureResult r1 = find_maximal_measure(m, vec(1, 0, 0), 3, prober, c);
  MaximalMeasureResult r2 = find_maximal_measure(m, vec(0, 1, 0), 3, prober, c);
  MaximalMeasureResult r3 = find_maximal_measure(m, vec(0, 0, 1), 3, prober, c);
  const double grid_tol = opts.spacing;
  bool ok_L = std::fabs(r1.L - 0.5) <= 2 * grid_tol &&
              std::fabs(r2.L - 0.3) <= 2 * grid_tol &&
              std::fabs(r3.L - 0.2) <= 2 * grid_tol;
  bool ok_disj = disjoint_support(r1.mu, r2.mu) &&
                 disjoint_support(r1.mu, r3.mu) &&
                 disjoint_support(r2.mu, r3.mu);

  // Invariance defect of window-T measures for three test functions with
  // explicit Lipschitz bounds.
  struct TestFn {
    std::function<double(const Vec&)> f;
    double lip;
  };
  const std::vector<TestFn> fns = {
      {[](const Vec& x) { return std::sin(2 * M_PI * x[0]) / (2 * M_PI); }, 1.0},
      {[](const Vec& x) { return std::cos(2 * M_PI * x[1]) / (2 * M_PI); }, 1.0},
      {[](const Vec& x) {
         return std::sin(2 * M_PI * (x[0] + x[2])) / (2 * M_PI);
       },
       std::sqrt(2.0)}};
  bool ok_inv = true;
  double worst_ratio = 0;
  for (double T : {10.0, 20.0, 40.0}) {
    auto run = make_path(m, {vec(0.25, 0, 0), vec(0.25 + T, 0, 0)});
    OccupationMeasure mu = occupation_measure(run, c, 3);
    for (const TestFn& tf : fns) {
      double defect = std::fabs(invariance_defect(mu, tf.f));
      double bound = 2 * tf.lip / T;
      worst_ratio = std::max(worst_ratio, defect / bound);
      ok_inv = ok_inv && defect <= bound + 1e-6;
    }
  }
  report(8, "Hedlund maximal measures and window invariance",
         ok_L && ok_disj && ok_inv,
         fmt("L=(%.3f,%.3f,%.3f) disjoint=%d defect/bound<=%.2f t=%.0fs", r1.L,
             r2.L, r3.L, int(ok_disj), worst_ratio, secs(t0)));
}

// --- 9. determinism -------------------------------------------------------------

void criterion9() {
  auto t0 = Clock::now();
  std::string dir = "/tmp/acceptance_det";
  std::string cfg =
      "{\"metric\": {\"family\": \"hedlund\"}, \"task\": \"stable-sep\","
      " \"directions\": [[1,0,0],[0,1,0],[1,1,1]], \"schedule\": [2],"
      " \"seed\": 3, \"output\": {\"dir\": \"" + dir + "\"}}";
  setenv("LORENTZ_THREADS", "1", 1);
  RunResult a = run_experiment(cfg);
  RunResult a2 = run_experiment(cfg);
  setenv("LORENTZ_THREADS", "8", 1);
  RunResult b = run_experiment(cfg);
  unsetenv("LORENTZ_THREADS");
  bool ok = a.exit_code == 0 && a.report_json == a2.report_json &&
            a.report_json == b.report_json;
  report(9, "same-seed bit-identical reruns, thread-count invariance", ok,
         fmt("rerun_equal=%d threads_equal=%d t=%.0fs",
             int(a.report_json == a2.report_json),
             int(a.report_json == b.report_json), secs(t0)));
}

}  // namespace

int main(int argc, char** argv) {
  void (*criteria[])() = {criterion1, criterion2, criterion3,
                          criterion4, criterion5, criterion6,
                          criterion7, criterion8, criterion9};
  if (argc > 1) {
    // Optional subset selection by criterion number (debugging aid).
    for (int i = 1; i < argc; ++i) {
      int k = std::atoi(argv[i]);
      if (k >= 1 && k <= 9) criteria[k - 1]();
    }
  } else {
    for (auto* c : criteria) c();
  }
  if (g_failures == 0) {
    std::printf("acceptance: all criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criteria FAILED\n", g_failures);
  return 1;
}
