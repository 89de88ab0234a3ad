#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/errors.hpp"
#include "core/flow.hpp"
#include "core/metric.hpp"

using namespace lor;

namespace {

// Closed-form Christoffel symbols of a conformally flat metric f^2 eta:
//   Gamma^k_ij = d_i(ln f) delta^k_j + d_j(ln f) delta^k_i
//              - eta_ij eta^kl d_l(ln f).
Christoffels conformal_oracle(const ConformalMetric& m, const Vec& p) {
  double f = m.f(p);
  Vec df = m.grad_f(p);
  Vec dln = (1.0 / f) * df;
  double eta[3] = {-1.0, 1.0, 1.0};
  Christoffels ch;
  for (int k = 0; k < 3; ++k) {
    Form gk{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double v = 0.0;
        if (k == j) v += dln[i];
        if (k == i) v += dln[j];
        if (i == j) v -= eta[i] * (1.0 / eta[k]) * dln[k];
        gk.at(i, j) = v;
      }
    ch.g[k] = gk;
  }
  return ch;
}

double sup_form_diff(const Christoffels& a, const Christoffels& b) {
  double worst = 0.0;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 9; ++i)
      worst = std::max(worst, std::fabs(a.g[k].m[i] - b.g[k].m[i]));
  return worst;
}

// Position on a sampled trajectory at a given cumulative Euclidean arclength,
// by local quadratic interpolation in the arclength table.
Vec sample_at_arclength(const CausalPath& path, const std::vector<double>& arc,
                        double s) {
  auto it = std::lower_bound(arc.begin(), arc.end(), s);
  std::size_t i = std::min<std::size_t>(
      std::max<std::ptrdiff_t>(it - arc.begin(), 1), arc.size() - 2);
  // Quadratic Lagrange interpolation through samples i-1, i, i+1.
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

}  // namespace

TEST_CASE("Christoffel symbols") {
  SUBCASE("flat torus: all coefficients vanish") {
    auto m = make_flat(3);
    Christoffels ch = christoffels(*m, vec(0.3, 0.6, 0.1));
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 9; ++i) CHECK(ch.g[k].m[i] == doctest::Approx(0.0));
  }
  SUBCASE("conformally flat: matches the closed-form conformal connection") {
    std::vector<FourierTerm> terms = {{0.3, {1, 0, 0}, 0.0},
                                      {0.1, {0, 2, 1}, 0.7}};
    auto mp = make_conformally_flat(3, terms);
    const auto& m = dynamic_cast<const ConformalMetric&>(*mp);
    for (Vec p : {vec(0.1, 0.2, 0.3), vec(0.7, 0.9, 0.05), vec(0.41, 0.6, 0.83)}) {
      Christoffels got = christoffels(m, p);
      Christoffels want = conformal_oracle(m, p);
      CHECK(sup_form_diff(got, want) < 1e-6);
    }
  }
  SUBCASE("Hedlund away from the tubes: locally constant, so zero") {
    HedlundParams hp;
    HedlundMetric m(hp);
    Christoffels ch = christoffels(m, vec(0.21, 0.69, 0.17));
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 9; ++i) CHECK(ch.g[k].m[i] == doctest::Approx(0.0));
  }
  SUBCASE("degenerate metric is rejected") {
    struct Degenerate final : MetricField {
      Degenerate() : MetricField(3) {}
      Form g_at(const Vec&) const override {
        return form_diag(-1e-13, 1, 1);
      }
      Vec orient(const Vec&) const override { return vec(1, 0, 0); }
      IVec temporal_int() const override { return {1, 0, 0}; }
      std::string family() const override { return "degenerate"; }
    } bad;
    CHECK_THROWS_AS(christoffels(bad, vec(0, 0, 0)), SingularMetric);
  }
}

TEST_CASE("pregeodesics on the flat torus are straight lines") {
  auto m = make_flat(2);
  Vec v0 = normalized(vec(1.0, 0.4));
  FlowResult fr = integrate_pregeodesic(*m, {vec(0.2, 0.1), v0, 0.0}, 3.0);
  Vec expect = vec(0.2, 0.1) + 3.0 * v0;
  CHECK(norm(fr.final_state.x - expect) < 1e-10);
  for (const Vec& t : fr.path.tangent) CHECK(norm(t - v0) < 1e-10);
  CHECK(fr.max_norm_drift < 1e-12);
}

TEST_CASE("unit-speed conservation over 10 arclength units") {
  std::vector<FourierTerm> terms = {{0.3, {1, 0, 0}, 0.0}, {0.15, {1, 1, 0}, 0.3}};
  auto m = make_conformally_flat(2, terms);
  Vec v0 = normalized(vec(1.0, 0.35));
  FlowResult fr = integrate_pregeodesic(*m, {vec(0.1, 0.7), v0, 0.0}, 10.0);
  CHECK(fr.max_norm_drift < 1e-8);
  CHECK(fr.steps == 10000);
  CHECK(fr.renormalizations == 10);
}

TEST_CASE("causal character is preserved along pregeodesics") {
  auto m = make_conformally_flat(2, {{0.25, {1, 1, 0}, 0.0}});
  for (Vec v0 : {vec(1.0, 0.0), vec(1.0, 0.6)}) {
    Vec x0 = vec(0.3, 0.2);
    FlowResult fr = integrate_pregeodesic(*m, {x0, normalized(v0), 0.0}, 4.0);
    double q0 = m->g_at(x0)(fr.path.tangent.front(), fr.path.tangent.front());
    REQUIRE(q0 < 0);
    for (std::size_t i = 0; i < fr.path.v.size(); ++i) {
      double q = m->g_at(fr.path.v[i])(fr.path.tangent[i], fr.path.tangent[i]);
      CHECK(q < 0);
    }
  }
}

TEST_CASE("affine geodesic first integral g(v,v) is conserved") {
  auto m = make_conformally_flat(2, {{0.3, {1, 0, 0}, 0.0}});
  SUBCASE("timelike start") {
    FlowResult fr =
        integrate_affine_geodesic(*m, {vec(0.4, 0.1), vec(1.0, 0.3), 0.0}, 5.0);
    CHECK(fr.max_norm_drift < 1e-8);
  }
  SUBCASE("lightlike start stays within 1e-8 of null") {
    Vec x0 = vec(0.4, 0.1);
    FlowResult fr = integrate_affine_geodesic(*m, {x0, vec(1.0, 1.0), 0.0}, 5.0);
    double q = m->g_at(fr.final_state.x)(fr.final_state.v, fr.final_state.v);
    CHECK(std::fabs(q) < 1e-8);
  }
}

TEST_CASE("pregeodesic trace matches the arclength-reparameterized affine "
          "geodesic oracle") {
  std::vector<FourierTerm> terms = {{0.3, {1, 0, 0}, 0.0}, {0.1, {0, 1, 0}, 0.5}};
  auto m = make_conformally_flat(2, terms);
  Vec x0 = vec(0.25, 0.55);
  Vec v0 = normalized(vec(1.0, 0.3));

  FlowOptions fine;
  fine.step = 5e-4;
  FlowResult pre = integrate_pregeodesic(*m, {x0, v0, 0.0}, 5.0, fine);
  FlowResult aff = integrate_affine_geodesic(*m, {x0, v0, 0.0}, 9.0, fine);

  auto arc = cumulative_arclength(aff.path);
  REQUIRE(arc.back() > 5.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < pre.path.v.size(); ++i) {
    double s = pre.path.param[i];
    if (s > 5.0) break;
    worst = std::max(worst, norm(pre.path.v[i] - sample_at_arclength(aff.path, arc, s)));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("flow property: composition of flows") {
  auto m = make_conformally_flat(2, {{0.2, {1, 1, 0}, 0.2}});
  Vec x0 = vec(0.6, 0.15);
  Vec v0 = normalized(vec(1.0, -0.4));
  for (double s : {0.5, 1.0, 2.0}) {
    for (double t : {0.5, 1.5}) {
      FlowResult one = integrate_pregeodesic(*m, {x0, v0, 0.0}, s + t);
      FlowResult first = integrate_pregeodesic(*m, {x0, v0, 0.0}, s);
      FlowState mid = first.final_state;
      mid.v = normalized(mid.v);
      FlowResult second = integrate_pregeodesic(*m, mid, t);
      CHECK(norm(second.final_state.x - one.final_state.x) < 1e-7);
      CHECK(norm(second.final_state.v - one.final_state.v) < 1e-7);
    }
  }
}

TEST_CASE("step underflow and bad tangents are rejected") {
  auto m = make_flat(2);
  FlowOptions tiny;
  tiny.step = 1e-12;
  CHECK_THROWS_AS(integrate_pregeodesic(*m, {vec(0, 0), vec(1, 0), 0.0}, 1.0, tiny),
                  StepUnderflow);
  CHECK_THROWS_AS(integrate_pregeodesic(*m, {vec(0, 0), vec(2, 0), 0.0}, 1.0),
                  InvalidArgument);
}
