#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/errors.hpp"
#include "core/hedlund.hpp"
#include "core/metric.hpp"
#include "core/stable.hpp"

using namespace lor;

TEST_CASE("rotation vectors") {
  auto m = make_flat(2);
  auto chord = make_path(*m, {vec(0, 0), vec(2, 1)});
  Vec rv = rotation_vector(chord);
  CHECK(norm(rv - (1.0 / std::sqrt(5.0)) * vec(2, 1)) < 1e-12);

  HedlundMetric hm{HedlundParams{}};
  auto run = make_path(hm, {vec(0, 0, 0), vec(3, 0, 0)});
  CHECK(norm(rotation_vector(run) - vec(1, 0, 0)) < 1e-12);

  CausalPath empty;
  CHECK_THROWS_AS(rotation_vector(empty), ZeroLengthPath);
}

TEST_CASE("cone estimation on the flat 2-torus") {
  auto m = make_flat(2);
  ReachOptions opts;
  opts.spacing = 0.05;
  opts.want_path = false;
  Prober prober = make_diamond_prober(*m, opts);
  ConeEstimate ce = estimate_cone(*m, 64, 3.0, prober);
  CHECK(ce.zero_excluded);
  // Reachable directions lie in the flat future cone t >= |x| (up to grid).
  for (const Vec& u : ce.reachable_dirs) CHECK(u[0] >= std::fabs(u[1]) - 0.15);
  // Strictly interior directions are all recovered.
  int interior = 0, found = 0;
  for (const Vec& u : ce.sampled_dirs) {
    if (u[0] < std::fabs(u[1]) + 0.15) continue;
    ++interior;
    for (const Vec& r : ce.reachable_dirs)
      if (norm(r - u) < 1e-12) ++found;
  }
  CHECK(interior > 10);
  CHECK(found == interior);
}

TEST_CASE("cone estimation on the boundary 2-torus is pos{e1,e2}") {
  auto m = make_boundary_2torus();
  ReachOptions opts;
  opts.spacing = 0.05;
  opts.want_path = false;
  opts.diamond_factor = 0.15;
  opts.diamond_min_radius = 0.75;
  // Near the lightlike boundary directions the grid slope cap is the stencil
  // range, so cone probes use a wider stencil than distance runs, and the
  // permissive margin so lightlike chains (x-travel on the y = 0 light ray)
  // count as reachable.
  opts.stencil_k = 12;
  opts.margin = kPermissiveMargin;
  Prober prober = make_diamond_prober(*m, opts);
  ConeEstimate ce = estimate_cone(*m, 96, 6.0, prober);
  CHECK(ce.zero_excluded);
  CHECK(cone_hausdorff_simplex(ce.reachable_dirs, 2) < 0.15);
}

TEST_CASE("stable separation estimates") {
  SUBCASE("flat torus, h = (2,1) -> sqrt(3)") {
    auto m = make_flat(2);
    ReachOptions opts;
    opts.spacing = 0.02;
    opts.want_path = false;
    Prober prober = make_diamond_prober(*m, opts);
    StableResult sr =
        stable_time_separation(*m, vec(2, 1), {1, 2}, prober, 0.5);
    REQUIRE(sr.in_cone);
    CHECK(sr.N_used == 2);
    CHECK(sr.monotone_ok);
    CHECK(std::fabs(sr.lhat - std::sqrt(3.0)) < 0.02);
    CHECK(sr.lhat <= std::sqrt(3.0) + 1e-9);  // lower-bound estimator
  }
  SUBCASE("flat torus, spacelike h is outside the cone") {
    auto m = make_flat(2);
    ReachOptions opts;
    opts.spacing = 0.05;
    opts.want_path = false;
    Prober prober = make_diamond_prober(*m, opts);
    StableResult sr =
        stable_time_separation(*m, vec(0, 1), {1, 2}, prober, 0.5);
    CHECK_FALSE(sr.in_cone);
    CHECK(sr.lhat == 0.0);
  }
  SUBCASE("Hedlund, h = e1 -> lambda_1 and h = (1,1,1) below sum = 1") {
    HedlundMetric m{HedlundParams{}};
    ReachOptions opts;
    opts.spacing = 0.01;
    Prober prober = make_hedlund_prober(m, opts);
    StableResult s1 = stable_time_separation(m, vec(1, 0, 0), {2, 4}, prober, 2.0);
    REQUIRE(s1.in_cone);
    CHECK(std::fabs(s1.lhat - 0.5) < 0.02);
    StableResult s111 =
        stable_time_separation(m, vec(1, 1, 1), {4}, prober, 2.0);
    REQUIRE(s111.in_cone);
    // d(0, N(1,1,1)) ~ N - 1.5 (jumps eat half a unit of every coordinate).
    CHECK(s111.lhat <= 1.0 + 1e-9);
    CHECK(s111.lhat > 0.55);
  }
}

TEST_CASE("T17 properties and the dual on the Hedlund table") {
  HedlundMetric m{HedlundParams{}};  // lambdas (0.5, 0.3, 0.2)
  ReachOptions opts;
  opts.spacing = 0.01;
  opts.want_path = false;
  Prober prober = make_hedlund_prober(m, opts);
  std::vector<int> schedule = {4};
  StableSepTable table = build_stable_table(
      m, {vec(1, 0, 0), vec(0, 1, 0), vec(0, 0, 1), vec(2, 1, 1), vec(1, 2, 1)},
      schedule, prober, 2.0);
  REQUIRE(table.entries.size() == 5);
  // Along the axes the DP is exact: lhat = lambda_i.
  CHECK(table.entries[0].flag == 1);
  CHECK(std::fabs(table.entries[0].lhat - 0.5) < 1e-9);
  CHECK(std::fabs(table.entries[1].lhat - 0.3) < 1e-9);
  CHECK(std::fabs(table.entries[2].lhat - 0.2) < 1e-9);

  SUBCASE("superadditivity and coarse Lipschitz hold") {
    T17Report rep =
        check_T17_properties(m, table, schedule, prober, 2.0, 2.0, 6, 17);
    CHECK(rep.pairs_checked > 0);
    CHECK(rep.violations == 0);
    CHECK(rep.pass);
    CHECK(rep.worst_superadd >= 0.0);
    CHECK(rep.worst_concavity >= 0.0);
    CHECK(rep.coarse_lipschitz_worst >= 0.0);
  }
  SUBCASE("dual stable separation") {
    Vec alpha = vec(0.5, 0.3, 0.2);
    double d1 = dual_stable(table, alpha);
    CHECK(std::fabs(d1 - 1.0) < 0.05);
    CHECK(std::fabs(dual_stable(table, vec(1.0, 0.3, 0.2)) - 1.0) < 0.05);
    // Exact positive homogeneity of the dual.
    CHECK(dual_stable(table, 2.0 * alpha) == doctest::Approx(2.0 * d1).epsilon(1e-12));
    CHECK_THROWS_AS(dual_stable(table, vec(-0.1, 0.3, 0.2)), NotInDualCone);
  }
}

TEST_CASE("table serialization") {
  StableSepTable t;
  StableEntry e;
  e.h = vec(1, 0, 0);
  e.lhat = 0.5;
  e.err = 0.125;
  e.N_used = 4;
  e.flag = 1;
  t.entries.push_back(e);
  std::string csv = t.to_csv();
  CHECK(csv.find("h1,h2,h3,lhat,err,N,flag") == 0);
  CHECK(csv.find("1,0,0,0.5,0.125,4,1") != std::string::npos);
}

TEST_CASE("conformal bounds: inf f and sup f bracket lhat") {
  auto m = make_conformally_flat(2, {{0.3, {1, 1, 0}, 0.0}});  // f in [0.7,1.3]
  ReachOptions opts;
  opts.spacing = 0.025;
  opts.want_path = false;
  Prober prober = make_diamond_prober(*m, opts);
  for (Vec h : {vec(1, 0), vec(2, 1)}) {
    StableResult sr = stable_time_separation(*m, h, {2, 4}, prober, 1.0);
    REQUIRE(sr.in_cone);
    double flat = std::sqrt(std::fabs(h[0] * h[0] - h[1] * h[1]));
    CHECK(sr.lhat >= 0.7 * flat - sr.err);
    CHECK(sr.lhat <= 1.3 * flat + 0.02);
  }
}
