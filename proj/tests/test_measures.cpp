#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/errors.hpp"
#include "core/hedlund.hpp"
#include "core/measures.hpp"
#include "core/metric.hpp"

using namespace lor;

TEST_CASE("direction binning") {
  Cellization c;
  SUBCASE("the 3d bins are a 320-face sphere subdivision") {
    const auto& centers = direction_bin_centers(3, c);
    CHECK(centers.size() == 320);
    for (const Vec& u : centers) CHECK(norm(u) == doctest::Approx(1.0));
    // Binning maps each center to itself.
    for (int i = 0; i < 320; i += 17)
      CHECK(direction_bin(centers[std::size_t(i)], 3, c) == i);
  }
  SUBCASE("2d angle bins partition the circle") {
    CHECK(direction_bin_centers(2, c).size() == 256);
    CHECK(direction_bin(vec(1, 0), 2, c) == 128);  // phi = 0 maps mid-range
    CHECK(direction_bin(vec(-1, -1e-9), 2, c) == 0);
  }
}

TEST_CASE("occupation measures of line runs") {
  HedlundMetric m{HedlundParams{}};
  Cellization c;
  auto run = make_path(m, {vec(0, 0, 0), vec(3, 0, 0)});
  OccupationMeasure mu = occupation_measure(run, c, 3);
  SUBCASE("single direction bin, mass 1") {
    int bin = direction_bin(vec(1, 0, 0), 3, c);
    double mass = 0.0;
    for (const auto& [key, cell] : mu.hist) {
      CHECK(int(key % 320) == bin);
      CHECK(norm(cell.direction() - vec(1, 0, 0)) < 1e-12);
      mass += cell.weight;
    }
    CHECK(mass == doctest::Approx(1.0));
    CHECK(mu.window == doctest::Approx(3.0));
  }
  SUBCASE("rotation class and average length") {
    CHECK(norm(rotation_class(mu) - vec(1, 0, 0)) < 1e-12);
    CHECK(average_length(m, mu) == doctest::Approx(0.5).epsilon(1e-9));
  }
  SUBCASE("a loop traversed twice gives the same probability measure") {
    auto twice = make_path(m, {vec(0, 0, 0), vec(6, 0, 0)});
    OccupationMeasure mu2 = occupation_measure(twice, c, 3);
    REQUIRE(mu2.hist.size() == mu.hist.size());
    for (const auto& [key, cell] : mu.hist) {
      auto it = mu2.hist.find(key);
      REQUIRE(it != mu2.hist.end());
      CHECK(it->second.weight == doctest::Approx(cell.weight).epsilon(1e-9));
    }
  }
  SUBCASE("empty paths are rejected") {
    CausalPath none;
    CHECK_THROWS_AS(occupation_measure(none, c, 3), EmptyPath);
  }
}

TEST_CASE("mixtures are linear in rho and L") {
  HedlundMetric m{HedlundParams{}};
  Cellization c;
  auto r1 = make_path(m, {vec(0, 0, 0), vec(2, 0, 0)});
  auto r2 = make_path(m, {vec(0, 0, 0.5), vec(0, 2, 0.5)});
  OccupationMeasure m1 = occupation_measure(r1, c, 3);
  OccupationMeasure m2 = occupation_measure(r2, c, 3);
  OccupationMeasure mixed = mix({{0.3, m1}, {0.7, m2}});
  Vec rho = rotation_class(mixed);
  CHECK(norm(rho - (0.3 * vec(1, 0, 0) + 0.7 * vec(0, 1, 0))) < 1e-12);
  double L = average_length(m, mixed);
  CHECK(L == doctest::Approx(0.3 * 0.5 + 0.7 * 0.3).epsilon(1e-9));
  CHECK(mixed.total_mass == doctest::Approx(1.0));
}

TEST_CASE("lightlike measures have zero average length") {
  auto m = make_flat(2);
  Cellization c;
  auto light = make_path(*m, {vec(0, 0), vec(2, 2)});
  OccupationMeasure mu = occupation_measure(light, c, 2);
  CHECK(average_length(*m, mu) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("spacelike cells are rejected") {
  auto m = make_flat(2);
  OccupationMeasure mu;
  mu.dim = 2;
  MeasureCell cell;
  cell.weight = 1.0;
  cell.pos_sum = vec(0.5, 0.5);
  cell.dir_sum = vec(0, 1);  // spacelike direction
  mu.hist[0] = cell;
  CHECK_THROWS_AS(average_length(*m, mu), NonCausalCell);
}

TEST_CASE("invariance defects of window measures") {
  HedlundMetric m{HedlundParams{}};
  Cellization c;
  auto f = [](const Vec& x) { return std::sin(2 * M_PI * x[0]) / (2 * M_PI); };
  for (double T : {10.0, 20.0, 40.0}) {
    auto run = make_path(m, {vec(0.25, 0, 0), vec(0.25 + T, 0, 0)});
    OccupationMeasure mu = occupation_measure(run, c, 3);
    CHECK(std::fabs(invariance_defect(mu, f)) <= 2.0 / T + 1e-6);
  }
  SUBCASE("constant test functions give zero exactly") {
    auto run = make_path(m, {vec(0, 0, 0), vec(5, 0, 0)});
    OccupationMeasure mu = occupation_measure(run, c, 3);
    CHECK(invariance_defect(mu, [](const Vec&) { return 3.7; }) == 0.0);
  }
  SUBCASE("a closed loop has vanishing defect up to quadrature") {
    auto run = make_path(m, {vec(0, 0, 0), vec(8, 0, 0)});  // homology 8 e1
    OccupationMeasure mu = occupation_measure(run, c, 3);
    CHECK(std::fabs(invariance_defect(mu, f)) < 1e-6);
  }
}

TEST_CASE("maximal measures at fixed homology") {
  SUBCASE("Hedlund h = e_i: disjoint supports and L = lambda_i") {
    HedlundMetric m{HedlundParams{}};
    ReachOptions opts;
    opts.spacing = 0.01;
    Prober prober = make_hedlund_prober(m, opts);
    Cellization c;
    MaximalMeasureResult r1 = find_maximal_measure(m, vec(1, 0, 0), 2, prober, c);
    MaximalMeasureResult r2 = find_maximal_measure(m, vec(0, 1, 0), 2, prober, c);
    MaximalMeasureResult r3 = find_maximal_measure(m, vec(0, 0, 1), 2, prober, c);
    CHECK(r1.L == doctest::Approx(0.5).epsilon(0.02));
    CHECK(r2.L == doctest::Approx(0.3).epsilon(0.02));
    CHECK(r3.L == doctest::Approx(0.2).epsilon(0.02));
    CHECK(std::fabs(r1.gap) < 0.02);
    CHECK(disjoint_support(r1.mu, r2.mu));
    CHECK(disjoint_support(r1.mu, r3.mu));
    CHECK(disjoint_support(r2.mu, r3.mu));
    // rho(mu) = h after rescaling.
    CHECK(norm(rotation_class(r1.mu) - vec(1, 0, 0)) < 1e-9);
  }
  SUBCASE("flat torus h = (2,1): L = sqrt(3)") {
    auto m = make_flat(2);
    ReachOptions opts;
    opts.spacing = 0.02;
    Prober prober = make_diamond_prober(*m, opts);
    Cellization c;
    MaximalMeasureResult r = find_maximal_measure(*m, vec(2, 1), 2, prober, c);
    CHECK(r.lhat == doctest::Approx(std::sqrt(3.0)).epsilon(0.01));
    CHECK(r.L <= r.lhat + 1e-9);
    CHECK(std::fabs(r.gap) < 0.05);
  }
  SUBCASE("outside directions throw") {
    auto m = make_flat(2);
    ReachOptions opts;
    opts.spacing = 0.05;
    Prober prober = make_diamond_prober(*m, opts);
    Cellization c;
    CHECK_THROWS_AS(find_maximal_measure(*m, vec(0, 1), 2, prober, c),
                    OutsideCone);
  }
}

TEST_CASE("measure serialization") {
  HedlundMetric m{HedlundParams{}};
  Cellization c;
  auto run = make_path(m, {vec(0, 0, 0), vec(1, 0, 0)});
  OccupationMeasure mu = occupation_measure(run, c, 3);
  std::string csv = mu.to_csv();
  CHECK(csv.find("cell,p1,p2,p3,d1,d2,d3,weight") == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == int(mu.hist.size()) + 1);
}
