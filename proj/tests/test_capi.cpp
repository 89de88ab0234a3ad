#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>

#include "lorentzlab/lorentzlab.h"

TEST_CASE("metric handles") {
  llab_metric* m = llab_metric_create("{\"family\": \"flat\", \"dim\": 2}");
  REQUIRE(m != nullptr);
  CHECK(llab_metric_dim(m) == 2);

  double p[3] = {0, 0, 0};
  double timelike[3] = {1, 0, 0};
  double spacelike[3] = {0, 1, 0};
  llab_causal_class c;
  CHECK(llab_classify(m, p, timelike, &c) == LLAB_OK);
  CHECK(c == LLAB_TIMELIKE_FUTURE);
  CHECK(llab_classify(m, p, spacelike, &c) == LLAB_OK);
  CHECK(c == LLAB_SPACELIKE);

  double q[3] = {2, 1, 0};
  double d = 0;
  int reach = 0;
  CHECK(llab_distance(m, p, q, 0.02, &d, &reach) == LLAB_OK);
  CHECK(reach == 1);
  CHECK(d == doctest::Approx(std::sqrt(3.0)).epsilon(0.01));
  llab_metric_free(m);
}

TEST_CASE("error reporting") {
  CHECK(llab_metric_create("{\"family\": \"nope\"}") == nullptr);
  CHECK(std::strlen(llab_last_error()) > 0);
  CHECK(llab_metric_create(nullptr) == nullptr);
  double d;
  int r;
  CHECK(llab_distance(nullptr, nullptr, nullptr, 0, &d, &r) ==
        LLAB_ERR_CONFIG);
  CHECK(llab_emit_plots("/nonexistent/dir") != LLAB_OK);
}

TEST_CASE("experiment runner") {
  auto dir = std::filesystem::temp_directory_path() / "capi_run";
  std::filesystem::remove_all(dir);
  std::string cfg =
      "{\"metric\": {\"family\": \"flat\", \"dim\": 2}, \"task\": "
      "\"distance\", \"from\": [0, 0], \"to\": [2, 1], \"numerics\": "
      "{\"spacing\": 0.02}, \"output\": {\"dir\": \"" +
      dir.string() + "\"}}";
  char* report = nullptr;
  CHECK(llab_run(cfg.c_str(), &report) == LLAB_OK);
  REQUIRE(report != nullptr);
  CHECK(std::string(report).find("dhat") != std::string::npos);
  llab_string_free(report);
  CHECK(llab_emit_plots(dir.string().c_str()) == LLAB_OK);

  CHECK(llab_run("{\"task\": \"distance\"}", nullptr) == LLAB_ERR_CONFIG);
  CHECK(llab_run(nullptr, nullptr) == LLAB_ERR_CONFIG);
  CHECK(std::string(llab_version()).size() > 0);
}
