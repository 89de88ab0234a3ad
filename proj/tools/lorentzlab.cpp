// Batch front end for the Lorentzian laboratory. Builds an experiment config
// from command-line flags (or a config file), hands it to the shared-library
// C API, and reports results via exit codes:
//   0 = all assertions passed, 1 = usage/config error, 2 = assertion failure.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "lorentzlab/lorentzlab.h"

using nlohmann::json;

namespace {

// "a,b,c" -> [a, b, c]; returns false on any non-numeric token.
bool split_doubles(const std::string& s, std::vector<double>& out) {
  out.clear();
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) return false;
    } catch (...) {
      return false;
    }
  }
  return !out.empty();
}

bool split_ints(const std::string& s, std::vector<int>& out) {
  std::vector<double> d;
  if (!split_doubles(s, d)) return false;
  out.assign(d.begin(), d.end());
  return true;
}

int fail_key(const std::string& key, const std::string& why) {
  std::fprintf(stderr, "config error: %s: %s\n", key.c_str(), why.c_str());
  return 1;
}

const char* kCsvSchemas =
    "Emitted CSV schemas:\n"
    "  path.csv            t,x1,x2,x3\n"
    "  standard_path.csv   t,x1,x2,x3\n"
    "  maximizer.csv       t,x1,x2,x3\n"
    "  lhat_table.csv      h1,h2,h3,lhat,err,N,flag\n"
    "  measure_<i>.csv     cell,p1,p2,p3,d1,d2,d3,weight\n"
    "  holder_scatter.csv  dist_base,dist_tangent\n";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("lorentzlab ") + llab_version() +
               " - torus spacetime experiments"};
  app.footer(kCsvSchemas);

  auto* run = app.add_subcommand("run", "run an experiment task");
  std::string task, metric = "flat2", from_s, to_s, dir_s, lambdas_s, alpha_s;
  std::string schedule_s, out_dir = "out", config_file, homologies_s;
  std::string subtask;
  double eps = 0.01, dx = 0.0, tspan = 0.0, lstar = 0.0, cbar = 0.0;
  int seed = 1, stencil_k = 0, Nwin = 0;
  bool plots = false;
  run->add_option("task", task,
                  "metric-check|geodesic|distance|stable-sep|measures|"
                  "calibrate|hedlund|graph-theorem")
      ->required();
  run->add_option("--config", config_file, "JSON config file (flags override)");
  run->add_option("--metric", metric,
                  "flat2|flat3|conformal2|conformal3|hedlund|boundary2t");
  run->add_option("--lambdas", lambdas_s, "hedlund lambdas a,b,c");
  run->add_option("--eps", eps, "hedlund tube radius");
  run->add_option("--from", from_s, "start point x1,x2[,x3]");
  run->add_option("--to", to_s, "target point x1,x2[,x3]");
  run->add_option("--dir", dir_s, "initial direction (geodesic)");
  run->add_option("--tspan", tspan, "integration span (geodesic)");
  run->add_option("--dx", dx, "reach grid spacing");
  run->add_option("--stencil-k", stencil_k, "reach stencil bound");
  run->add_option("--schedule", schedule_s, "N schedule n1,n2,...");
  run->add_option("--alpha", alpha_s, "covector a1,a2[,a3]");
  run->add_option("--lstar", lstar, "dual stable separation at alpha");
  run->add_option("--Cbar", cbar, "lhat bracket constant");
  run->add_option("--N", Nwin, "measure window multiplier");
  run->add_option("--homologies", homologies_s,
                  "semicolon-separated h vectors, e.g. 1,0,0;0,1,0");
  run->add_option("--task-detail", subtask, "hedlund experiment variant");
  run->add_option("--seed", seed, "sampling seed");
  run->add_option("--out", out_dir, "output directory");
  run->add_flag("--plots", plots, "emit .dat plot files after the run");

  auto* plot_cmd = app.add_subcommand("plots", "emit .dat files for a run");
  std::string plot_dir = "out";
  plot_cmd->add_option("dir", plot_dir, "run output directory");

  CLI11_PARSE(app, argc, argv);

  if (plot_cmd->parsed()) {
    if (llab_emit_plots(plot_dir.c_str()) != LLAB_OK) {
      std::fprintf(stderr, "error: %s\n", llab_last_error());
      return 1;
    }
    return 0;
  }
  if (!run->parsed()) {
    std::fprintf(stderr, "%s\n", app.help().c_str());
    return 1;
  }

  json cfg = json::object();
  if (!config_file.empty()) {
    std::ifstream f(config_file);
    if (!f) return fail_key("config", "cannot open " + config_file);
    cfg = json::parse(f, nullptr, false);
    if (cfg.is_discarded())
      return fail_key("config", "invalid JSON in " + config_file);
  }
  cfg["task"] = task;
  json m = cfg.value("metric", json::object());
  if (metric == "flat2") {
    m["family"] = "flat";
    m["dim"] = 2;
  } else if (metric == "flat3") {
    m["family"] = "flat";
    m["dim"] = 3;
  } else if (metric == "conformal2" || metric == "conformal3") {
    m["family"] = "conformal";
    m["dim"] = metric == "conformal2" ? 2 : 3;
  } else if (metric == "hedlund" || metric == "boundary2t") {
    m["family"] = metric;
  } else {
    return fail_key("metric", "unknown metric '" + metric + "'");
  }
  if (!lambdas_s.empty()) {
    std::vector<double> l;
    if (!split_doubles(lambdas_s, l) || l.size() != 3)
      return fail_key("lambdas", "expected 3 comma-separated numbers");
    m["lambdas"] = l;
  }
  if (m["family"] == "hedlund") m["eps"] = eps;
  cfg["metric"] = m;

  auto put_vec = [&](const std::string& flag, const std::string& key,
                     const std::string& s) -> int {
    if (s.empty()) return 0;
    std::vector<double> v;
    if (!split_doubles(s, v) || v.size() < 1 || v.size() > 3)
      return fail_key(key, "expected 1-3 comma-separated numbers");
    cfg[key] = v;
    (void)flag;
    return 0;
  };
  if (int rc = put_vec("--from", "from", from_s)) return rc;
  if (int rc = put_vec("--to", "to", to_s)) return rc;
  if (int rc = put_vec("--dir", "dir", dir_s)) return rc;
  if (int rc = put_vec("--alpha", "alpha", alpha_s)) return rc;
  if (!schedule_s.empty()) {
    std::vector<int> sch;
    if (!split_ints(schedule_s, sch))
      return fail_key("schedule", "expected comma-separated integers");
    cfg["schedule"] = sch;
  }
  if (!homologies_s.empty()) {
    json hs = json::array();
    std::stringstream ss(homologies_s);
    std::string part;
    while (std::getline(ss, part, ';')) {
      std::vector<double> h;
      if (!split_doubles(part, h))
        return fail_key("homologies", "expected vectors like 1,0,0;0,1,0");
      hs.push_back(h);
    }
    cfg["homologies"] = hs;
  }
  json num = cfg.value("numerics", json::object());
  if (dx > 0) num["spacing"] = dx;
  if (stencil_k > 0) num["stencil_k"] = stencil_k;
  cfg["numerics"] = num;
  if (tspan > 0) cfg["tspan"] = tspan;
  if (lstar > 0) cfg["lstar"] = lstar;
  if (cbar > 0) cfg["Cbar"] = cbar;
  if (Nwin > 0) cfg["N"] = Nwin;
  if (!subtask.empty()) cfg["subtask"] = subtask;
  cfg["seed"] = seed;
  cfg["output"] = {{"dir", out_dir}};

  char* report = nullptr;
  llab_status st = llab_run(cfg.dump().c_str(), &report);
  if (report) {
    std::fputs(report, stdout);
    llab_string_free(report);
  }
  if (st == LLAB_ERR_CONFIG) {
    std::fprintf(stderr, "config error: %s\n", llab_last_error());
    return 1;
  }
  if (st != LLAB_OK && st != LLAB_ERR_ASSERT) {
    std::fprintf(stderr, "error: %s\n", llab_last_error());
    return 2;
  }
  if (plots && llab_emit_plots(out_dir.c_str()) != LLAB_OK)
    std::fprintf(stderr, "plot emission failed: %s\n", llab_last_error());
  return st == LLAB_OK ? 0 : 2;
}
