#include "lab.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <thread>
#include <vector>

#include "calibrate.hpp"
#include "errors.hpp"
#include "flow.hpp"
#include "graphcheck.hpp"
#include "hedlund.hpp"
#include "measures.hpp"
#include "metric.hpp"
#include "path.hpp"
#include "reach.hpp"
#include "stable.hpp"

namespace lor {

using nlohmann::json;

// ------------------------------------------------------------- worker pool

int lab_thread_count() {
  if (const char* env = std::getenv("LORENTZ_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? int(hw) : 1;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  int workers = std::min<std::size_t>(lab_thread_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

// ------------------------------------------------------------ config access

namespace {

Vec json_vec(const json& a, const std::string& key) {
  if (!a.is_array() || a.size() < 1 || a.size() > 3)
    throw ConfigError("config key " + key + ": expected 1-3 numbers");
  Vec v = vec(0, 0, 0);
  for (std::size_t i = 0; i < a.size(); ++i) v[i] = a[i].get<double>();
  return v;
}

json vec_json(const Vec& v, int dim) {
  json a = json::array();
  for (int i = 0; i < dim; ++i) a.push_back(v[i]);
  return a;
}

double positive(const json& j, const std::string& key, double defval) {
  double v = j.value(key, defval);
  if (!(v > 0.0)) throw ConfigError("config key " + key + ": must be positive");
  return v;
}

struct Context {
  json cfg;
  std::unique_ptr<MetricField> metric;
  const HedlundMetric* hedlund = nullptr;  // non-null for the hedlund family
  ReachOptions reach;
  std::uint64_t seed = 1;
  std::filesystem::path out;
  double tolerance = 1e-6;

  Prober prober() const {
    return hedlund ? make_hedlund_prober(*hedlund, reach)
                   : make_diamond_prober(*metric, reach);
  }
  void write(const std::string& name, const std::string& text) const {
    std::ofstream f(out / name);
    f << text;
  }
};

Context make_context(const std::string& config_json) {
  Context ctx;
  try {
    ctx.cfg = json::parse(config_json);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!ctx.cfg.contains("metric"))
    throw ConfigError("config missing key: metric");
  if (!ctx.cfg.contains("task")) throw ConfigError("config missing key: task");
  ctx.metric = make_metric(ctx.cfg["metric"].dump());
  ctx.hedlund = dynamic_cast<const HedlundMetric*>(ctx.metric.get());
  json num = ctx.cfg.value("numerics", json::object());
  ctx.reach.spacing = positive(num, "spacing", ctx.hedlund ? 0.025 : 0.02);
  ctx.reach.stencil_k = int(positive(num, "stencil_k", 5));
  ctx.tolerance = positive(num, "tolerance", 1e-6);
  ctx.seed = ctx.cfg.value("seed", 1);
  json outp = ctx.cfg.value("output", json::object());
  ctx.out = outp.value("dir", std::string("out"));
  std::filesystem::create_directories(ctx.out);
  return ctx;
}

std::string path_csv(const CausalPath& p, int dim) {
  std::ostringstream os;
  os.precision(12);
  os << "t,x1,x2,x3\n";
  for (std::size_t i = 0; i < p.v.size(); ++i) {
    os << p.param[i];
    for (int a = 0; a < 3; ++a) os << "," << (a < dim ? p.v[i][a] : 0.0);
    os << "\n";
  }
  return os.str();
}

// ----------------------------------------------------------------- tasks

json task_metric_check(Context& ctx) {
  json r;
  r["family"] = ctx.metric->family();
  r["dim"] = ctx.metric->dim();
  std::mt19937_64 rng(ctx.seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  int future = 0, total = 400;
  for (int i = 0; i < total; ++i) {
    Vec p = vec(uni(rng), uni(rng), ctx.metric->dim() == 3 ? uni(rng) : 0.0);
    Vec v = sample_causal_vector(ctx.metric->g_at(p), ctx.metric->orient(p),
                                 ctx.metric->dim(), rng, 1.0);
    CausalClass c = classify(*ctx.metric, p, v);
    if (c == CausalClass::TimelikeFuture || c == CausalClass::LightlikeFuture)
      ++future;
  }
  r["causal_samples"] = total;
  r["future_classified"] = future;
  bool pass = future == total;
  if (ctx.hedlund) {
    HedlundVerifyReport v =
        verify_hedlund(*ctx.metric, ctx.hedlund->params(), 2000, ctx.seed);
    r["hedlund_verify"] = {{"pass_i", v.pass_i},
                           {"pass_ii", v.pass_ii},
                           {"pass_iii", v.pass_iii},
                           {"equality_on_lines", v.equality_on_lines},
                           {"worst_i", v.worst_i},
                           {"worst_ii", v.worst_ii},
                           {"worst_iii", v.worst_iii}};
    pass = pass && v.pass();
  }
  r["pass"] = pass;
  return r;
}

json task_geodesic(Context& ctx) {
  if (!ctx.cfg.contains("from")) throw ConfigError("config missing key: from");
  if (!ctx.cfg.contains("dir")) throw ConfigError("config missing key: dir");
  FlowState s0;
  s0.x = json_vec(ctx.cfg["from"], "from");
  s0.v = normalized(json_vec(ctx.cfg["dir"], "dir"));
  double tspan = positive(ctx.cfg, "tspan", 5.0);
  FlowOptions fo;
  fo.step = positive(ctx.cfg.value("numerics", json::object()), "rk_step", 1e-3);
  FlowResult fr = integrate_pregeodesic(*ctx.metric, s0, tspan, fo);
  ctx.write("path.csv", path_csv(fr.path, ctx.metric->dim()));
  json r;
  r["steps"] = fr.steps;
  r["max_norm_drift"] = fr.max_norm_drift;
  r["final"] = vec_json(fr.final_state.x, ctx.metric->dim());
  r["pass"] = fr.max_norm_drift < 1e-6;
  return r;
}

json task_distance(Context& ctx) {
  if (!ctx.cfg.contains("from")) throw ConfigError("config missing key: from");
  if (!ctx.cfg.contains("to")) throw ConfigError("config missing key: to");
  Vec p = json_vec(ctx.cfg["from"], "from");
  Vec q = json_vec(ctx.cfg["to"], "to");
  ReachResult rr = ctx.prober()(p, q, true);
  if (!rr.path.empty())
    ctx.write("path.csv", path_csv(rr.path, ctx.metric->dim()));
  json r;
  r["reachable"] = rr.reachable;
  r["dhat"] = rr.d;
  r["spacing"] = ctx.reach.spacing;
  r["stencil_k"] = ctx.reach.stencil_k;
  r["nodes_expanded"] = rr.nodes_expanded;
  r["pass"] = rr.reachable;
  return r;
}

json task_stable_sep(Context& ctx) {
  std::vector<Vec> dirs;
  if (ctx.cfg.contains("directions")) {
    for (const auto& d : ctx.cfg["directions"])
      dirs.push_back(normalized(json_vec(d, "directions")));
  } else if (ctx.metric->dim() == 2) {
    for (int a = -40; a <= 40; a += 10)
      dirs.push_back(vec(std::cos(a * M_PI / 180.0), std::sin(a * M_PI / 180.0)));
  } else {
    dirs = {vec(1, 0, 0), vec(0, 1, 0), vec(0, 0, 1),
            normalized(vec(1, 1, 1)), normalized(vec(2, 1, 1)),
            normalized(vec(1, 2, 1))};
  }
  std::vector<int> schedule;
  if (ctx.cfg.contains("schedule"))
    for (const auto& n : ctx.cfg["schedule"]) schedule.push_back(n.get<int>());
  else
    schedule = ctx.hedlund ? std::vector<int>{2, 4} : std::vector<int>{2, 4, 8};
  double Cbar = positive(ctx.cfg, "Cbar", 1.0);
  Prober prober = ctx.prober();
  // Worker pool over directions; per-index slots keep results thread-count
  // independent.
  StableSepTable table;
  table.entries.resize(dirs.size());
  parallel_for(dirs.size(), [&](std::size_t i) {
    StableSepTable one =
        build_stable_table(*ctx.metric, {dirs[i]}, schedule, prober, Cbar);
    table.entries[i] = one.entries.front();
  });
  ctx.write("lhat_table.csv", table.to_csv());
  json r;
  json ents = json::array();
  for (const StableEntry& e : table.entries)
    ents.push_back({{"h", vec_json(e.h, ctx.metric->dim())},
                    {"lhat", e.lhat},
                    {"err", e.err},
                    {"N", e.N_used},
                    {"flag", e.flag}});
  r["entries"] = ents;
  if (ctx.cfg.contains("alpha")) {
    Vec alpha = json_vec(ctx.cfg["alpha"], "alpha");
    try {
      r["dual_lstar"] = dual_stable(table, alpha);
    } catch (const NotInDualCone& e) {
      r["dual_lstar_error"] = e.what();
    }
  }
  bool any = false;
  for (const StableEntry& e : table.entries) any = any || e.flag == 1;
  r["pass"] = any;
  return r;
}

json task_measures(Context& ctx) {
  std::vector<Vec> hs;
  if (ctx.cfg.contains("homologies"))
    for (const auto& h : ctx.cfg["homologies"])
      hs.push_back(json_vec(h, "homologies"));
  else if (ctx.metric->dim() == 3)
    hs = {vec(1, 0, 0), vec(0, 1, 0), vec(0, 0, 1)};
  else
    hs = {vec(1, 0), vec(2, 1)};
  int N = int(positive(ctx.cfg, "N", 2));
  Cellization cells;
  Prober prober = ctx.prober();
  std::vector<MaximalMeasureResult> res(hs.size());
  std::vector<std::string> errors(hs.size());
  parallel_for(hs.size(), [&](std::size_t i) {
    try {
      res[i] = find_maximal_measure(*ctx.metric, hs[i], N, prober, cells);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });
  json r;
  json ms = json::array();
  bool pass = true;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    json e;
    e["h"] = vec_json(hs[i], ctx.metric->dim());
    if (!errors[i].empty()) {
      e["error"] = errors[i];
      pass = false;
    } else {
      e["L"] = res[i].L;
      e["lhat"] = res[i].lhat;
      e["gap"] = res[i].gap;
      e["cells"] = res[i].mu.hist.size();
      char name[32];
      std::snprintf(name, sizeof name, "measure_%zu.csv", i);
      ctx.write(name, res[i].mu.to_csv());
    }
    ms.push_back(e);
  }
  json dis = json::array();
  for (std::size_t i = 0; i < hs.size(); ++i)
    for (std::size_t j = i + 1; j < hs.size(); ++j)
      if (errors[i].empty() && errors[j].empty())
        dis.push_back({{"i", i},
                       {"j", j},
                       {"disjoint", disjoint_support(res[i].mu, res[j].mu)}});
  r["measures"] = ms;
  r["disjointness"] = dis;
  r["pass"] = pass;
  return r;
}

json task_calibrate(Context& ctx) {
  Vec alpha;
  if (ctx.cfg.contains("alpha"))
    alpha = json_vec(ctx.cfg["alpha"], "alpha");
  else if (ctx.hedlund)
    alpha = vec(ctx.hedlund->lambda(1), ctx.hedlund->lambda(2),
                ctx.hedlund->lambda(3));
  else
    alpha = vec(1, 0, 0);
  double lstar = positive(ctx.cfg, "lstar", 1.0);
  double l = positive(ctx.cfg, "l", 1.0);
  int pairs = int(positive(ctx.cfg, "pairs", 16));
  Calibration cal = make_linear_calibration(alpha, lstar);
  PseudoTimeReport pt =
      is_pseudo_time(*ctx.metric, cal, l, pairs, ctx.seed, ctx.prober());
  DualityReport du = duality_check(*ctx.metric, alpha, lstar, 2);
  json r;
  r["alpha"] = vec_json(alpha, ctx.metric->dim());
  r["lstar"] = lstar;
  r["pseudo_time"] = {{"pairs", pt.pairs},
                      {"violations", pt.violations},
                      {"worst_margin", pt.worst_margin},
                      {"eps_hat", pt.eps_hat},
                      {"pass", pt.pass}};
  r["duality"] = {{"best_linf", du.best_linf},
                  {"one_sided_ok", du.one_sided_ok},
                  {"gap", du.gap},
                  {"representatives_tried", du.tried_linf.size()}};
  r["pass"] = pt.pass && du.one_sided_ok;
  return r;
}

json task_hedlund(Context& ctx) {
  if (!ctx.hedlund) throw ConfigError("config key metric: task hedlund needs the hedlund family");
  const HedlundMetric& m = *ctx.hedlund;
  Vec p = ctx.cfg.contains("from") ? json_vec(ctx.cfg["from"], "from")
                                   : vec(0, 0, 0);
  Vec q = ctx.cfg.contains("to") ? json_vec(ctx.cfg["to"], "to")
                                 : vec(3, 2, 2.5);
  CausalPath sp = standard_path(m, p, q);
  ctx.write("standard_path.csv", path_csv(sp, 3));
  ReachResult rr = ctx.prober()(p, q, true);
  json r;
  r["standard_Lg"] = sp.Lg;
  r["F30_slack"] = check_F30(m, sp);
  r["L31_slack"] = check_L31(m, sp);
  r["eps_prime"] = hedlund_eps_prime(m, 2000, ctx.seed);
  bool pass = check_F30(m, sp) >= 0 && check_L31(m, sp) >= 0;
  if (rr.reachable && !rr.path.empty()) {
    ctx.write("maximizer.csv", path_csv(rr.path, 3));
    double shadow = shadowing_check(m, rr.path);
    TubePartition tp = count_tube_changes(m, rr.path);
    r["dhat"] = rr.d;
    r["shadowing_dist"] = shadow;
    r["tube_changes"] = tp.tube_changes;
    double bound = 12.0 * m.eps() + 2.0 * ctx.reach.spacing;
    r["shadowing_bound"] = bound;
    pass = pass && shadow <= bound && tp.tube_changes <= 6;
  }
  r["pass"] = pass;
  return r;
}

json task_graph_theorem(Context& ctx) {
  L20aReport l20a = lemma20a_check(*ctx.metric, 2000, ctx.seed);
  GainBattery bat;
  if (ctx.metric->dim() == 2) bat = crossing_battery(*ctx.metric, 60, ctx.seed);
  std::vector<double> deltas = {1e-1, 1e-2, 1e-3, 1e-4};
  R20Ladder lad = r20_ladder(deltas);
  ctx.write("holder_scatter.csv", holder_scatter_csv(r20_family(1e-2)));
  json r;
  r["lemma20a"] = {{"eps_tilde", l20a.eps_tilde},
                   {"C_tilde", l20a.C_tilde},
                   {"pairs", l20a.pairs},
                   {"pass", l20a.pass}};
  if (ctx.metric->dim() == 2)
    r["crossing"] = {{"configs", bat.configs},
                     {"min_gain_ratio", bat.min_gain_ratio},
                     {"pass", bat.pass}};
  r["holder_exponent"] = lad.exponent;
  bool pass = l20a.pass && std::fabs(lad.exponent - 0.5) <= 0.05 &&
              (ctx.metric->dim() != 2 || bat.pass);
  r["pass"] = pass;
  return r;
}

}  // namespace

// ------------------------------------------------------------------- run

RunResult run_experiment(const std::string& config_json) {
  json report;
  RunResult out;
  try {
    Context ctx = make_context(config_json);
    std::string task = ctx.cfg["task"].get<std::string>();
    report["task"] = task;
    report["config"] = ctx.cfg;
    json r;
    if (task == "metric-check")
      r = task_metric_check(ctx);
    else if (task == "geodesic")
      r = task_geodesic(ctx);
    else if (task == "distance")
      r = task_distance(ctx);
    else if (task == "stable-sep")
      r = task_stable_sep(ctx);
    else if (task == "measures")
      r = task_measures(ctx);
    else if (task == "calibrate")
      r = task_calibrate(ctx);
    else if (task == "hedlund")
      r = task_hedlund(ctx);
    else if (task == "graph-theorem")
      r = task_graph_theorem(ctx);
    else
      throw ConfigError("config key task: unknown task '" + task + "'");
    report["results"] = r;
    report["tolerances"] = {{"spacing", ctx.reach.spacing},
                            {"tolerance", ctx.tolerance}};
    bool pass = r.value("pass", false);
    report["pass"] = pass;
    out.exit_code = pass ? 0 : 2;
    out.report_json = report.dump(2) + "\n";
    ctx.write("report.json", out.report_json);
  } catch (const ConfigError& e) {
    report["error"] = e.what();
    out.exit_code = 1;
    out.report_json = report.dump(2) + "\n";
  } catch (const Error& e) {
    report["error"] = e.what();
    out.exit_code = 2;
    out.report_json = report.dump(2) + "\n";
  }
  return out;
}

// ------------------------------------------------------------- emit_plots

namespace {

// CSV (with a header line) to whitespace-separated .dat.
void csv_to_dat(const std::filesystem::path& csv,
                const std::filesystem::path& dat) {
  std::ifstream in(csv);
  if (!in) return;
  std::ofstream outf(dat);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    for (char& c : line)
      if (c == ',') c = ' ';
    outf << (first ? "# " : "") << line << "\n";
    first = false;
  }
}

}  // namespace

void emit_plots(const std::string& out_dir) {
  std::filesystem::path dir(out_dir);
  std::ifstream rep(dir / "report.json");
  if (!rep) throw MissingReport("no report.json in " + out_dir);
  json report = json::parse(rep, nullptr, false);
  if (report.is_discarded())
    throw MissingReport("unreadable report.json in " + out_dir);
  csv_to_dat(dir / "path.csv", dir / "path.dat");
  csv_to_dat(dir / "standard_path.csv", dir / "standard_path.dat");
  csv_to_dat(dir / "maximizer.csv", dir / "maximizer.dat");
  csv_to_dat(dir / "lhat_table.csv", dir / "lhat_fan.dat");
  // Holder scatter in log-log coordinates.
  std::ifstream hs(dir / "holder_scatter.csv");
  if (hs) {
    std::ofstream outf(dir / "holder_scatter.dat");
    outf << "# log10_dist_base log10_dist_tangent\n";
    std::string line;
    std::getline(hs, line);  // header
    while (std::getline(hs, line)) {
      auto comma = line.find(',');
      if (comma == std::string::npos) continue;
      double db = std::atof(line.substr(0, comma).c_str());
      double dv = std::atof(line.substr(comma + 1).c_str());
      if (db > 0 && dv > 0)
        outf << std::log10(db) << " " << std::log10(dv) << "\n";
    }
  }
}

}  // namespace lor
