#include <cstring>
#include <memory>
#include <string>

#include "core/errors.hpp"
#include "core/lab.hpp"
#include "core/metric.hpp"
#include "core/reach.hpp"
#include "lorentzlab/lorentzlab.h"

using namespace lor;

struct llab_metric {
  std::unique_ptr<MetricField> m;
};

namespace {

thread_local std::string g_last_error = "ok";

llab_status set_error(const std::exception& e, llab_status code) {
  g_last_error = e.what();
  return code;
}

llab_status classify_exceptions() {
  try {
    throw;
  } catch (const ConfigError& e) {
    return set_error(e, LLAB_ERR_CONFIG);
  } catch (const InvalidArgument& e) {
    return set_error(e, LLAB_ERR_CONFIG);
  } catch (const Error& e) {
    return set_error(e, LLAB_ERR_DOMAIN);
  } catch (const std::exception& e) {
    return set_error(e, LLAB_ERR_INTERNAL);
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* llab_version(void) { return "0.1.0"; }

const char* llab_last_error(void) { return g_last_error.c_str(); }

llab_metric* llab_metric_create(const char* config_json) {
  if (!config_json) {
    g_last_error = "config_json is NULL";
    return nullptr;
  }
  try {
    auto h = std::make_unique<llab_metric>();
    h->m = make_metric(config_json);
    return h.release();
  } catch (...) {
    classify_exceptions();
    return nullptr;
  }
}

void llab_metric_free(llab_metric* m) { delete m; }

int llab_metric_dim(const llab_metric* m) { return m ? m->m->dim() : 0; }

llab_status llab_classify(const llab_metric* m, const double p[3],
                          const double v[3], llab_causal_class* out) {
  if (!m || !p || !v || !out) {
    g_last_error = "NULL argument";
    return LLAB_ERR_CONFIG;
  }
  try {
    CausalClass c =
        classify(*m->m, vec(p[0], p[1], p[2]), vec(v[0], v[1], v[2]));
    *out = static_cast<llab_causal_class>(static_cast<int>(c));
    return LLAB_OK;
  } catch (...) {
    return classify_exceptions();
  }
}

llab_status llab_distance(const llab_metric* m, const double p[3],
                          const double q[3], double spacing, double* d,
                          int* reachable) {
  if (!m || !p || !q || !d || !reachable) {
    g_last_error = "NULL argument";
    return LLAB_ERR_CONFIG;
  }
  try {
    ReachOptions opts;
    if (spacing > 0) opts.spacing = spacing;
    opts.want_path = false;
    Prober prober = make_diamond_prober(*m->m, opts);
    ReachResult rr =
        prober(vec(p[0], p[1], p[2]), vec(q[0], q[1], q[2]), false);
    *d = rr.d;
    *reachable = rr.reachable ? 1 : 0;
    return LLAB_OK;
  } catch (...) {
    return classify_exceptions();
  }
}

llab_status llab_run(const char* config_json, char** report_json) {
  if (!config_json) {
    g_last_error = "config_json is NULL";
    return LLAB_ERR_CONFIG;
  }
  try {
    RunResult r = run_experiment(config_json);
    if (report_json) *report_json = dup_string(r.report_json);
    if (r.exit_code == 1) {
      g_last_error = "config error (see report)";
      return LLAB_ERR_CONFIG;
    }
    if (r.exit_code == 2) {
      g_last_error = "assertions failed (see report)";
      return LLAB_ERR_ASSERT;
    }
    return LLAB_OK;
  } catch (...) {
    return classify_exceptions();
  }
}

llab_status llab_emit_plots(const char* out_dir) {
  if (!out_dir) {
    g_last_error = "out_dir is NULL";
    return LLAB_ERR_CONFIG;
  }
  try {
    emit_plots(out_dir);
    return LLAB_OK;
  } catch (...) {
    return classify_exceptions();
  }
}

void llab_string_free(char* s) { delete[] s; }

}  // extern "C"
