#pragma once

// Experiment orchestration: structured configs in, report.json + CSV/plot
// artifacts out. Fixed seeds make reruns bit-identical; the worker pool size
// (LORENTZ_THREADS) never changes results, only wall time.

#include <cstddef>
#include <functional>
#include <string>

namespace lor {

// Worker pool size: LORENTZ_THREADS when set, hardware concurrency otherwise.
int lab_thread_count();

// Index-parallel loop with deterministic (index-slot) result aggregation.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

struct RunResult {
  int exit_code = 0;        // 0 pass, 1 config/usage error, 2 assertion failure
  std::string report_json;  // what was (or would have been) written
};

// Executes the task described by the config JSON:
//   { "metric": {family, ...}, "task": "...", "numerics": {...},
//     "seed": n, "output": {"dir": ...}, ...task keys }
// Writes report.json and task CSVs into the output directory.
RunResult run_experiment(const std::string& config_json);

// Converts a run's CSV artifacts into gnuplot-ready .dat files; throws
// MissingReport when the directory has no report.json.
void emit_plots(const std::string& out_dir);

}  // namespace lor
