#ifndef LORENTZLAB_H
#define LORENTZLAB_H

/* C interface to the Lorentzian laboratory core: opaque metric handles,
 * causal classification, time-separation queries, and the experiment runner.
 * All functions return a status code; llab_last_error() describes the most
 * recent failure on the calling thread. */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  LLAB_OK = 0,
  LLAB_ERR_CONFIG = 1,   /* bad configuration / arguments */
  LLAB_ERR_ASSERT = 2,   /* task ran but an assertion failed */
  LLAB_ERR_DOMAIN = 3,   /* domain error (non-causal input, outside cone, ...) */
  LLAB_ERR_INTERNAL = 4
} llab_status;

typedef enum {
  LLAB_TIMELIKE_FUTURE = 0,
  LLAB_TIMELIKE_PAST = 1,
  LLAB_LIGHTLIKE_FUTURE = 2,
  LLAB_LIGHTLIKE_PAST = 3,
  LLAB_SPACELIKE = 4,
  LLAB_ZERO = 5
} llab_causal_class;

typedef struct llab_metric llab_metric;

const char* llab_version(void);

/* Thread-local description of the last error; never NULL. */
const char* llab_last_error(void);

/* Metric from a JSON config {"family": "flat|conformal|hedlund|boundary2t",
 * ...}; NULL on failure. */
llab_metric* llab_metric_create(const char* config_json);
void llab_metric_free(llab_metric* m);
int llab_metric_dim(const llab_metric* m);

/* Causal class of the tangent vector v at base point p (components beyond the
 * metric dimension are ignored). */
llab_status llab_classify(const llab_metric* m, const double p[3],
                          const double v[3], llab_causal_class* out);

/* Lower-bound time separation estimate between cover points. spacing <= 0
 * selects the default grid. *reachable is 0/1; *d is 0 when unreachable. */
llab_status llab_distance(const llab_metric* m, const double p[3],
                          const double q[3], double spacing, double* d,
                          int* reachable);

/* Runs an experiment config (see the CLI docs for the schema). The report
 * JSON is heap-allocated into *report_json (free with llab_string_free).
 * Returns LLAB_OK on pass, LLAB_ERR_CONFIG on config errors, LLAB_ERR_ASSERT
 * when the task ran but failed its assertions. */
llab_status llab_run(const char* config_json, char** report_json);

/* Converts a finished run's CSV artifacts into .dat plot files. */
llab_status llab_emit_plots(const char* out_dir);

void llab_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* LORENTZLAB_H */
