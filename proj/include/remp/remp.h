/* remp.h: C interface to the entity-resolution engine.
 *
 * Every function returning remp_status leaves a message for the calling
 * thread in remp_last_error() when it fails. Handles are opaque and must be
 * released with the matching *_free function.
 */
#ifndef REMP_REMP_H
#define REMP_REMP_H

#include <stddef.h>

#if defined(_WIN32)
#define REMP_API __declspec(dllexport)
#else
#define REMP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum remp_status {
  REMP_OK = 0,
  REMP_ERR_INVALID_ARGUMENT = 1,
  REMP_ERR_IO = 2,
  REMP_ERR_CONFIG = 3,
  REMP_ERR_STATE = 4,
  REMP_ERR_INTERNAL = 5
} remp_status;

typedef struct remp_config remp_config;
typedef struct remp_engine remp_engine;

typedef struct remp_metrics {
  double precision;
  double recall;
  double f1;
  size_t predicted;
  size_t gold;
  size_t true_positives;
} remp_metrics;

typedef struct remp_report {
  remp_metrics metrics; /* zero when no gold standard was given */
  int has_gold;
  double reduction_ratio;
  double pair_completeness;
  size_t candidates;
  size_t retained;
  size_t questions;
  size_t loops;
  size_t matches;
  const char* stop_reason; /* static string */
} remp_report;

REMP_API const char* remp_version(void);
/* Message of the last failed call on this thread, "" if none. */
REMP_API const char* remp_last_error(void);

REMP_API remp_status remp_config_new(remp_config** out);
REMP_API void remp_config_free(remp_config* config);
/* Keys: kb1_attrs kb1_rels kb2_attrs kb2_rels gold workers out label_log
 * dump_dir label_attr1 label_attr2 mode(sim|serve) t_label s_min k tau mu
 * budget error_rate assignments seed psi t_hi t_lo all_subsets
 * max_enumerated. */
REMP_API remp_status remp_config_set(remp_config* config, const char* key, const char* value);

/* Loads both KBs and runs candidate generation, attribute matching and
 * pruning. The config is copied. */
REMP_API remp_status remp_engine_new(const remp_config* config, remp_engine** out);
REMP_API void remp_engine_free(remp_engine* engine);

/* Runs the whole loop with simulated workers. */
REMP_API remp_status remp_engine_run(remp_engine* engine, remp_report* report);

/* Starts the labeling API on host:port (0 picks a free port) and runs the
 * loop on a background thread. static_dir may be NULL. */
REMP_API remp_status remp_engine_serve(remp_engine* engine, const char* host, int port,
                                       const char* static_dir, int* bound_port);
/* Blocks until a served session ends; the HTTP API stays up. */
REMP_API remp_status remp_engine_wait(remp_engine* engine, remp_report* report);
/* Stops a served session early and shuts the HTTP API down. */
REMP_API remp_status remp_engine_stop(remp_engine* engine);
/* Nonzero once the loop has finished. */
REMP_API remp_status remp_engine_finished(const remp_engine* engine, int* finished);

REMP_API remp_status remp_engine_write_matches(const remp_engine* engine, const char* path);

/* Compares two pair files (first two tab-separated columns). */
REMP_API remp_status remp_evaluate_files(const char* predicted, const char* gold,
                                         remp_metrics* out);

#ifdef __cplusplus
}
#endif

#endif
