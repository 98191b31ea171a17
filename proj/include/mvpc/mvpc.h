#ifndef MVPC_H
#define MVPC_H

/* C interface to the missing-value causal discovery toolkit. All functions
 * returning int yield MVPC_OK (0) on success or an MVPC_ERR_* code; the
 * thread-local message behind mvpc_last_error() describes the most recent
 * failure on the calling thread. Objects returned through out-parameters are
 * owned by the caller and released with the matching _free function. */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define MVPC_OK 0
#define MVPC_ERR_IO 1       /* file unreadable / unwritable */
#define MVPC_ERR_PARSE 2    /* malformed CSV, config, or suite files */
#define MVPC_ERR_ARG 3      /* invalid option values or preconditions */
#define MVPC_ERR_INTERNAL 4 /* unexpected failure inside the library */

const char* mvpc_version(void);
const char* mvpc_strerror(int code);   /* static name of an error code */
const char* mvpc_last_error(void);     /* last failure message, "" if none */
const char* mvpc_last_warnings(void);  /* newline-joined warnings of the last
                                          discover/bench call, "" if none */

/* ---- datasets ---------------------------------------------------------- */

typedef struct mvpc_dataset mvpc_dataset;

/* na_tokens: comma-separated cell spellings treated as missing (an empty
 * segment stands for the empty cell). NULL keeps the default: "", NA, NaN. */
int mvpc_dataset_load_csv(const char* path, const char* na_tokens,
                          mvpc_dataset** out);
void mvpc_dataset_free(mvpc_dataset* d);

int mvpc_dataset_rows(const mvpc_dataset* d);
int mvpc_dataset_cols(const mvpc_dataset* d);
const char* mvpc_dataset_label(const mvpc_dataset* d, int col); /* NULL if oob */

/* ---- discovery --------------------------------------------------------- */

typedef struct mvpc_graph mvpc_graph;

typedef struct mvpc_discover_options {
  const char* method;     /* mvpc | td-pc | ld-pc | ideal | target */
  double alpha;           /* CI test level, in (0,1) */
  int max_cond;           /* conditioning-set size cap; -1 = automatic */
  uint64_t seed;          /* drives every random draw of the run */
  const char* correction; /* auto | permc | drw | off */
  const mvpc_dataset* complete; /* fully observed reference data, required by
                                   ideal and target */
  const char* dump_tests_path;       /* optional CI-test log file */
  const char* dump_corrections_path; /* optional correction audit file */
} mvpc_discover_options;

/* Fills the defaults: mvpc, alpha 0.05, max_cond -1, seed 1, auto, no
 * reference data, no dumps. */
void mvpc_discover_options_init(mvpc_discover_options* opts);

typedef struct mvpc_discover_stats {
  int nodes;
  int edges;           /* edges in the returned graph */
  int candidates;      /* pairs checked by the correction stage */
  int removed;         /* candidate edges removed */
  long long tests_run; /* CI tests executed across all stages */
} mvpc_discover_stats;

/* Runs causal discovery on `data`. On success *out holds the estimated
 * CPDAG and `stats` (when non-NULL) the run counters. */
int mvpc_discover(const mvpc_dataset* data, const mvpc_discover_options* opts,
                  mvpc_graph** out, mvpc_discover_stats* stats);

/* ---- graphs ------------------------------------------------------------ */

#define MVPC_MARK_NONE 0
#define MVPC_MARK_FORWARD 1  /* a -> b */
#define MVPC_MARK_BACKWARD 2 /* b -> a */
#define MVPC_MARK_UNDIRECTED 3

int mvpc_graph_node_count(const mvpc_graph* g);
int mvpc_graph_edge_count(const mvpc_graph* g);
const char* mvpc_graph_label(const mvpc_graph* g, int v); /* NULL if oob */
int mvpc_graph_mark(const mvpc_graph* g, int a, int b);   /* MVPC_MARK_*, or
                                                             -1 on bad args */
int mvpc_graph_write_edgelist(const mvpc_graph* g, const char* path);
int mvpc_graph_write_dot(const mvpc_graph* g, const char* path);
void mvpc_graph_free(mvpc_graph* g);

/* ---- synthetic benchmark suites ---------------------------------------- */

/* Generates a benchmark suite into out_dir (manifest, per-instance CSVs,
 * ground-truth edge lists). config_path: suite config file, NULL for the
 * defaults; overrides: extra config text (same key = value format) whose
 * keys replace file values, NULL for none. */
int mvpc_synth(const char* config_path, const char* overrides,
               const char* out_dir);

/* Runs methods (comma list of method names) over a suite directory, writes
 * the per-replicate report CSV to report_path, and (when summary_out is
 * non-NULL) returns the human-readable summary table; free it with
 * mvpc_string_free. max_cond -1 = automatic; jobs = worker threads. */
int mvpc_bench(const char* suite_dir, const char* methods, double alpha,
               int max_cond, uint64_t seed, int jobs, const char* report_path,
               char** summary_out);

void mvpc_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MVPC_H */
