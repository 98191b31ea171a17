/* Exercises the shared-library surface end to end: error codes, dataset
 * loading, discovery, graph accessors, and the synth/bench round trip. Uses
 * only the public C header, exactly like an external consumer would. */
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "mvpc/mvpc.h"

static int checks = 0;
static int failures = 0;

static void expect(int cond, const char* what) {
  ++checks;
  if (!cond) {
    ++failures;
    fprintf(stderr, "FAIL: %s (last error: %s)\n", what, mvpc_last_error());
  }
}

/* Deterministic three-column sample: z depends on x, y depends on z, with a
 * crude LCG supplying noise. Every tenth y cell is blanked. */
static void write_sample_csv(const char* path) {
  FILE* f = fopen(path, "w");
  unsigned long long state = 88172645463325252ull;
  int i;
  fprintf(f, "x,z,y\n");
  for (i = 0; i < 400; ++i) {
    double u1, u2, x, z, y;
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    u1 = (double)(state >> 11) / 9007199254740992.0 - 0.5;
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    u2 = (double)(state >> 11) / 9007199254740992.0 - 0.5;
    x = 3.0 * u1;
    z = 0.8 * x + u2;
    y = 0.8 * z + u1 * 0.7;
    if (i % 10 == 3)
      fprintf(f, "%.6f,%.6f,\n", x, z);
    else
      fprintf(f, "%.6f,%.6f,%.6f\n", x, z, y);
  }
  fclose(f);
}

static void test_version_and_errors(void) {
  expect(strcmp(mvpc_version(), "0.1.0") == 0, "version string");
  expect(strcmp(mvpc_strerror(MVPC_OK), "ok") == 0, "strerror of ok");
  expect(strlen(mvpc_strerror(MVPC_ERR_IO)) > 0, "strerror of io");
  expect(strlen(mvpc_strerror(MVPC_ERR_PARSE)) > 0, "strerror of parse");
  expect(strlen(mvpc_strerror(MVPC_ERR_ARG)) > 0, "strerror of arg");
  expect(strlen(mvpc_strerror(MVPC_ERR_INTERNAL)) > 0, "strerror of internal");
  expect(strlen(mvpc_strerror(999)) > 0, "strerror of unknown code");
}

static void test_dataset_loading(void) {
  mvpc_dataset* d = NULL;
  int rc = mvpc_dataset_load_csv("capi_missing_file.csv", NULL, &d);
  expect(rc == MVPC_ERR_IO, "missing file reports io error");
  expect(d == NULL, "missing file leaves no dataset");
  expect(strlen(mvpc_last_error()) > 0, "io failure sets the error message");

  write_sample_csv("capi_sample.csv");
  rc = mvpc_dataset_load_csv("capi_sample.csv", NULL, &d);
  expect(rc == MVPC_OK, "sample csv loads");
  expect(strcmp(mvpc_last_error(), "") == 0, "success clears the error");
  expect(mvpc_dataset_rows(d) == 400, "row count");
  expect(mvpc_dataset_cols(d) == 3, "column count");
  expect(strcmp(mvpc_dataset_label(d, 0), "x") == 0, "first label");
  expect(strcmp(mvpc_dataset_label(d, 2), "y") == 0, "last label");
  expect(mvpc_dataset_label(d, 3) == NULL, "out-of-range label is NULL");
  expect(mvpc_dataset_label(d, -1) == NULL, "negative label is NULL");
  mvpc_dataset_free(d);

  /* custom missing tokens: "?" instead of the blank default */
  FILE* f = fopen("capi_tokens.csv", "w");
  fprintf(f, "a,b\n1,2\n?,4\n5,6\n");
  fclose(f);
  rc = mvpc_dataset_load_csv("capi_tokens.csv", "?", &d);
  expect(rc == MVPC_OK, "csv with ? tokens loads");
  expect(mvpc_dataset_rows(d) == 3, "token file rows");
  mvpc_dataset_free(d);

  f = fopen("capi_bad.csv", "w");
  fprintf(f, "a,b\n1,2\n3\n");
  fclose(f);
  rc = mvpc_dataset_load_csv("capi_bad.csv", NULL, &d);
  expect(rc == MVPC_ERR_PARSE, "ragged csv reports parse error");

  remove("capi_tokens.csv");
  remove("capi_bad.csv");
}

static void test_discovery_and_graphs(void) {
  mvpc_dataset* d = NULL;
  mvpc_graph* g = NULL;
  mvpc_discover_options opts;
  mvpc_discover_stats stats;
  int rc, a, b, n;

  expect(mvpc_dataset_load_csv("capi_sample.csv", NULL, &d) == MVPC_OK,
         "sample loads again");

  mvpc_discover_options_init(&opts);
  expect(strcmp(opts.method, "mvpc") == 0, "default method");
  expect(opts.alpha == 0.05, "default alpha");
  expect(opts.max_cond == -1, "default conditioning cap");
  expect(opts.seed == 1, "default seed");
  expect(strcmp(opts.correction, "auto") == 0, "default correction");
  expect(opts.complete == NULL, "no default reference data");

  opts.dump_tests_path = "capi_tests_dump.txt";
  rc = mvpc_discover(d, &opts, &g, &stats);
  expect(rc == MVPC_OK, "discovery runs");
  expect(g != NULL, "discovery returns a graph");
  expect(stats.nodes == 3, "stats node count");
  expect(stats.edges >= 1, "at least one edge in the chain data");
  expect(stats.tests_run >= stats.edges, "test counter is plausible");
  expect(stats.removed >= 0 && stats.removed <= stats.candidates,
         "removed edges bounded by candidates");

  FILE* f = fopen("capi_tests_dump.txt", "r");
  expect(f != NULL, "test dump file exists");
  if (f) {
    char line[256];
    expect(fgets(line, sizeof(line), f) != NULL, "test dump is not empty");
    fclose(f);
  }
  remove("capi_tests_dump.txt");

  n = mvpc_graph_node_count(g);
  expect(n == 3, "graph node count");
  expect(mvpc_graph_edge_count(g) == stats.edges, "edge count matches stats");
  expect(strcmp(mvpc_graph_label(g, 1), "z") == 0, "graph keeps labels");
  expect(mvpc_graph_label(g, 17) == NULL, "graph label out of range");
  expect(mvpc_graph_mark(g, 0, 0) == -1, "self mark is an error");
  expect(mvpc_graph_mark(g, 0, 5) == -1, "mark out of range");
  expect(mvpc_graph_mark(NULL, 0, 1) == -1, "mark on NULL graph");

  /* marks must be antisymmetric: a->b seen from b is b<-a */
  for (a = 0; a < n; ++a)
    for (b = 0; b < n; ++b) {
      int m, r;
      if (a == b) continue;
      m = mvpc_graph_mark(g, a, b);
      r = mvpc_graph_mark(g, b, a);
      expect(m >= MVPC_MARK_NONE && m <= MVPC_MARK_UNDIRECTED, "mark in range");
      if (m == MVPC_MARK_FORWARD) expect(r == MVPC_MARK_BACKWARD, "mirror mark");
      if (m == MVPC_MARK_NONE) expect(r == MVPC_MARK_NONE, "mirror absence");
      if (m == MVPC_MARK_UNDIRECTED)
        expect(r == MVPC_MARK_UNDIRECTED, "mirror undirected");
    }

  expect(mvpc_graph_write_edgelist(g, "capi_edges.txt") == MVPC_OK,
         "edge list writes");
  f = fopen("capi_edges.txt", "r");
  expect(f != NULL, "edge list file exists");
  if (f) fclose(f);
  remove("capi_edges.txt");
  expect(mvpc_graph_write_dot(g, "capi_graph.dot") == MVPC_OK, "dot writes");
  remove("capi_graph.dot");
  expect(mvpc_graph_write_edgelist(g, "no_such_dir/edges.txt") == MVPC_ERR_IO,
         "unwritable edge list path");
  mvpc_graph_free(g);

  /* argument failures */
  opts.dump_tests_path = NULL;
  opts.method = "median";
  rc = mvpc_discover(d, &opts, &g, NULL);
  expect(rc == MVPC_ERR_ARG, "unknown method is an argument error");
  expect(g == NULL, "failed discovery yields no graph");

  mvpc_discover_options_init(&opts);
  opts.alpha = 1.5;
  expect(mvpc_discover(d, &opts, &g, NULL) == MVPC_ERR_ARG, "alpha out of range");

  mvpc_discover_options_init(&opts);
  opts.method = "ideal";
  expect(mvpc_discover(d, &opts, &g, NULL) == MVPC_ERR_ARG,
         "ideal without reference data");

  expect(mvpc_discover(NULL, &opts, &g, NULL) == MVPC_ERR_ARG, "NULL data");
  expect(mvpc_discover(d, NULL, &g, NULL) == MVPC_ERR_ARG, "NULL options");
  expect(mvpc_discover(d, &opts, NULL, NULL) == MVPC_ERR_ARG, "NULL out");

  mvpc_dataset_free(d);
  remove("capi_sample.csv");
}

static void test_synth_and_bench(void) {
  char* summary = NULL;
  int rc;

  rc = mvpc_synth(NULL, "bogus_key = 1", "capi_suite");
  expect(rc == MVPC_ERR_PARSE, "unknown config key rejected");

  rc = mvpc_synth(NULL, "p = -2", "capi_suite");
  expect(rc == MVPC_ERR_ARG, "invalid config value rejected");

  rc = mvpc_synth(NULL,
                  "p = 6\nsample_sizes = 200\nmechanisms = mcar\n"
                  "replicates = 1\nmissing_rate = 0.1\nseed = 4242",
                  "capi_suite");
  expect(rc == MVPC_OK, "suite generates");

  rc = mvpc_bench("capi_suite", "td-pc,mvpc", 0.05, 3, 9, 1,
                  "capi_report.csv", &summary);
  expect(rc == MVPC_OK, "bench runs");
  expect(summary != NULL, "bench returns a summary");
  if (summary) {
    expect(strstr(summary, "td-pc") != NULL, "summary mentions td-pc");
    expect(strstr(summary, "mvpc") != NULL, "summary mentions mvpc");
    mvpc_string_free(summary);
  }

  FILE* f = fopen("capi_report.csv", "r");
  expect(f != NULL, "report file exists");
  if (f) {
    char header[256];
    expect(fgets(header, sizeof(header), f) != NULL, "report has a header");
    expect(strncmp(header, "method,mechanism,p,n,replicate,shd", 34) == 0,
           "report header shape");
    fclose(f);
  }
  remove("capi_report.csv");

  expect(mvpc_bench("capi_no_such_suite", NULL, 0.05, -1, 9, 1,
                    "capi_report.csv", NULL) == MVPC_ERR_IO,
         "bench on a missing suite directory");
  expect(mvpc_bench("capi_suite", "sorcery", 0.05, -1, 9, 1, "capi_report.csv",
                    NULL) == MVPC_ERR_ARG,
         "bench with an unknown method");
  expect(mvpc_bench(NULL, NULL, 0.05, -1, 9, 1, NULL, NULL) == MVPC_ERR_ARG,
         "bench without required paths");
}

int main(void) {
  test_version_and_errors();
  test_dataset_loading();
  test_discovery_and_graphs();
  test_synth_and_bench();
  if (failures) {
    fprintf(stderr, "%d of %d checks failed\n", failures, checks);
    return 1;
  }
  printf("all %d checks passed\n", checks);
  return 0;
}
