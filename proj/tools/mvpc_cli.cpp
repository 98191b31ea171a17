#include <cstdint>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "mvpc/mvpc.h"

namespace {

int report_failure(const char* action, int code) {
  std::fprintf(stderr, "mvpc: %s failed: %s\n", action, mvpc_last_error());
  std::fprintf(stderr, "mvpc: %s\n", mvpc_strerror(code));
  return 1;
}

void print_warnings() {
  const char* w = mvpc_last_warnings();
  if (w && *w) std::fprintf(stderr, "warning:\n%s\n", w);
}

struct DatasetGuard {
  mvpc_dataset* d = nullptr;
  ~DatasetGuard() { mvpc_dataset_free(d); }
};

struct GraphGuard {
  mvpc_graph* g = nullptr;
  ~GraphGuard() { mvpc_graph_free(g); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Causal discovery from data with missing values"};
  app.require_subcommand(1);

  // --- discover ---------------------------------------------------------
  std::string data_path, method = "mvpc", correction = "auto", na_tokens;
  std::string out_prefix = "graph", complete_path, dump_tests, dump_corrections;
  double alpha = 0.05;
  int max_cond = -1;
  std::uint64_t seed = 1;

  CLI::App* discover =
      app.add_subcommand("discover", "Estimate a causal graph from a CSV file");
  discover->add_option("--data", data_path, "input CSV (header row required)")
      ->required();
  discover->add_option("--method", method,
                       "mvpc | td-pc | ld-pc | ideal | target");
  discover->add_option("--alpha", alpha, "CI test level (default 0.05)");
  discover->add_option("--max-cond", max_cond,
                       "conditioning-set size cap (-1 = automatic)");
  discover->add_option("--seed", seed, "seed for every random draw");
  CLI::Option* na_opt = discover->add_option(
      "--na-tokens", na_tokens,
      "comma-separated missing-value spellings (default: empty cell, NA, NaN)");
  discover->add_option("--out", out_prefix,
                       "output prefix: <out>.edges.txt and <out>.dot");
  discover->add_option("--correction", correction, "auto | permc | drw | off");
  discover->add_option("--complete", complete_path,
                       "fully observed reference CSV (ideal and target)");
  discover->add_option("--dump-tests", dump_tests, "write the CI-test log here");
  discover->add_option("--dump-corrections", dump_corrections,
                       "write the correction audit here");

  // --- synth ------------------------------------------------------------
  std::string synth_config, synth_out, s_sizes, s_mechanisms;
  int s_p = 0, s_replicates = 0;
  double s_rate = 0.0;
  std::uint64_t s_seed = 0;

  CLI::App* synth =
      app.add_subcommand("synth", "Generate a synthetic benchmark suite");
  synth->add_option("--config", synth_config, "suite config file (key = value)");
  synth->add_option("--out", synth_out, "output directory")->required();
  CLI::Option* p_opt = synth->add_option("--p", s_p, "variable count");
  CLI::Option* sizes_opt =
      synth->add_option("--sizes", s_sizes, "comma list of sample sizes");
  CLI::Option* mech_opt = synth->add_option(
      "--mechanisms", s_mechanisms, "comma list of MCAR / MAR / MNAR");
  CLI::Option* reps_opt =
      synth->add_option("--replicates", s_replicates, "replicates per cell");
  CLI::Option* rate_opt =
      synth->add_option("--rate", s_rate, "target missing rate");
  CLI::Option* seed_opt = synth->add_option("--seed", s_seed, "suite seed");

  // --- bench ------------------------------------------------------------
  std::string suite_dir, bench_methods = "mvpc,td-pc,ld-pc,ideal,target";
  std::string report_path = "report.csv";
  double b_alpha = 0.05;
  int b_max_cond = -1, jobs = 0;
  std::uint64_t b_seed = 1;

  CLI::App* bench = app.add_subcommand(
      "bench", "Run discovery methods over a suite and write a report CSV");
  bench->add_option("--suite", suite_dir, "suite directory")->required();
  bench->add_option("--methods", bench_methods, "comma list of methods");
  bench->add_option("--alpha", b_alpha, "CI test level (default 0.05)");
  bench->add_option("--max-cond", b_max_cond,
                    "conditioning-set size cap (-1 = automatic)");
  bench->add_option("--seed", b_seed, "benchmark seed");
  bench->add_option("--jobs", jobs, "worker threads (0 = all cores)");
  bench->add_option("--out", report_path, "report CSV path");

  CLI11_PARSE(app, argc, argv);

  if (discover->parsed()) {
    DatasetGuard data;
    int rc = mvpc_dataset_load_csv(
        data_path.c_str(), na_opt->count() ? na_tokens.c_str() : nullptr,
        &data.d);
    if (rc != MVPC_OK) return report_failure("loading data", rc);

    DatasetGuard complete;
    if (!complete_path.empty()) {
      rc = mvpc_dataset_load_csv(
          complete_path.c_str(),
          na_opt->count() ? na_tokens.c_str() : nullptr, &complete.d);
      if (rc != MVPC_OK) return report_failure("loading reference data", rc);
    }

    mvpc_discover_options opts;
    mvpc_discover_options_init(&opts);
    opts.method = method.c_str();
    opts.alpha = alpha;
    opts.max_cond = max_cond;
    opts.seed = seed;
    opts.correction = correction.c_str();
    opts.complete = complete.d;
    opts.dump_tests_path = dump_tests.empty() ? nullptr : dump_tests.c_str();
    opts.dump_corrections_path =
        dump_corrections.empty() ? nullptr : dump_corrections.c_str();

    GraphGuard graph;
    mvpc_discover_stats stats;
    rc = mvpc_discover(data.d, &opts, &graph.g, &stats);
    if (rc != MVPC_OK) return report_failure("discovery", rc);
    print_warnings();

    const std::string edges_path = out_prefix + ".edges.txt";
    const std::string dot_path = out_prefix + ".dot";
    rc = mvpc_graph_write_edgelist(graph.g, edges_path.c_str());
    if (rc != MVPC_OK) return report_failure("writing the edge list", rc);
    rc = mvpc_graph_write_dot(graph.g, dot_path.c_str());
    if (rc != MVPC_OK) return report_failure("writing the DOT file", rc);

    std::printf("method: %s\n", method.c_str());
    std::printf("nodes: %d\n", stats.nodes);
    std::printf("edges: %d\n", stats.edges);
    std::printf("candidate pairs: %d\n", stats.candidates);
    std::printf("edges removed by correction: %d\n", stats.removed);
    std::printf("ci tests run: %lld\n", stats.tests_run);
    std::printf("wrote %s and %s\n", edges_path.c_str(), dot_path.c_str());
    return 0;
  }

  if (synth->parsed()) {
    std::string overrides;
    if (p_opt->count()) overrides += "p = " + std::to_string(s_p) + "\n";
    if (sizes_opt->count()) overrides += "sample_sizes = " + s_sizes + "\n";
    if (mech_opt->count()) overrides += "mechanisms = " + s_mechanisms + "\n";
    if (reps_opt->count())
      overrides += "replicates = " + std::to_string(s_replicates) + "\n";
    if (rate_opt->count())
      overrides += "missing_rate = " + std::to_string(s_rate) + "\n";
    if (seed_opt->count()) overrides += "seed = " + std::to_string(s_seed) + "\n";

    int rc = mvpc_synth(synth_config.empty() ? nullptr : synth_config.c_str(),
                        overrides.empty() ? nullptr : overrides.c_str(),
                        synth_out.c_str());
    if (rc != MVPC_OK) return report_failure("suite generation", rc);
    std::printf("suite written to %s\n", synth_out.c_str());
    return 0;
  }

  // bench
  char* summary = nullptr;
  int rc = mvpc_bench(suite_dir.c_str(), bench_methods.c_str(), b_alpha,
                      b_max_cond, b_seed, jobs, report_path.c_str(), &summary);
  if (rc != MVPC_OK) return report_failure("benchmark", rc);
  print_warnings();
  if (summary) {
    std::fputs(summary, stdout);
    mvpc_string_free(summary);
  }
  std::printf("report written to %s\n", report_path.c_str());
  return 0;
}
