// Exit-gate checks for the toolkit. Each criterion is selected by its argv
// name ("1".."8", "smoke50"), prints one [PASS]/[FAIL] line with the measured
// numbers, and exits nonzero on failure. Thresholds and seeds are pinned here
// so reruns are comparable; the heavier criteria also write their report CSVs
// under acceptance_out/ for the determinism check to compare against.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mvpc/citest.hpp"
#include "mvpc/dataset.hpp"
#include "mvpc/discovery.hpp"
#include "mvpc/eval.hpp"
#include "mvpc/graph.hpp"
#include "mvpc/pipeline.hpp"
#include "mvpc/rng.hpp"
#include "mvpc/synth.hpp"
#include "oracles.hpp"

using namespace mvpc;
using clk = std::chrono::steady_clock;

namespace {

constexpr std::uint64_t kSeed = 7;  // root of every seed chain below
const char* kOutDir = "acceptance_out";

double seconds_since(clk::time_point t0) {
  return std::chrono::duration<double>(clk::now() - t0).count();
}

bool report(bool ok, const std::string& name, const std::string& detail,
            double elapsed, double budget) {
  const bool in_budget = budget <= 0.0 || elapsed < budget;
  std::printf("[%s] %s: %s (%.1f s%s)\n", ok && in_budget ? "PASS" : "FAIL",
              name.c_str(), detail.c_str(), elapsed,
              budget > 0.0 ? (" / " + std::to_string((int)budget) + " s budget").c_str()
                           : "");
  return ok && in_budget;
}

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof(buf), pattern, args);
  va_end(args);
  return buf;
}

// ---- criterion 1: oracle equivalence ----------------------------------------

bool criterion_oracle_equivalence() {
  auto t0 = clk::now();
  int failures = 0;
  for (int i = 0; i < 200; ++i) {
    const int p = 4 + i % 5;
    Dag g = oracle::random_test_dag(p, 0.35, derive_seed(kSeed, "oracle", i));
    SkeletonState s = pc_skeleton(p, {}, oracle::dsep_ci(g), 0.05, p);
    Cpdag est = orient(s.skeleton, s.sepsets);
    if (shd(est, dag_to_cpdag(g)) != 0) ++failures;
  }
  return report(failures == 0, "criterion 1",
                fmt("oracle PC pattern mismatches %d / 200", failures),
                seconds_since(t0), 60.0);
}

// ---- criterion 2: CI calibration ---------------------------------------------

bool criterion_ci_calibration() {
  auto t0 = clk::now();
  const int reps = 2000, n = 500;
  int rejects = 0;
  int rejects_by_dim[3] = {0, 0, 0};
  for (int t = 0; t < reps; ++t) {
    const int zdim = t % 3;
    Rng rng(derive_seed(kSeed, "null", t));
    std::vector<std::string> labels = {"x", "y"};
    for (int j = 0; j < zdim; ++j) labels.push_back("z" + std::to_string(j));
    Dataset d(labels, n);
    std::vector<double> coef_x(zdim), coef_y(zdim);
    for (int j = 0; j < zdim; ++j) {
      coef_x[j] = rng.uniform(0.3, 0.9) * (rng.bernoulli(0.5) ? 1.0 : -1.0);
      coef_y[j] = rng.uniform(0.3, 0.9) * (rng.bernoulli(0.5) ? 1.0 : -1.0);
    }
    for (int r = 0; r < n; ++r) {
      double zx = 0.0, zy = 0.0;
      for (int j = 0; j < zdim; ++j) {
        const double z = rng.normal();
        d.set_value(r, 2 + j, z);
        zx += coef_x[j] * z;
        zy += coef_y[j] * z;
      }
      // x and y touch only through z, so x is independent of y given z
      d.set_value(r, 0, zx + rng.normal());
      d.set_value(r, 1, zy + rng.normal());
    }
    std::vector<int> z(zdim);
    for (int j = 0; j < zdim; ++j) z[j] = 2 + j;
    const bool reject = !fisher_z(d, CiQuery{0, 1, z, 0.05}).independent;
    rejects += reject;
    rejects_by_dim[zdim] += reject;
  }
  const double rate = rejects / (double)reps;
  const bool ok = rate >= 0.03 && rate <= 0.07;
  return report(
      ok, "criterion 2",
      fmt("null rejection rate %.4f (|z|=0: %.3f, 1: %.3f, 2: %.3f), band "
          "[0.030, 0.070]",
          rate, rejects_by_dim[0] / (reps / 3.0), rejects_by_dim[1] / (reps / 3.0),
          rejects_by_dim[2] / (reps / 3.0)),
      seconds_since(t0), 120.0);
}

// ---- criteria 3 and 4: single-figure reproductions ---------------------------

struct FigureTally {
  int reps = 0;
  int td_extra = 0;          // TD-PC keeps the extraneous X -- Y edge
  int removed = 0;           // ... and MVPC's output lacks it
  int retained_true = 0;     // MVPC keeps all four true edges
  std::string csv;           // per-replicate rows for the determinism check
};

// Shared protocol: n = 10^4, coefficients drawn from +-[0.5, 0.9], TD-PC and
// MVPC run with the same alpha and automatic conditioning cap.
FigureTally run_figure(const Dag& g, const MissSpec& miss_template,
                       const std::vector<std::pair<int, int>>& true_edges,
                       int x, int y, const char* chain, int reps) {
  FigureTally tally;
  tally.reps = reps;
  std::ostringstream csv;
  csv << "replicate,tdpc_has_extra,mvpc_has_extra,mvpc_true_edges\n";
  for (int rep = 1; rep <= reps; ++rep) {
    const std::uint64_t seed = derive_seed(kSeed, chain, rep);
    SemSpec sem = random_sem(g, 0.5, 0.9, derive_seed(seed, "sem"));
    Dataset complete = sample_sem(sem, 10000, derive_seed(seed, "data"));
    Dataset masked =
        inject_missingness(complete, miss_template, derive_seed(seed, "mask"));

    Cpdag td = run_baseline(masked, Method::TdPc, nullptr, 0.05,
                            default_max_cond(g.node_count()), seed);
    DiscoverOptions opts;
    opts.alpha = 0.05;
    opts.max_cond = -1;
    opts.seed = seed;
    Cpdag mv = discover(masked, opts).graph;

    const bool td_has = td.adjacent(x, y);
    const bool mv_has = mv.adjacent(x, y);
    int mv_true = 0;
    for (auto [a, b] : true_edges) mv_true += mv.adjacent(a, b);
    tally.td_extra += td_has;
    tally.removed += td_has && !mv_has;
    tally.retained_true += mv_true == (int)true_edges.size();
    csv << rep << ',' << td_has << ',' << mv_has << ',' << mv_true << '\n';
  }
  tally.csv = csv.str();
  return tally;
}

FigureTally run_collider_figure(int reps) {
  // X -> Z -> Y with collider X -> W <- Y; Y's missingness is driven by W.
  // Deleting on Y selects on a common effect of X and Y, so the test-wise
  // skeleton grows a spurious X -- Y edge that the permutation correction
  // can undo.
  Dag g(4, {"X", "Z", "Y", "W"});
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  g.add_edge(0, 3);
  g.add_edge(2, 3);
  MissSpec miss;
  miss.indicators.push_back({2, {3}, {4.0}, std::nan("")});
  miss.target_rate = 0.35;
  return run_figure(g, miss, {{0, 1}, {1, 2}, {0, 3}, {2, 3}}, 0, 2, "fig-mar",
                    reps);
}

FigureTally run_circular_figure(int reps) {
  // X -> W <- Y with W's indicator driven by both of its parents, plus
  // Y -> Z -> X and Z's indicator driven by W: the deletions select on the
  // tested pair itself, which only the weighted retest can undo.
  Dag g(4, {"X", "W", "Y", "Z"});
  g.add_edge(0, 1);
  g.add_edge(2, 1);
  g.add_edge(2, 3);
  g.add_edge(3, 0);
  MissSpec miss;
  miss.indicators.push_back({1, {0, 2}, {0.9, 0.9}, std::nan("")});
  miss.indicators.push_back({2, {1}, {0.9}, std::nan("")});
  miss.target_rate = 0.25;
  return run_figure(g, miss, {{0, 1}, {2, 1}, {2, 3}, {3, 0}}, 0, 2, "fig-mnar",
                    reps);
}

void cache_csv(const std::string& name, const std::string& content) {
  std::filesystem::create_directories(kOutDir);
  write_text_file(std::string(kOutDir) + "/" + name, content);
}

bool criterion_permc_figure() {
  auto t0 = clk::now();
  FigureTally t = run_collider_figure(100);
  cache_csv("crit3.csv", t.csv);
  const double td_rate = t.td_extra / (double)t.reps;
  const double removal = t.td_extra ? t.removed / (double)t.td_extra : 0.0;
  const double retention = t.retained_true / (double)t.reps;
  const bool ok = td_rate >= 0.80 && removal >= 0.85 && retention >= 0.90;
  return report(ok, "criterion 3",
                fmt("td-pc extra edge %.2f (need >= 0.80), mvpc removal %.2f "
                    "(>= 0.85), true edges kept %.2f (>= 0.90)",
                    td_rate, removal, retention),
                seconds_since(t0), 300.0);
}

bool criterion_drw_figure() {
  auto t0 = clk::now();
  FigureTally t = run_circular_figure(100);
  cache_csv("crit4.csv", t.csv);
  const double td_rate = t.td_extra / (double)t.reps;
  const double removal = t.td_extra ? t.removed / (double)t.td_extra : 0.0;
  const bool ok = removal >= 0.80;
  return report(ok, "criterion 4",
                fmt("mvpc removal %.2f (need >= 0.80; td-pc extra edge rate "
                    "%.2f, true edges kept %.2f)",
                    removal, td_rate, t.retained_true / (double)t.reps),
                seconds_since(t0), 300.0);
}

// ---- criteria 5-7: desk-scale suites -----------------------------------------

Suite desk_suite(MGraph::Mechanism mech, std::vector<int> sample_sizes,
                 int replicates, const char* chain) {
  SuiteConfig cfg;
  cfg.p = 20;
  cfg.sample_sizes = std::move(sample_sizes);
  cfg.mechanisms = {mech};
  cfg.replicates = replicates;
  cfg.seed = derive_seed(derive_seed(kSeed, chain), mechanism_name(mech));
  return make_benchmark_suite(cfg);
}

std::map<std::pair<std::string, int>, double> mean_shd_by_method_n(
    const EvalReport& rep) {
  std::map<std::pair<std::string, int>, double> sum;
  std::map<std::pair<std::string, int>, int> count;
  for (const EvalRow& r : rep.rows) {
    sum[{r.method, r.n}] += r.shd;
    count[{r.method, r.n}] += 1;
  }
  for (auto& [key, value] : sum) value /= count[key];
  return sum;
}

bool criterion_shd_ordering() {
  auto t0 = clk::now();
  const std::vector<Method> methods = {Method::Ideal, Method::Target,
                                       Method::TdPc, Method::Mvpc};
  bool ok = true;
  std::string detail;
  for (MGraph::Mechanism mech :
       {MGraph::Mechanism::MAR, MGraph::Mechanism::MNAR}) {
    Suite suite = desk_suite(mech, {1000, 10000}, 40, "c5");
    std::vector<std::string> failures;
    EvalReport rep = run_benchmark(suite, methods, 0.05, -1,
                                   derive_seed(kSeed, "c5-bench"), 1, nullptr,
                                   &failures);
    cache_csv(std::string("crit5_") + mechanism_name(mech) + ".csv",
              rep.to_csv());
    if (!failures.empty()) {
      detail += fmt("%s: %zu tasks failed; ", mechanism_name(mech),
                    failures.size());
      ok = false;
      continue;
    }
    auto mean = mean_shd_by_method_n(rep);
    for (int n : {1000, 10000}) {
      const double ideal = mean[{"ideal", n}], target = mean[{"target", n}];
      const double mvpc = mean[{"mvpc", n}], tdpc = mean[{"td-pc", n}];
      const bool ordered = ideal <= target && target <= mvpc && mvpc < tdpc;
      const bool ratio_ok = n != 10000 || mvpc <= 0.6 * tdpc;
      ok = ok && ordered && ratio_ok;
      detail += fmt("%s n=%d: ideal %.2f <= target %.2f <= mvpc %.2f < td-pc "
                    "%.2f%s; ",
                    mechanism_name(mech), n, ideal, target, mvpc, tdpc,
                    n == 10000 ? fmt(" (ratio %.2f <= 0.6)", mvpc / tdpc).c_str()
                               : "");
    }
  }
  return report(ok, "criterion 5", detail, seconds_since(t0), 1800.0);
}

bool criterion_extra_not_missing() {
  auto t0 = clk::now();
  // Paired skeleton comparison on the criterion-5 suites: test-wise deletion
  // may add edges but should almost never lose one that the ideal run finds.
  double diff_sum = 0.0;
  int pairs = 0;
  for (MGraph::Mechanism mech :
       {MGraph::Mechanism::MAR, MGraph::Mechanism::MNAR}) {
    Suite suite = desk_suite(mech, {1000, 10000}, 40, "c5");
    std::vector<BenchGraph> graphs;
    std::vector<std::string> failures;
    EvalReport rep =
        run_benchmark(suite, {Method::Ideal, Method::TdPc}, 0.05, -1,
                      derive_seed(kSeed, "c6-bench"), 1, &graphs, &failures);
    (void)rep;
    if (!failures.empty())
      return report(false, "criterion 6",
                    fmt("%zu benchmark tasks failed", failures.size()),
                    seconds_since(t0), 0.0);
    std::map<int, int> ideal_missing, tdpc_missing;
    for (const BenchGraph& g : graphs) {
      const Cpdag truth = dag_to_cpdag(suite.instances[g.instance].truth.dag());
      const int missing = missing_adjacencies(g.graph, truth);
      (g.method == "ideal" ? ideal_missing : tdpc_missing)[g.instance] = missing;
    }
    for (const auto& [inst, missing] : tdpc_missing) {
      diff_sum += missing - ideal_missing[inst];
      ++pairs;
    }
  }
  const double paired_mean = diff_sum / pairs;
  const bool ok = std::fabs(paired_mean) <= 0.5;
  return report(ok, "criterion 6",
                fmt("paired mean of (td-pc - ideal) skeleton missing-edge "
                    "counts %.3f over %d runs (|.| <= 0.5)",
                    paired_mean, pairs),
                seconds_since(t0), 0.0);
}

bool criterion_mcar_correctness() {
  auto t0 = clk::now();
  Suite suite = desk_suite(MGraph::Mechanism::MCAR, {10000}, 40, "c7");
  std::vector<std::string> failures;
  EvalReport rep = run_benchmark(suite, {Method::Ideal, Method::TdPc, Method::Mvpc},
                                 0.05, -1, derive_seed(kSeed, "c7-bench"), 1,
                                 nullptr, &failures);
  if (!failures.empty())
    return report(false, "criterion 7",
                  fmt("%zu benchmark tasks failed", failures.size()),
                  seconds_since(t0), 0.0);
  auto mean = mean_shd_by_method_n(rep);
  const double ideal = mean[{"ideal", 10000}];
  const double tdpc = mean[{"td-pc", 10000}];
  const double mvpc = mean[{"mvpc", 10000}];
  const bool ok = tdpc <= ideal + 1.5 && mvpc <= ideal + 1.5;
  return report(ok, "criterion 7",
                fmt("mean shd under mcar: ideal %.2f, td-pc %.2f, mvpc %.2f "
                    "(both within ideal + 1.5)",
                    ideal, tdpc, mvpc),
                seconds_since(t0), 0.0);
}

// ---- criterion 8: determinism ------------------------------------------------

bool criterion_determinism() {
  auto t0 = clk::now();
  // Recompute the report CSVs of criteria 3-5 from scratch and compare them
  // byte for byte against the copies under acceptance_out/ (written by the
  // earlier runs; computed twice right here when absent).
  std::vector<std::pair<std::string, std::string>> fresh;
  fresh.emplace_back("crit3.csv", run_collider_figure(100).csv);
  fresh.emplace_back("crit4.csv", run_circular_figure(100).csv);
  const std::vector<Method> methods = {Method::Ideal, Method::Target,
                                       Method::TdPc, Method::Mvpc};
  for (MGraph::Mechanism mech :
       {MGraph::Mechanism::MAR, MGraph::Mechanism::MNAR}) {
    Suite suite = desk_suite(mech, {1000, 10000}, 40, "c5");
    EvalReport rep = run_benchmark(suite, methods, 0.05, -1,
                                   derive_seed(kSeed, "c5-bench"), 1);
    fresh.emplace_back(std::string("crit5_") + mechanism_name(mech) + ".csv",
                       rep.to_csv());
  }
  bool ok = true;
  std::string detail;
  for (const auto& [name, content] : fresh) {
    const std::string path = std::string(kOutDir) + "/" + name;
    std::string reference;
    if (std::filesystem::exists(path)) {
      reference = read_text_file(path);
    } else {
      // No earlier run to compare with: redo the computation and require the
      // two in-process passes to agree.
      if (name == "crit3.csv") reference = run_collider_figure(100).csv;
      else if (name == "crit4.csv") reference = run_circular_figure(100).csv;
      else {
        const bool mar = name.find("MAR") != std::string::npos &&
                         name.find("MNAR") == std::string::npos;
        Suite suite = desk_suite(
            mar ? MGraph::Mechanism::MAR : MGraph::Mechanism::MNAR,
            {1000, 10000}, 40, "c5");
        reference = run_benchmark(suite, methods, 0.05, -1,
                                  derive_seed(kSeed, "c5-bench"), 1)
                        .to_csv();
      }
    }
    const bool same = content == reference;
    ok = ok && same;
    detail += name + (same ? " identical; " : " DIFFERS; ");
  }
  return report(ok, "criterion 8", detail, seconds_since(t0), 0.0);
}

// ---- 50-node smoke test --------------------------------------------------------

bool smoke_fifty_nodes() {
  auto t0 = clk::now();
  SuiteConfig cfg;
  cfg.p = 50;
  cfg.sample_sizes = {10000};
  cfg.mechanisms = {MGraph::Mechanism::MNAR};
  cfg.replicates = 10;
  cfg.seed = derive_seed(kSeed, "smoke50");
  Suite suite = make_benchmark_suite(cfg);
  std::vector<std::string> failures;
  EvalReport rep = run_benchmark(suite, {Method::TdPc, Method::Mvpc}, 0.05, -1,
                                 derive_seed(kSeed, "smoke50-bench"), 1, nullptr,
                                 &failures);
  if (!failures.empty())
    return report(false, "smoke50",
                  fmt("%zu benchmark tasks failed", failures.size()),
                  seconds_since(t0), 0.0);
  auto mean = mean_shd_by_method_n(rep);
  const double tdpc = mean[{"td-pc", 10000}];
  const double mvpc = mean[{"mvpc", 10000}];
  return report(mvpc < tdpc, "smoke50",
                fmt("mean shd at p=50: mvpc %.2f < td-pc %.2f", mvpc, tdpc),
                seconds_since(t0), 0.0);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s <1..8|smoke50>\n", argv[0]);
    return 2;
  }
  const std::string which = argv[1];
  bool ok;
  if (which == "1") ok = criterion_oracle_equivalence();
  else if (which == "2") ok = criterion_ci_calibration();
  else if (which == "3") ok = criterion_permc_figure();
  else if (which == "4") ok = criterion_drw_figure();
  else if (which == "5") ok = criterion_shd_ordering();
  else if (which == "6") ok = criterion_extra_not_missing();
  else if (which == "7") ok = criterion_mcar_correctness();
  else if (which == "8") ok = criterion_determinism();
  else if (which == "smoke50") ok = smoke_fifty_nodes();
  else {
    std::fprintf(stderr, "unknown criterion '%s'\n", which.c_str());
    return 2;
  }
  return ok ? 0 : 1;
}
