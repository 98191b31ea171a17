#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvpc/discovery.hpp"
#include "mvpc/graph.hpp"
#include "mvpc/synth.hpp"

namespace mvpc {

// Structural Hamming distance: one unit per unordered node pair whose mark
// (absent, either direction, undirected) differs. A reversal therefore costs
// 1, as does a missing or extra edge. Throws on node-count mismatch.
int shd(const Cpdag& estimate, const Cpdag& truth);

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
};

// Skeleton-level: shared adjacencies over estimated / true adjacencies.
// Empty denominators: precision of an empty estimate is 1 when the truth is
// empty too, else 0; recall against an empty truth is 1.
PrecisionRecall adjacency_pr(const Cpdag& estimate, const Cpdag& truth);

// Directed edges only; a reversed edge is wrong on both axes. The same
// empty-denominator conventions, over directed-edge counts.
PrecisionRecall orientation_pr(const Cpdag& estimate, const Cpdag& truth);

// True adjacencies absent from the estimate / estimated adjacencies absent
// from the truth.
int missing_adjacencies(const Cpdag& estimate, const Cpdag& truth);
int extra_adjacencies(const Cpdag& estimate, const Cpdag& truth);

struct EvalRow {
  std::string method;
  std::string mechanism;
  int p = 0;
  int n = 0;
  int replicate = 0;
  int shd = 0;
  double adj_prec = 0.0;
  double adj_rec = 0.0;
  double ori_prec = 0.0;
  double ori_rec = 0.0;
};

// Aggregate over the replicates of one (method, mechanism, p, n) cell.
struct EvalSummary {
  std::string method;
  std::string mechanism;
  int p = 0;
  int n = 0;
  int replicates = 0;
  double mean_shd = 0.0;
  double sd_shd = 0.0;  // sample sd; 0 with a single replicate
  double mean_adj_prec = 0.0;
  double mean_adj_rec = 0.0;
  double mean_ori_prec = 0.0;
  double mean_ori_rec = 0.0;
};

struct EvalReport {
  std::vector<EvalRow> rows;  // sorted by (method, mechanism, p, n, replicate)

  // CSV: method,mechanism,p,n,replicate,shd,adj_prec,adj_rec,ori_prec,ori_rec
  std::string to_csv() const;
  std::vector<EvalSummary> summaries() const;  // sorted cell aggregates
  std::string summary_table() const;           // aligned, human-readable
};

// Estimated graph of one (instance, method) run, for callers that need more
// than the metric rows.
struct BenchGraph {
  std::string method;
  int instance = -1;  // index into suite.instances
  Cpdag graph;
};

// Runs every method on every instance (ideal and target read the retained
// complete data) and scores against the pattern of the true DAG. Per-task
// failures land in `failures` ("instance x method: message") and skip the
// row instead of aborting the run. jobs > 1 evaluates tasks in parallel;
// results are identical to the sequential order because every task derives
// its own seed and rows are assembled by task index.
EvalReport run_benchmark(const Suite& suite, const std::vector<Method>& methods,
                         double alpha, int max_cond, std::uint64_t seed,
                         int jobs = 1, std::vector<BenchGraph>* graphs = nullptr,
                         std::vector<std::string>* failures = nullptr);

}  // namespace mvpc
