#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "mvpc/dataset.hpp"
#include "mvpc/graph.hpp"

namespace mvpc {

// Linear structural equation model with Gaussian noise: each variable is a
// weighted sum of its parents plus independent noise.
struct SemSpec {
  Dag dag;
  std::map<std::pair<int, int>, double> coefficients;  // (from, to) -> weight
  std::vector<double> noise_sd;                        // per node

  void validate() const;  // throws std::invalid_argument
};

// One masked variable: P(missing) = logistic(intercept + slopes . parents).
// A NaN intercept is calibrated at injection time so the marginal missing
// rate hits the spec's target.
struct MissIndicator {
  int var = -1;
  std::vector<int> parents;
  std::vector<double> slopes;
  double intercept = std::numeric_limits<double>::quiet_NaN();
};

struct MissSpec {
  std::vector<MissIndicator> indicators;  // unique vars, no self-masking
  double target_rate = 0.2;

  void validate(int column_count) const;  // throws std::invalid_argument
};

// Random DAG with edge probability expected_degree/(p-1) over a random
// topological order, rejection-resampled until it contains at least
// min_colliders unshielded colliders.
Dag random_dag(int p, double expected_degree, int min_colliders, std::uint64_t seed);

// Coefficients drawn uniformly from ±[coef_lo, coef_hi] (random sign), unit
// noise everywhere.
SemSpec random_sem(Dag dag, double coef_lo, double coef_hi, std::uint64_t seed);

// n iid rows in topological order. Same spec, n, and seed give identical data.
Dataset sample_sem(const SemSpec& spec, int n, std::uint64_t seed);

// Applies the missingness model to a fully observed dataset. Indicator
// probabilities are always driven by the latent (pre-masking) values, so one
// indicator masking another's parent never changes the draw.
Dataset inject_missingness(const Dataset& d, const MissSpec& spec, std::uint64_t seed);

// Ground-truth m-graph implied by a DAG plus a missingness model.
MGraph mgraph_of(const Dag& dag, const MissSpec& miss);

// --- benchmark suites ---------------------------------------------------------

struct SuiteConfig {
  int p = 20;
  std::vector<int> sample_sizes = {1000, 10000};
  std::vector<MGraph::Mechanism> mechanisms = {MGraph::Mechanism::MAR};
  int replicates = 5;
  int vm_min = -1;  // -1: default range by p (20 -> 6..10, 50 -> 10..14)
  int vm_max = -1;
  double missing_rate = 0.2;
  double coef_lo = 0.5;
  double coef_hi = 0.9;
  double expected_degree = 2.0;
  int min_colliders = 2;
  double slope = 1.0;  // |logistic slope| per indicator parent
  std::uint64_t seed = 1;

  int effective_vm_min() const;
  int effective_vm_max() const;
  void validate() const;
};

struct SuiteInstance {
  std::string name;
  MGraph::Mechanism mechanism = MGraph::Mechanism::MCAR;
  int p = 0;
  int n = 0;
  int replicate = 0;
  MGraph truth;
  Dataset complete;
  Dataset masked;
};

struct Suite {
  SuiteConfig config;
  std::vector<SuiteInstance> instances;
};

// Deterministic function of the config (every draw derives from config.seed).
// Graphs and missingness structure are shared across sample sizes within a
// (mechanism, replicate) cell so comparisons across n are paired.
Suite make_benchmark_suite(const SuiteConfig& config);

// On-disk layout: <dir>/manifest.txt plus per-instance masked CSV, complete
// CSV, and ground-truth edge list. See README for the manifest schema.
void write_suite(const Suite& suite, const std::string& dir);
Suite load_suite(const std::string& dir);

MGraph::Mechanism mechanism_from_name(const std::string& name);

}  // namespace mvpc
