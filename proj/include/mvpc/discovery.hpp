#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mvpc/citest.hpp"
#include "mvpc/dataset.hpp"
#include "mvpc/graph.hpp"

namespace mvpc {

struct CiTestLogEntry {
  CiQuery query;
  CiResult result;
};

// Result of a skeleton search: undirected graph, separating sets for the
// removed pairs, and the full test log in execution order.
struct SkeletonState {
  Cpdag skeleton;
  Sepsets sepsets;
  std::vector<CiTestLogEntry> test_log;
};

// Pluggable conditional-independence test: (x, y, z) -> result. The z vector
// arrives sorted ascending.
using CiFunction = std::function<CiResult(int, int, const std::vector<int>&)>;

// Stable PC skeleton search over p nodes. Edges removed within a level are
// kept until the level completes, so the outcome does not depend on pair
// order. Conditioning sets are drawn from the adjacency snapshot of either
// endpoint, enumerated lexicographically; the empty set is tested once.
// `alpha` is only stamped into the logged queries — the verdicts come from
// `ci` itself.
SkeletonState pc_skeleton(int p, std::vector<std::string> labels,
                          const CiFunction& ci, double alpha, int max_cond);

// PC skeleton with the test-wise-deletion Fisher-z test (each query drops
// exactly the rows missing one of its own variables).
SkeletonState td_skeleton(const Dataset& d, double alpha, int max_cond);

// Detected direct causes of each missingness indicator. Keys are partially
// observed column ids; in the test log, query.x holds the column id whose
// indicator was tested (the indicator itself is not a dataset column).
struct RParents {
  std::map<int, std::vector<int>> parents;  // values sorted ascending
  std::vector<CiTestLogEntry> test_log;

  bool is_parent(int indicator_var, int v) const;
};

// Edge elimination between each indicator R_i and every other substantive
// variable: R_i -- V_j survives only if no conditioning set (over the other
// remaining candidates, sizes 0..max_cond) separates them. Indicators never
// appear in conditioning sets; rows are dropped per test where V_j or a
// conditioning variable is missing (never for missingness of V_i itself).
RParents detect_r_parents(const Dataset& d, double alpha, int max_cond);

// Adjacent pairs that could carry an extraneous edge: the pair shares a
// common adjacent variable in the skeleton, or some indicator has both ends
// among its detected parents. Sorted, each pair (a, b) with a < b.
std::vector<std::pair<int, int>> detect_candidates(const SkeletonState& s,
                                                   const RParents& rp);

enum class Method { Mvpc, TdPc, LdPc, Ideal, Target };

const char* method_name(Method m);
Method method_from_name(const std::string& name);  // throws on unknown names

// The deletion-based baselines and the oracle-ish references:
//   TD-PC  - PC with per-test deletion on the masked data.
//   LD-PC  - PC on the listwise-deleted data (complete undirected graph plus
//            a warning when no row survives).
//   ideal  - PC on the complete (pre-masking) data.
//   target - PC on the complete data, but each test subsampled (seeded,
//            without replacement) to the effective sample size TD-PC logged
//            for the same query; queries TD-PC never ran use all rows.
// ideal and target require `complete`; `skeleton_out` (optional) receives the
// final skeleton state; warnings collect degeneracies worth surfacing.
Cpdag run_baseline(const Dataset& d, Method method, const Dataset* complete,
                   double alpha, int max_cond, std::uint64_t seed,
                   SkeletonState* skeleton_out = nullptr,
                   std::vector<std::string>* warnings = nullptr);

}  // namespace mvpc
