#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "mvpc/citest.hpp"
#include "mvpc/dataset.hpp"
#include "mvpc/discovery.hpp"

namespace mvpc {

enum class CorrectionMethod { Plain, PermC, Drw, Unresolvable };
enum class CorrectionMode { Auto, ForcePermc, ForceDrw, Off };

const char* correction_method_name(CorrectionMethod m);
CorrectionMode correction_mode_from_name(const std::string& name);

// How one conditional-independence query should be corrected.
//
// w_set is the union of the detected indicator parents over the partially
// observed members of {x, y} ∪ z, closed transitively: while any member of
// w_set is itself partially observed, its own indicator parents join the set.
//
// Condition (i): neither x nor y ended up inside w_set (regressing a variable
// on itself would be circular). Condition (ii): no indicator of a w_set
// member bridges x and y — both among its parents, or some parent adjacent to
// (or equal to) each of them in the skeleton.
struct CorrectionPlan {
  CiQuery query;
  std::vector<int> w_set;  // sorted ascending
  CorrectionMethod method = CorrectionMethod::Plain;
  bool cond_i_ok = true;
  bool cond_ii_ok = true;
  int violating_indicator = -1;  // partially observed column behind a failure
  // Density-ratio factors: (indicator variable, its detected parents) for
  // every partially observed member of {x,y} ∪ z ∪ w_set with known parents.
  std::vector<std::pair<int, std::vector<int>>> drw_factors;
};

// Routing: empty w_set is always Plain. Auto picks PermC when both
// conditions hold, otherwise DRW (valid without them). Forcing PermC against
// a Condition (i) violation yields Unresolvable — the edge is kept and the
// violation reported. Off is Plain regardless.
CorrectionPlan build_plan(const CiQuery& query, const RParents& rp,
                          const Cpdag& skeleton, CorrectionMode mode);

// Permutation-corrected test. Regresses x, y, and each z member on w_set
// (intercept included) over the rows where all of them are observed, then
// rebuilds every variable from one shared shuffle of the w_set block plus the
// fitted residuals, and tests the rebuilt columns. The rebuilt rows carry
// their whole residual vector together, which preserves the residual
// dependence the test is after. Too few fitting rows → degenerate (edge kept).
CiResult permc_ci(const Dataset& d, const CorrectionPlan& plan,
                  std::uint64_t seed);

// Per-row density-ratio correction weights, cached per indicator: the plans
// of many queries share factors, and a factor's KDE sample depends only on
// the indicator, never on the query.
class DrwWeightCache {
 public:
  explicit DrwWeightCache(const Dataset& d) : d_(&d) {}

  // beta vector over all rows of d (rows where the parent set is unobserved
  // hold 1.0 and must not be consumed). Empty result = degenerate factor
  // (KDE sample too small).
  const std::vector<double>& factor(int indicator_var,
                                    const std::vector<int>& parents);

 private:
  const Dataset* d_;
  std::map<int, std::vector<double>> cache_;
};

// Density-ratio-weighted test: rows observed across {x,y} ∪ z ∪ w_set are
// reweighted by the product of the plan's factors (normalized to mean one,
// which absorbs the constant normalizer) and tested with the weighted
// Fisher-z. Degenerate factors → degenerate result (edge kept).
CiResult drw_ci(const Dataset& d, const CorrectionPlan& plan,
                DrwWeightCache& cache);

// One corrected test inside correct_skeleton, for the audit trail.
struct CorrectionRecord {
  CiQuery query;
  std::vector<int> w_set;
  CorrectionMethod method = CorrectionMethod::Plain;
  CiResult result;
  bool removed = false;  // this test removed the candidate edge
};

// Re-runs the sepset search for each candidate pair with corrected tests
// (conditioning sets from the input skeleton's adjacencies, sizes
// 0..max_cond). An independent verdict removes the edge and records the
// separating set; all removals apply after every pair is decided, so
// candidate order cannot matter. Off returns the input unchanged.
SkeletonState correct_skeleton(const SkeletonState& s,
                               const std::vector<std::pair<int, int>>& candidates,
                               const RParents& rp, const Dataset& d,
                               double alpha, int max_cond, std::uint64_t seed,
                               CorrectionMode mode,
                               std::vector<CorrectionRecord>* audit = nullptr);

}  // namespace mvpc
