#pragma once

#include <span>
#include <vector>

#include "mvpc/dataset.hpp"

namespace mvpc {

struct CiQuery {
  int x = -1;
  int y = -1;
  std::vector<int> z;
  double alpha = 0.05;
};

struct CiResult {
  double statistic = 0.0;
  double p_value = 1.0;
  long long effective_n = 0;
  bool independent = false;
  bool degenerate = true;  // too few usable rows or singular correlation matrix
};

// One column of a test: raw values plus an optional missingness mask
// (nullptr = fully observed). Rows where any referenced mask is set are
// dropped — test-wise deletion fused into the accumulation.
struct ColumnRef {
  const double* values = nullptr;
  const unsigned char* mask = nullptr;
};

// Shared core for every Fisher-z variant. cols[0] is x, cols[1] is y, the
// remaining z_count columns condition. Weights are per-row (indexed by the
// original row id); nullptr means unit weights, and the unit-weight path runs
// the identical arithmetic, so weighted results with uniform weights match
// unweighted results bit for bit. A row subset restricts iteration.
//
// Degenerate when the (Kish) effective sample size is below z_count + 10 or
// the correlation matrix cannot be inverted; degenerate results report
// independent = false so a skeleton search keeps the edge.
CiResult ci_test(std::span<const ColumnRef> cols, int n, int z_count, double alpha,
                 const double* row_weights = nullptr,
                 const int* row_subset = nullptr, int subset_count = 0);

// Fisher-z partial-correlation test with test-wise deletion over {x, y} ∪ z.
CiResult fisher_z(const Dataset& d, const CiQuery& q);

// Same test on a deletion view; the query still names parent-dataset columns,
// which must all be present in the view.
CiResult fisher_z(const DataView& v, const CiQuery& q);

// Weighted variant: per-row weights aligned with d's rows, effective sample
// size (sum w)^2 / sum w^2.
CiResult weighted_fisher_z(const Dataset& d, const CiQuery& q,
                           std::span<const double> row_weights);

// Partial correlation of variables 0 and 1 given the rest, from a k x k
// correlation matrix (row-major, modified in place). False when singular.
bool partial_correlation(std::vector<double>& corr, int k, double* out);

// Two-sided tail probability of the Fisher-z statistic.
double fisher_z_p_value(double statistic);

// Ratio of product-Gaussian kernel density estimates evaluated at each eval
// point, clamped to [clamp_eps, 1/clamp_eps]. Samples and eval points are
// dimension-major: sample[j][i] is coordinate j of point i. Bandwidths use
// sd_j * (4 / ((d+2) n))^(1/(d+4)) per dimension, computed separately for the
// numerator and denominator samples. Throws on empty samples or dimension
// mismatch.
std::vector<double> kde_density_ratio(const std::vector<std::vector<double>>& numer,
                                      const std::vector<std::vector<double>>& denom,
                                      const std::vector<std::vector<double>>& eval,
                                      double clamp_eps = 1e-3);

}  // namespace mvpc
