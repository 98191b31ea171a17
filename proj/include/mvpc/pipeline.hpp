#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvpc/correction.hpp"
#include "mvpc/dataset.hpp"
#include "mvpc/discovery.hpp"
#include "mvpc/graph.hpp"

namespace mvpc {

// Conditioning-set bound used when the caller does not pick one: generous for
// small problems, tighter once the variable count makes level-4 enumeration
// explode.
int default_max_cond(int p);

struct DiscoverOptions {
  Method method = Method::Mvpc;
  double alpha = 0.05;
  int max_cond = -1;  // -1: default_max_cond(columns)
  std::uint64_t seed = 1;
  CorrectionMode correction = CorrectionMode::Auto;
  const Dataset* complete = nullptr;  // reference data for ideal / target
};

struct DiscoverResult {
  Cpdag graph;
  SkeletonState skeleton;  // state the orientation ran on (post-correction)
  RParents rparents;                            // mvpc only
  std::vector<std::pair<int, int>> candidates;  // mvpc only
  std::vector<CorrectionRecord> corrections;    // mvpc only
  std::vector<std::string> warnings;
};

// One entry point for every method. mvpc = deletion-based skeleton, indicator
// parent detection, candidate detection, corrected re-tests, orientation; the
// detection steps are skipped when the data are fully observed or correction
// is off (the result then equals td-pc). Other methods defer to run_baseline.
DiscoverResult discover(const Dataset& d, const DiscoverOptions& opts);

}  // namespace mvpc
