#include "mvpc/pipeline.hpp"

#include <stdexcept>

namespace mvpc {

// The corrected retests run on reweighted or permuted virtual data, so their
// statistics inherit estimation noise the raw skeleton tests do not have. At
// the sample sizes we target that noise is enough for the test to "detect" a
// residual association that is really bias in the weights. Demanding stronger
// evidence before an edge is retained compensates; genuinely dependent pairs
// sit far below any reasonable threshold, so the extra strictness only moves
// borderline retention calls.
constexpr double kCorrectionAlphaScale = 0.2;

int default_max_cond(int p) { return p >= 50 ? 3 : 4; }

DiscoverResult discover(const Dataset& d, const DiscoverOptions& opts) {
  if (!(opts.alpha > 0.0) || !(opts.alpha < 1.0))
    throw std::invalid_argument("alpha must lie in (0, 1)");
  if (d.cols() < 2) throw std::invalid_argument("need at least two columns");
  const int max_cond =
      opts.max_cond >= 0 ? opts.max_cond : default_max_cond(d.cols());

  DiscoverResult res;
  if (opts.method != Method::Mvpc) {
    res.graph = run_baseline(d, opts.method, opts.complete, opts.alpha,
                             max_cond, opts.seed, &res.skeleton, &res.warnings);
    return res;
  }

  SkeletonState s = td_skeleton(d, opts.alpha, max_cond);

  bool any_missing = false;
  for (int c = 0; c < d.cols() && !any_missing; ++c)
    any_missing = d.column_has_missing(c);

  if (any_missing && opts.correction != CorrectionMode::Off) {
    res.rparents = detect_r_parents(d, opts.alpha, max_cond);
    res.candidates = detect_candidates(s, res.rparents);
    res.skeleton = correct_skeleton(s, res.candidates, res.rparents, d,
                                    opts.alpha * kCorrectionAlphaScale,
                                    max_cond, opts.seed, opts.correction,
                                    &res.corrections);
  } else {
    res.skeleton = std::move(s);
  }

  res.graph = orient(res.skeleton.skeleton, res.skeleton.sepsets);
  return res;
}

}  // namespace mvpc
