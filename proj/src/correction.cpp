#include "mvpc/correction.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "mvpc/rng.hpp"

namespace mvpc {

namespace {

constexpr int kKdeSampleCap = 5000;  // kernel sums are quadratic; cap one side
constexpr int kMinKdeSample = 30;
constexpr int kMinFitRowsMargin = 12;  // regression rows beyond |W| + |z|
// Truncation of the estimated density ratios. The raw ratio explodes in
// regions the retained rows barely cover; a handful of huge weights would
// collapse the effective sample size (and with it the power of every test
// sharing the factor), so the usual importance-weight compromise applies:
// cap the weights, accept a little bias in the far tail.
constexpr double kRatioClamp = 0.02;  // ratios kept inside [0.02, 50]

}  // namespace

const char* correction_method_name(CorrectionMethod m) {
  switch (m) {
    case CorrectionMethod::Plain: return "plain";
    case CorrectionMethod::PermC: return "permc";
    case CorrectionMethod::Drw: return "drw";
    case CorrectionMethod::Unresolvable: return "unresolvable";
  }
  return "?";
}

CorrectionMode correction_mode_from_name(const std::string& name) {
  if (name == "auto") return CorrectionMode::Auto;
  if (name == "permc") return CorrectionMode::ForcePermc;
  if (name == "drw") return CorrectionMode::ForceDrw;
  if (name == "off") return CorrectionMode::Off;
  throw std::invalid_argument("unknown correction mode: " + name);
}

CorrectionPlan build_plan(const CiQuery& query, const RParents& rp,
                          const Cpdag& skeleton, CorrectionMode mode) {
  CorrectionPlan plan;
  plan.query = query;

  // W: detected indicator parents over {x,y} ∪ z, transitively closed over
  // partially observed members (only those have parent entries).
  std::set<int> w;
  std::vector<int> frontier;
  auto absorb = [&](int v) {
    auto it = rp.parents.find(v);
    if (it == rp.parents.end()) return;
    for (int u : it->second)
      if (w.insert(u).second) frontier.push_back(u);
  };
  absorb(query.x);
  absorb(query.y);
  for (int zc : query.z) absorb(zc);
  while (!frontier.empty()) {
    int u = frontier.back();
    frontier.pop_back();
    absorb(u);
  }
  plan.w_set.assign(w.begin(), w.end());

  plan.cond_i_ok = !w.count(query.x) && !w.count(query.y);
  if (!plan.cond_i_ok)
    plan.violating_indicator = w.count(query.x) ? query.x : query.y;

  // Condition (ii): no indicator of a w_set member may bridge x and y.
  for (int member : plan.w_set) {
    auto it = rp.parents.find(member);
    if (it == rp.parents.end()) continue;
    const std::vector<int>& pa = it->second;
    bool has_x = std::binary_search(pa.begin(), pa.end(), query.x);
    bool has_y = std::binary_search(pa.begin(), pa.end(), query.y);
    bool bridges = has_x && has_y;
    for (size_t j = 0; j < pa.size() && !bridges; ++j) {
      int v = pa[j];
      bool near_x = v == query.x || skeleton.adjacent(v, query.x);
      bool near_y = v == query.y || skeleton.adjacent(v, query.y);
      bridges = near_x && near_y;
    }
    if (bridges) {
      plan.cond_ii_ok = false;
      if (plan.violating_indicator < 0) plan.violating_indicator = member;
      break;
    }
  }

  // Factors for the density-ratio weights: every partially observed member
  // of {x,y} ∪ z ∪ W with detected parents contributes one.
  std::set<int> va(plan.w_set.begin(), plan.w_set.end());
  va.insert(query.x);
  va.insert(query.y);
  va.insert(query.z.begin(), query.z.end());
  for (int v : va) {
    auto it = rp.parents.find(v);
    if (it != rp.parents.end()) plan.drw_factors.emplace_back(v, it->second);
  }

  if (mode == CorrectionMode::Off || plan.w_set.empty()) {
    plan.method = CorrectionMethod::Plain;
    return plan;
  }
  switch (mode) {
    case CorrectionMode::Auto:
      plan.method = plan.cond_i_ok && plan.cond_ii_ok ? CorrectionMethod::PermC
                                                      : CorrectionMethod::Drw;
      break;
    case CorrectionMode::ForcePermc:
      plan.method = plan.cond_i_ok ? CorrectionMethod::PermC
                                   : CorrectionMethod::Unresolvable;
      break;
    case CorrectionMode::ForceDrw:
      plan.method = CorrectionMethod::Drw;
      break;
    case CorrectionMode::Off:
      break;  // handled above
  }
  return plan;
}

namespace {

// Solves A X = B in place (A: k x k, B: k columns rhs_count) by Gauss-Jordan
// with partial pivoting. False when A is singular.
bool solve_system(std::vector<double>& a, std::vector<double>& b, int k,
                  int rhs_count) {
  auto A = [&](int i, int j) -> double& { return a[static_cast<size_t>(i) * k + j]; };
  auto B = [&](int i, int j) -> double& {
    return b[static_cast<size_t>(i) * rhs_count + j];
  };
  for (int col = 0; col < k; ++col) {
    int pivot = col;
    for (int r = col + 1; r < k; ++r)
      if (std::fabs(A(r, col)) > std::fabs(A(pivot, col))) pivot = r;
    if (std::fabs(A(pivot, col)) < 1e-12) return false;
    if (pivot != col) {
      for (int j = 0; j < k; ++j) std::swap(A(pivot, j), A(col, j));
      for (int j = 0; j < rhs_count; ++j) std::swap(B(pivot, j), B(col, j));
    }
    double inv = 1.0 / A(col, col);
    for (int j = 0; j < k; ++j) A(col, j) *= inv;
    for (int j = 0; j < rhs_count; ++j) B(col, j) *= inv;
    for (int r = 0; r < k; ++r) {
      if (r == col) continue;
      double f = A(r, col);
      if (f == 0.0) continue;
      for (int j = 0; j < k; ++j) A(r, j) -= f * A(col, j);
      for (int j = 0; j < rhs_count; ++j) B(r, j) -= f * B(col, j);
    }
  }
  return true;
}

std::vector<int> unique_sorted(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

CiResult permc_ci(const Dataset& d, const CorrectionPlan& plan,
                  std::uint64_t seed) {
  const CiQuery& q = plan.query;
  if (plan.w_set.empty()) return fisher_z(d, q);

  std::vector<int> targets{q.x, q.y};
  targets.insert(targets.end(), q.z.begin(), q.z.end());
  const int t_count = static_cast<int>(targets.size());
  const int w_count = static_cast<int>(plan.w_set.size());

  std::vector<int> involved = targets;
  involved.insert(involved.end(), plan.w_set.begin(), plan.w_set.end());
  DataView fit = testwise_delete(d, unique_sorted(involved));
  const int m = fit.row_count();

  CiResult degenerate;
  degenerate.effective_n = m;
  if (m < w_count + static_cast<int>(q.z.size()) + kMinFitRowsMargin)
    return degenerate;

  // One regression per target on [W, 1]; the Gram matrix is shared.
  const int k = w_count + 1;
  std::vector<const double*> wcols(w_count);
  std::vector<const unsigned char*> wmasks(w_count);
  for (int j = 0; j < w_count; ++j) {
    wcols[j] = d.column_data(plan.w_set[j]);
    wmasks[j] = d.column_mask(plan.w_set[j]);
  }
  std::vector<const double*> tcols(t_count);
  for (int t = 0; t < t_count; ++t) tcols[t] = d.column_data(targets[t]);

  std::vector<double> gram(static_cast<size_t>(k) * k, 0.0);
  std::vector<double> rhs(static_cast<size_t>(k) * t_count, 0.0);
  std::vector<double> row(k);
  for (int i = 0; i < m; ++i) {
    const int r = fit.rows[i];
    for (int j = 0; j < w_count; ++j) row[j] = wcols[j][r];
    row[w_count] = 1.0;
    for (int a = 0; a < k; ++a) {
      for (int b = a; b < k; ++b) gram[static_cast<size_t>(a) * k + b] += row[a] * row[b];
      for (int t = 0; t < t_count; ++t)
        rhs[static_cast<size_t>(a) * t_count + t] += row[a] * tcols[t][r];
    }
  }
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < a; ++b)
      gram[static_cast<size_t>(a) * k + b] = gram[static_cast<size_t>(b) * k + a];

  if (!solve_system(gram, rhs, k, t_count)) return degenerate;
  // rhs now holds the coefficients: rhs[j * t_count + t] = weight of W_j (or
  // the intercept at j = w_count) in target t's fit.

  // Residuals stay row-aligned: row i keeps its whole residual vector, so the
  // dependence among the targets' unexplained parts survives into the
  // rebuilt data.
  std::vector<std::vector<double>> resid(t_count, std::vector<double>(m));
  for (int i = 0; i < m; ++i) {
    const int r = fit.rows[i];
    for (int t = 0; t < t_count; ++t) {
      double pred = rhs[static_cast<size_t>(w_count) * t_count + t];
      for (int j = 0; j < w_count; ++j)
        pred += rhs[static_cast<size_t>(j) * t_count + t] * wcols[j][r];
      resid[t][i] = tcols[t][r] - pred;
    }
  }

  // One shared shuffle of the W block over the whole dataset; rebuilt rows
  // exist where the fitting row has a fully observed shuffled W partner.
  std::uint64_t s = derive_seed(seed, "permc", static_cast<std::uint64_t>(q.x),
                                static_cast<std::uint64_t>(q.y));
  std::vector<int> zs = q.z;
  std::sort(zs.begin(), zs.end());
  for (int zc : zs) s = derive_seed(s, "z", static_cast<std::uint64_t>(zc));
  Rng rng(s);
  const std::vector<int> sigma = rng.permutation(d.rows());

  auto w_observed = [&](int r) {
    for (int j = 0; j < w_count; ++j)
      if (wmasks[j] && wmasks[j][r]) return false;
    return true;
  };

  std::vector<std::vector<double>> virt(t_count);
  for (int t = 0; t < t_count; ++t) virt[t].reserve(m);
  for (int i = 0; i < m; ++i) {
    const int rs = sigma[fit.rows[i]];
    if (!w_observed(rs)) continue;
    for (int t = 0; t < t_count; ++t) {
      double val = rhs[static_cast<size_t>(w_count) * t_count + t];
      for (int j = 0; j < w_count; ++j)
        val += rhs[static_cast<size_t>(j) * t_count + t] * wcols[j][rs];
      virt[t].push_back(val + resid[t][i]);
    }
  }

  std::vector<ColumnRef> cols(t_count);
  for (int t = 0; t < t_count; ++t) cols[t] = {virt[t].data(), nullptr};
  return ci_test(cols, static_cast<int>(virt[0].size()),
                 static_cast<int>(q.z.size()), q.alpha);
}

const std::vector<double>& DrwWeightCache::factor(int indicator_var,
                                                  const std::vector<int>& parents) {
  auto it = cache_.find(indicator_var);
  if (it != cache_.end()) return it->second;

  const Dataset& d = *d_;
  const int n = d.rows();
  const int dim = static_cast<int>(parents.size());

  std::vector<const double*> pcols(dim);
  std::vector<const unsigned char*> pmasks(dim);
  for (int j = 0; j < dim; ++j) {
    pcols[j] = d.column_data(parents[j]);
    pmasks[j] = d.column_mask(parents[j]);
  }
  const unsigned char* own_mask = d.column_mask(indicator_var);

  std::vector<int> pa_rows;     // parent values observed
  std::vector<int> denom_rows;  // additionally the variable itself observed
  for (int r = 0; r < n; ++r) {
    bool ok = true;
    for (int j = 0; j < dim && ok; ++j) ok = !(pmasks[j] && pmasks[j][r]);
    if (!ok) continue;
    pa_rows.push_back(r);
    if (!(own_mask && own_mask[r])) denom_rows.push_back(r);
  }

  std::vector<double> beta;  // stays empty on a degenerate factor
  if (static_cast<int>(denom_rows.size()) >= kMinKdeSample) {
    auto cap = [](const std::vector<int>& rows) {
      if (static_cast<int>(rows.size()) <= kKdeSampleCap) return rows;
      std::vector<int> out;
      out.reserve(kKdeSampleCap);
      const double stride =
          static_cast<double>(rows.size()) / static_cast<double>(kKdeSampleCap);
      for (int i = 0; i < kKdeSampleCap; ++i)
        out.push_back(rows[static_cast<size_t>(i * stride)]);
      return out;
    };
    auto dims_of = [&](const std::vector<int>& rows) {
      std::vector<std::vector<double>> dims(dim);
      for (int j = 0; j < dim; ++j) {
        dims[j].reserve(rows.size());
        for (int r : rows) dims[j].push_back(pcols[j][r]);
      }
      return dims;
    };
    // Weights are only ever consumed on rows where the variable itself is
    // observed (the weighted test deletes on it), so evaluating beyond
    // denom_rows would be wasted kernel sums.
    std::vector<double> ratio =
        kde_density_ratio(dims_of(cap(pa_rows)), dims_of(cap(denom_rows)),
                          dims_of(denom_rows), kRatioClamp);
    beta.assign(n, 1.0);
    for (size_t i = 0; i < denom_rows.size(); ++i) beta[denom_rows[i]] = ratio[i];
  }
  return cache_.emplace(indicator_var, std::move(beta)).first->second;
}

CiResult drw_ci(const Dataset& d, const CorrectionPlan& plan,
                DrwWeightCache& cache) {
  const CiQuery& q = plan.query;
  if (plan.w_set.empty()) return fisher_z(d, q);

  std::vector<int> va{q.x, q.y};
  va.insert(va.end(), q.z.begin(), q.z.end());
  va.insert(va.end(), plan.w_set.begin(), plan.w_set.end());
  DataView view = testwise_delete(d, unique_sorted(va));

  CiResult degenerate;
  degenerate.effective_n = view.row_count();
  if (view.row_count() == 0) return degenerate;

  std::vector<double> weights(d.rows(), 1.0);
  for (const auto& [ivar, parents] : plan.drw_factors) {
    const std::vector<double>& beta = cache.factor(ivar, parents);
    if (beta.empty()) return degenerate;
    for (int r : view.rows) weights[r] *= beta[r];
  }

  // Mean-one normalization over the tested rows absorbs the constant
  // normalizer of the weight product.
  double sum = 0.0;
  for (int r : view.rows) sum += weights[r];
  if (!(sum > 0.0)) return degenerate;
  const double scale = static_cast<double>(view.row_count()) / sum;
  for (int r : view.rows) weights[r] *= scale;

  std::vector<ColumnRef> cols;
  cols.reserve(q.z.size() + 2);
  cols.push_back({d.column_data(q.x), nullptr});
  cols.push_back({d.column_data(q.y), nullptr});
  for (int zc : q.z) cols.push_back({d.column_data(zc), nullptr});
  return ci_test(cols, d.rows(), static_cast<int>(q.z.size()), q.alpha,
                 weights.data(), view.rows.data(), view.row_count());
}

SkeletonState correct_skeleton(const SkeletonState& s,
                               const std::vector<std::pair<int, int>>& candidates,
                               const RParents& rp, const Dataset& d,
                               double alpha, int max_cond, std::uint64_t seed,
                               CorrectionMode mode,
                               std::vector<CorrectionRecord>* audit) {
  SkeletonState out = s;
  if (mode == CorrectionMode::Off || candidates.empty()) return out;
  if (max_cond < 0) throw std::invalid_argument("negative conditioning bound");

  DrwWeightCache cache(d);
  std::vector<std::pair<int, int>> pairs = candidates;
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  struct Removal {
    int a, b;
    std::vector<int> sepset;
  };
  std::vector<Removal> removals;

  for (const auto& [a, b] : pairs) {
    if (!s.skeleton.adjacent(a, b)) continue;

    std::vector<int> side_a, side_b;
    for (int v : s.skeleton.neighbors(a))
      if (v != b) side_a.push_back(v);
    for (int v : s.skeleton.neighbors(b))
      if (v != a) side_b.push_back(v);

    bool removed = false;
    auto run_corrected = [&](const std::vector<int>& z) {
      CiQuery q{a, b, z, alpha};
      CorrectionPlan plan = build_plan(q, rp, s.skeleton, mode);
      CiResult res;
      switch (plan.method) {
        case CorrectionMethod::Plain: res = fisher_z(d, q); break;
        case CorrectionMethod::PermC: res = permc_ci(d, plan, seed); break;
        case CorrectionMethod::Drw: res = drw_ci(d, plan, cache); break;
        case CorrectionMethod::Unresolvable: res = CiResult{}; break;
      }
      if (audit) audit->push_back({q, plan.w_set, plan.method, res, false});
      if (res.independent) {
        removals.push_back({a, b, z});
        if (audit) audit->back().removed = true;
        removed = true;
      }
    };

    for (int level = 0; level <= max_cond && !removed; ++level) {
      auto enumerate = [&](const std::vector<int>& side, bool skip_dups) {
        if (static_cast<int>(side.size()) < level) return;
        std::vector<int> idx(level);
        for (int i = 0; i < level; ++i) idx[i] = i;
        std::vector<int> z(level);
        while (true) {
          for (int i = 0; i < level; ++i) z[i] = side[idx[i]];
          bool dup = skip_dups && std::includes(side_a.begin(), side_a.end(),
                                                z.begin(), z.end());
          if (!dup) {
            run_corrected(z);
            if (removed) return;
          }
          // next lexicographic subset
          int i = level - 1;
          while (i >= 0 && idx[i] == static_cast<int>(side.size()) - (level - i)) --i;
          if (i < 0) break;
          ++idx[i];
          for (int j = i + 1; j < level; ++j) idx[j] = idx[j - 1] + 1;
        }
      };
      enumerate(side_a, false);
      if (!removed && level > 0) enumerate(side_b, true);
    }
  }

  for (const Removal& rem : removals) {
    out.skeleton.remove_edge(rem.a, rem.b);
    out.sepsets[{std::min(rem.a, rem.b), std::max(rem.a, rem.b)}] = rem.sepset;
  }
  return out;
}

}  // namespace mvpc
