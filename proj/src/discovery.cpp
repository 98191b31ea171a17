#include "mvpc/discovery.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

#include "mvpc/rng.hpp"

namespace mvpc {

namespace {

// First k-subset of {0..m-1} in lexicographic order, or false if none.
bool first_subset(std::vector<int>& idx, int k, int m) {
  if (k > m) return false;
  idx.resize(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  return true;
}

// Advance to the next k-subset in lexicographic order.
bool next_subset(std::vector<int>& idx, int m) {
  const int k = static_cast<int>(idx.size());
  for (int i = k - 1; i >= 0; --i) {
    if (idx[i] < m - (k - i)) {
      ++idx[i];
      for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

struct PairRemoval {
  int x, y;
  std::vector<int> sepset;
};

}  // namespace

SkeletonState pc_skeleton(int p, std::vector<std::string> labels,
                          const CiFunction& ci, double alpha, int max_cond) {
  if (p < 2) throw std::invalid_argument("skeleton search needs at least two nodes");
  if (max_cond < 0) throw std::invalid_argument("negative conditioning bound");

  SkeletonState state;
  state.skeleton = Cpdag::complete_undirected(p, std::move(labels));

  auto run_test = [&](int x, int y, const std::vector<int>& z) {
    CiResult res = ci(x, y, z);
    state.test_log.push_back({CiQuery{x, y, z, alpha}, res});
    return res;
  };

  for (int level = 0; level <= max_cond; ++level) {
    // Snapshot adjacencies: removals of this level must not influence the
    // conditioning sets used within it.
    std::vector<std::vector<int>> adj(p);
    for (int v = 0; v < p; ++v) adj[v] = state.skeleton.neighbors(v);

    std::vector<PairRemoval> removals;
    bool deeper_possible = false;

    for (int x = 0; x < p; ++x) {
      for (int y : adj[x]) {
        if (y <= x) continue;

        std::vector<int> side_x;  // adj(x) \ {y}
        for (int v : adj[x])
          if (v != y) side_x.push_back(v);
        std::vector<int> side_y;  // adj(y) \ {x}
        for (int v : adj[y])
          if (v != x) side_y.push_back(v);

        if (static_cast<int>(std::max(side_x.size(), side_y.size())) > level)
          deeper_possible = true;

        bool removed = false;
        std::vector<int> z(level);
        auto try_side = [&](const std::vector<int>& side, bool skip_in_first) {
          std::vector<int> idx;
          if (!first_subset(idx, level, static_cast<int>(side.size()))) return;
          do {
            for (int i = 0; i < level; ++i) z[i] = side[idx[i]];
            if (skip_in_first) {
              // Already tested from the other endpoint's side.
              bool dup = std::includes(side_x.begin(), side_x.end(), z.begin(),
                                       z.end());
              if (dup) continue;
            }
            CiResult res = run_test(x, y, z);
            if (res.independent) {
              removals.push_back({x, y, z});
              removed = true;
              return;
            }
          } while (next_subset(idx, static_cast<int>(side.size())));
        };

        try_side(side_x, false);
        // The empty set needs one test only; larger sets can differ by side.
        if (!removed && level > 0) try_side(side_y, true);
      }
    }

    for (const PairRemoval& rem : removals) {
      state.skeleton.remove_edge(rem.x, rem.y);
      state.sepsets[{rem.x, rem.y}] = rem.sepset;
    }
    if (!deeper_possible) break;
  }
  return state;
}

SkeletonState td_skeleton(const Dataset& d, double alpha, int max_cond) {
  if (d.cols() < 2) throw std::invalid_argument("need at least two columns");
  CiFunction ci = [&d, alpha](int x, int y, const std::vector<int>& z) {
    return fisher_z(d, CiQuery{x, y, z, alpha});
  };
  return pc_skeleton(d.cols(), d.labels(), ci, alpha, max_cond);
}

bool RParents::is_parent(int indicator_var, int v) const {
  auto it = parents.find(indicator_var);
  if (it == parents.end()) return false;
  return std::binary_search(it->second.begin(), it->second.end(), v);
}

RParents detect_r_parents(const Dataset& d, double alpha, int max_cond) {
  if (max_cond < 0) throw std::invalid_argument("negative conditioning bound");
  const int p = d.cols();
  RParents rp;

  for (int i = 0; i < p; ++i) {
    if (!d.column_has_missing(i)) continue;
    const std::vector<double> ind = indicator_column(d, i);

    // Edge elimination between R_i and the substantive variables, stable-PC
    // style: the conditioning pool at each level is the snapshot of the
    // still-adjacent candidates.
    std::vector<int> cand;
    for (int j = 0; j < p; ++j)
      if (j != i) cand.push_back(j);

    for (int level = 0; level <= max_cond; ++level) {
      const std::vector<int> pool = cand;
      if (static_cast<int>(pool.size()) - 1 < level) break;
      std::vector<char> drop(p, 0);

      for (int j : pool) {
        std::vector<int> others;
        for (int v : pool)
          if (v != j) others.push_back(v);

        std::vector<int> idx, z(level);
        if (!first_subset(idx, level, static_cast<int>(others.size()))) continue;
        do {
          for (int t = 0; t < level; ++t) z[t] = others[idx[t]];

          // Rows drop only for missingness of V_j or the conditioning set;
          // missingness of V_i itself is the signal, never a deletion cause.
          std::vector<ColumnRef> cols;
          cols.reserve(z.size() + 2);
          cols.push_back({ind.data(), nullptr});
          cols.push_back({d.column_data(j), d.column_mask(j)});
          for (int zc : z) cols.push_back({d.column_data(zc), d.column_mask(zc)});
          CiResult res = ci_test(cols, d.rows(), level, alpha);
          rp.test_log.push_back({CiQuery{i, j, z, alpha}, res});
          if (res.independent) {
            drop[j] = 1;
            break;
          }
        } while (next_subset(idx, static_cast<int>(others.size())));
      }

      cand.erase(std::remove_if(cand.begin(), cand.end(),
                                [&](int v) { return drop[v]; }),
                 cand.end());
    }

    if (!cand.empty()) rp.parents[i] = cand;  // already sorted ascending
  }
  return rp;
}

std::vector<std::pair<int, int>> detect_candidates(const SkeletonState& s,
                                                   const RParents& rp) {
  const int p = s.skeleton.node_count();
  std::vector<std::pair<int, int>> out;
  for (int a = 0; a < p; ++a) {
    for (int b = a + 1; b < p; ++b) {
      if (!s.skeleton.adjacent(a, b)) continue;
      bool flagged = false;
      for (int c = 0; c < p && !flagged; ++c)
        if (c != a && c != b && s.skeleton.adjacent(a, c) &&
            s.skeleton.adjacent(b, c))
          flagged = true;
      for (auto it = rp.parents.begin(); !flagged && it != rp.parents.end(); ++it)
        flagged = std::binary_search(it->second.begin(), it->second.end(), a) &&
                  std::binary_search(it->second.begin(), it->second.end(), b);
      if (flagged) out.emplace_back(a, b);
    }
  }
  return out;
}

const char* method_name(Method m) {
  switch (m) {
    case Method::Mvpc: return "mvpc";
    case Method::TdPc: return "td-pc";
    case Method::LdPc: return "ld-pc";
    case Method::Ideal: return "ideal";
    case Method::Target: return "target";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  if (name == "mvpc") return Method::Mvpc;
  if (name == "td-pc" || name == "tdpc") return Method::TdPc;
  if (name == "ld-pc" || name == "ldpc") return Method::LdPc;
  if (name == "ideal") return Method::Ideal;
  if (name == "target") return Method::Target;
  throw std::invalid_argument("unknown method: " + name);
}

namespace {

// Deterministic per-query seed for the target baseline's subsampling.
std::uint64_t target_query_seed(std::uint64_t seed, int x, int y,
                                const std::vector<int>& z) {
  int a = std::min(x, y), b = std::max(x, y);
  std::uint64_t s = derive_seed(seed, "target", static_cast<std::uint64_t>(a),
                                static_cast<std::uint64_t>(b));
  std::vector<int> zs = z;
  std::sort(zs.begin(), zs.end());
  for (int zc : zs) s = derive_seed(s, "z", static_cast<std::uint64_t>(zc));
  return s;
}

}  // namespace

Cpdag run_baseline(const Dataset& d, Method method, const Dataset* complete,
                   double alpha, int max_cond, std::uint64_t seed,
                   SkeletonState* skeleton_out, std::vector<std::string>* warnings) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::invalid_argument("alpha must lie in (0, 1)");
  if ((method == Method::Ideal || method == Method::Target) && !complete)
    throw std::invalid_argument("this baseline requires the complete dataset");
  if (complete) {
    for (int c = 0; c < complete->cols(); ++c)
      if (complete->column_has_missing(c))
        throw std::invalid_argument("the reference dataset must be fully observed");
  }

  SkeletonState state;
  switch (method) {
    case Method::TdPc:
      state = td_skeleton(d, alpha, max_cond);
      break;
    case Method::LdPc: {
      Dataset ld = listwise_delete(d);
      if (ld.rows() == 0) {
        if (warnings)
          warnings->push_back(
              "listwise deletion left no rows; returning the complete "
              "undirected graph");
        if (skeleton_out) {
          skeleton_out->skeleton =
              Cpdag::complete_undirected(d.cols(), d.labels());
          skeleton_out->sepsets.clear();
          skeleton_out->test_log.clear();
        }
        return Cpdag::complete_undirected(d.cols(), d.labels());
      }
      state = td_skeleton(ld, alpha, max_cond);
      break;
    }
    case Method::Ideal:
      state = td_skeleton(*complete, alpha, max_cond);
      break;
    case Method::Target: {
      // Replay TD-PC's sample sizes on the complete data: every query TD-PC
      // ran is re-run on a random row subset of the same effective size.
      SkeletonState td = td_skeleton(d, alpha, max_cond);
      std::map<std::tuple<int, int, std::vector<int>>, long long> n_by_query;
      for (const CiTestLogEntry& e : td.test_log) {
        std::vector<int> zs = e.query.z;
        std::sort(zs.begin(), zs.end());
        n_by_query[{std::min(e.query.x, e.query.y),
                    std::max(e.query.x, e.query.y), std::move(zs)}] =
            e.result.effective_n;
      }
      const Dataset& full = *complete;
      const int n = full.rows();
      CiFunction ci = [&, alpha, seed, n](int x, int y, const std::vector<int>& z) {
        std::vector<int> zs = z;
        std::sort(zs.begin(), zs.end());
        auto it = n_by_query.find({std::min(x, y), std::max(x, y), zs});
        CiQuery q{x, y, z, alpha};
        if (it == n_by_query.end() || it->second >= n || it->second < 1)
          return fisher_z(full, q);
        const int m = static_cast<int>(it->second);
        // Partial Fisher-Yates: the first m entries are a uniform subset.
        Rng rng(target_query_seed(seed, x, y, z));
        std::vector<int> rows(n);
        for (int r = 0; r < n; ++r) rows[r] = r;
        for (int i = 0; i < m; ++i) {
          int j = static_cast<int>(rng.uniform_int(i, n - 1));
          std::swap(rows[i], rows[j]);
        }
        rows.resize(m);
        std::sort(rows.begin(), rows.end());
        std::vector<ColumnRef> cols;
        cols.reserve(z.size() + 2);
        cols.push_back({full.column_data(x), nullptr});
        cols.push_back({full.column_data(y), nullptr});
        for (int zc : z) cols.push_back({full.column_data(zc), nullptr});
        return ci_test(cols, n, static_cast<int>(z.size()), alpha, nullptr,
                       rows.data(), m);
      };
      state = pc_skeleton(full.cols(), full.labels(), ci, alpha, max_cond);
      break;
    }
    case Method::Mvpc:
      throw std::invalid_argument("mvpc is not a baseline; use discover()");
  }

  Cpdag result = orient(state.skeleton, state.sepsets);
  if (skeleton_out) *skeleton_out = std::move(state);
  return result;
}

}  // namespace mvpc
