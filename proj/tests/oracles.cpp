#include "oracles.hpp"

#include <algorithm>
#include <stdexcept>

#include "mvpc/rng.hpp"

namespace oracle {

namespace {

// desc_hits_z[v]: v or some node reachable from v lies in z.
std::vector<char> descendants_hit(const mvpc::Dag& g,
                                  const std::vector<char>& in_z) {
  const int n = g.node_count();
  std::vector<char> out(n, 0);
  for (int v = 0; v < n; ++v) {
    std::vector<int> stack{v};
    std::vector<char> seen(n, 0);
    seen[v] = 1;
    while (!stack.empty() && !out[v]) {
      int u = stack.back();
      stack.pop_back();
      if (in_z[u]) {
        out[v] = 1;
        break;
      }
      for (int c : g.children(u)) {
        if (!seen[c]) {
          seen[c] = 1;
          stack.push_back(c);
        }
      }
    }
  }
  return out;
}

// A complete path is open when every interior node passes its rule: a
// collider must have a descendant (itself included) in z, anything else must
// stay out of z.
bool path_is_open(const mvpc::Dag& g, const std::vector<int>& path,
                  const std::vector<char>& in_z,
                  const std::vector<char>& desc_hits_z) {
  for (std::size_t i = 1; i + 1 < path.size(); ++i) {
    const int prev = path[i - 1], v = path[i], next = path[i + 1];
    const bool collider = g.has_edge(prev, v) && g.has_edge(next, v);
    if (collider) {
      if (!desc_hits_z[v]) return false;
    } else {
      if (in_z[v]) return false;
    }
  }
  return true;
}

bool open_path_exists(const mvpc::Dag& g, int x, int y,
                      const std::vector<char>& in_z,
                      const std::vector<char>& desc_hits_z,
                      std::vector<int>& path, std::vector<char>& on_path) {
  const int u = path.back();
  if (u == y) return path_is_open(g, path, in_z, desc_hits_z);
  for (int v = 0; v < g.node_count(); ++v) {
    if (on_path[v] || !g.adjacent(u, v)) continue;
    on_path[v] = 1;
    path.push_back(v);
    if (open_path_exists(g, x, y, in_z, desc_hits_z, path, on_path))
      return true;
    path.pop_back();
    on_path[v] = 0;
  }
  return false;
}

struct DsepQuery {
  int x = -1;
  int y = -1;
  std::vector<int> z;
};

// Every (x, y, Z) triple of an n-node graph, in a fixed order.
std::vector<DsepQuery> all_dsep_queries(int n) {
  std::vector<DsepQuery> out;
  for (int x = 0; x < n; ++x) {
    for (int y = x + 1; y < n; ++y) {
      std::vector<int> rest;
      for (int v = 0; v < n; ++v)
        if (v != x && v != y) rest.push_back(v);
      const int subsets = 1 << rest.size();
      for (int bits = 0; bits < subsets; ++bits) {
        DsepQuery q{x, y, {}};
        for (std::size_t j = 0; j < rest.size(); ++j)
          if (bits & (1 << j)) q.z.push_back(rest[j]);
        out.push_back(std::move(q));
      }
    }
  }
  return out;
}

}  // namespace

bool path_d_separated(const mvpc::Dag& g, int x, int y,
                      const std::vector<int>& z) {
  std::vector<char> in_z(g.node_count(), 0);
  for (int v : z) in_z[v] = 1;
  const std::vector<char> desc = descendants_hit(g, in_z);
  std::vector<int> path{x};
  std::vector<char> on_path(g.node_count(), 0);
  on_path[x] = 1;
  return !open_path_exists(g, x, y, in_z, desc, path, on_path);
}

mvpc::Cpdag consensus_pattern(const mvpc::Dag& g) {
  const std::vector<mvpc::Edge> edges = g.edges();
  const int m = static_cast<int>(edges.size());
  if (m > 12) throw std::invalid_argument("consensus_pattern: too many edges");
  const std::vector<DsepQuery> queries = all_dsep_queries(g.node_count());
  std::vector<char> truth(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i)
    truth[i] = path_d_separated(g, queries[i].x, queries[i].y, queries[i].z);

  // votes[i]: bit 0 set when some member orients edge i as stored in g,
  // bit 1 when some member flips it.
  std::vector<int> votes(m, 0);
  int members = 0;
  for (int bits = 0; bits < (1 << m); ++bits) {
    mvpc::Dag h(g.node_count(), g.labels());
    bool acyclic = true;
    for (int i = 0; i < m && acyclic; ++i) {
      const bool flip = bits & (1 << i);
      const int from = flip ? edges[i].to : edges[i].from;
      const int to = flip ? edges[i].from : edges[i].to;
      try {
        h.add_edge(from, to);
      } catch (const std::invalid_argument&) {
        acyclic = false;
      }
    }
    if (!acyclic) continue;
    bool same = true;
    for (std::size_t i = 0; i < queries.size() && same; ++i)
      same = path_d_separated(h, queries[i].x, queries[i].y, queries[i].z) ==
             static_cast<bool>(truth[i]);
    if (!same) continue;
    ++members;
    for (int i = 0; i < m; ++i) votes[i] |= (bits & (1 << i)) ? 2 : 1;
  }
  if (members == 0)
    throw std::logic_error("consensus_pattern: class lost its own graph");

  mvpc::Cpdag out(g.node_count(), g.labels());
  for (int i = 0; i < m; ++i) {
    if (votes[i] == 1)
      out.set_directed(edges[i].from, edges[i].to);
    else if (votes[i] == 2)
      out.set_directed(edges[i].to, edges[i].from);
    else
      out.set_undirected(edges[i].from, edges[i].to);
  }
  return out;
}

mvpc::CiFunction dsep_ci(const mvpc::Dag& g) {
  return [&g](int x, int y, const std::vector<int>& z) {
    mvpc::CiResult res;
    res.independent = path_d_separated(g, x, y, z);
    res.p_value = res.independent ? 1.0 : 0.0;
    res.statistic = res.independent ? 0.0 : 1e9;
    res.effective_n = 1'000'000;
    res.degenerate = false;
    return res;
  };
}

mvpc::Dag random_test_dag(int p, double edge_prob, std::uint64_t seed) {
  mvpc::Rng rng(seed);
  const std::vector<int> order = rng.permutation(p);
  mvpc::Dag g(p);
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      if (rng.bernoulli(edge_prob)) g.add_edge(order[i], order[j]);
  return g;
}

}  // namespace oracle
