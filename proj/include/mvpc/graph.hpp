#pragma once

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace mvpc {

struct Edge {
  int from = -1;
  int to = -1;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Directed acyclic graph over labeled nodes. add_edge enforces acyclicity,
// so an instance is a valid DAG at all times.
class Dag {
 public:
  Dag() = default;
  explicit Dag(int node_count, std::vector<std::string> labels = {});

  int node_count() const { return n_; }
  const std::string& label(int v) const;
  const std::vector<std::string>& labels() const { return labels_; }
  int index_of(const std::string& label) const;  // -1 if unknown

  // Throws std::invalid_argument on out-of-range nodes, self-loops,
  // duplicate edges, or an edge that would close a cycle.
  void add_edge(int from, int to);

  bool has_edge(int from, int to) const;
  bool adjacent(int a, int b) const;
  const std::vector<int>& parents(int v) const;
  const std::vector<int>& children(int v) const;
  std::vector<Edge> edges() const;  // sorted by (from, to)
  int edge_count() const { return edge_count_; }

  std::vector<int> topological_order() const;

  // Nodes with a directed path into some seed, seeds included.
  std::vector<char> ancestors_of(const std::vector<int>& seeds) const;
  std::vector<char> descendants_of(int v) const;  // v included

  // Triples (a, c, b), a < b, with a -> c <- b and a, b non-adjacent.
  std::vector<std::array<int, 3>> unshielded_colliders() const;

 private:
  void check_node(int v) const;
  bool reachable(int from, int to) const;

  int n_ = 0;
  int edge_count_ = 0;
  std::vector<std::string> labels_;
  std::vector<std::vector<char>> has_;  // has_[u][v]: edge u -> v
  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<int>> children_;
};

// True iff x and y are d-separated by the set z in g.
// Requires x != y and z not containing x or y.
bool d_separated(const Dag& g, int x, int y, const std::vector<int>& z);

// Set version: every pair (a in xs, b in ys) must be d-separated by z.
bool d_separated_sets(const Dag& g, const std::vector<int>& xs,
                      const std::vector<int>& ys, const std::vector<int>& z);

enum class EdgeMark { None, Forward, Backward, Undirected };

// Partially directed graph in which directed and undirected edges are
// disjoint and at most one mark exists per node pair.
class Cpdag {
 public:
  Cpdag() = default;
  explicit Cpdag(int node_count, std::vector<std::string> labels = {});

  static Cpdag complete_undirected(int node_count,
                                   std::vector<std::string> labels = {});

  int node_count() const { return n_; }
  const std::string& label(int v) const;
  const std::vector<std::string>& labels() const { return labels_; }

  // mark(a,b): Forward means a -> b, Backward means b -> a.
  EdgeMark mark(int a, int b) const;
  bool adjacent(int a, int b) const { return mark(a, b) != EdgeMark::None; }
  bool has_directed(int from, int to) const;
  bool has_undirected(int a, int b) const;

  void set_undirected(int a, int b);       // replaces any existing mark
  void set_directed(int from, int to);     // replaces any existing mark
  void remove_edge(int a, int b);

  std::vector<int> neighbors(int v) const;       // any adjacency, sorted
  std::vector<Edge> directed_edges() const;      // sorted
  std::vector<Edge> undirected_edges() const;    // from < to, sorted
  int edge_count() const;

  bool operator==(const Cpdag& other) const;

 private:
  void check_node(int v) const;

  int n_ = 0;
  std::vector<std::string> labels_;
  // mark_[a*n+b]: 0 none, 1 a->b, 2 undirected (mirrored for b,a).
  std::vector<signed char> mark_;
};

// Pattern of the Markov equivalence class of g: skeleton plus v-structures,
// closed under the orientation rules. Two DAGs with the same skeleton and
// v-structures map to the same Cpdag.
Cpdag dag_to_cpdag(const Dag& g);

// Separating sets recorded by a skeleton search, keyed by (min(x,y), max(x,y)).
using Sepsets = std::map<std::pair<int, int>, std::vector<int>>;

// Orients an undirected skeleton: v-structures from the sepsets first
// (deterministic triple order, a later collider claim overwrites an earlier
// one), then orientation rules 1-4 to fixpoint. Never throws on conflicting
// claims; the documented tie-break resolves them.
Cpdag orient(const Cpdag& skeleton, const Sepsets& sepsets);

// Applies orientation rules 1-4 to fixpoint in place (deterministic scans).
void meek_closure(Cpdag& g);

// Missingness structure layered over a substantive DAG: which variables are
// partially observed, and which substantive variables cause each missingness
// indicator. Indicators are sinks and never cause anything.
class MGraph {
 public:
  enum class Mechanism { MCAR, MAR, MNAR };

  MGraph() = default;
  MGraph(Dag dag, std::map<int, std::vector<int>> indicator_parents);

  const Dag& dag() const { return dag_; }
  const std::vector<int>& partially_observed() const { return partial_; }
  bool is_partially_observed(int v) const;
  const std::vector<int>& indicator_parents(int v) const;
  const std::map<int, std::vector<int>>& all_indicator_parents() const {
    return indicator_parents_;
  }

  // Substantive DAG plus one sink node per partially observed variable,
  // labeled "R_<label>". Substantive nodes keep their indices.
  const Dag& full_graph() const { return full_; }
  int indicator_node(int v) const;  // node id of R_v in full_graph()

  Mechanism classify() const;

 private:
  Dag dag_;
  Dag full_;
  std::vector<int> partial_;                        // sorted
  std::map<int, std::vector<int>> indicator_parents_;
  std::map<int, int> indicator_node_;
};

const char* mechanism_name(MGraph::Mechanism m);

// --- serialization ---------------------------------------------------------
// Edge-list text: one edge per line, "A -> B" directed, "A -- B" undirected.

std::string to_edge_list(const Dag& g);
std::string to_edge_list(const Cpdag& g);
std::string to_dot(const Dag& g);
std::string to_dot(const Cpdag& g);

// Parsers resolve names against `labels`; they throw std::runtime_error on
// unknown names or malformed lines. Dag parsing rejects "--" edges.
Dag dag_from_edge_list(const std::string& text,
                       const std::vector<std::string>& labels);
Cpdag cpdag_from_edge_list(const std::string& text,
                           const std::vector<std::string>& labels);

}  // namespace mvpc
