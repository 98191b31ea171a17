#include "mvpc/graph.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace mvpc {

namespace {

std::vector<std::string> default_labels(int n, const std::vector<std::string>& given) {
  if (!given.empty()) {
    if (static_cast<int>(given.size()) != n)
      throw std::invalid_argument("label count does not match node count");
    return given;
  }
  std::vector<std::string> out(n);
  for (int i = 0; i < n; ++i) out[i] = "V" + std::to_string(i + 1);
  return out;
}

}  // namespace

// --- Dag --------------------------------------------------------------------

Dag::Dag(int node_count, std::vector<std::string> labels)
    : n_(node_count),
      labels_(default_labels(node_count, labels)),
      has_(node_count, std::vector<char>(node_count, 0)),
      parents_(node_count),
      children_(node_count) {
  if (node_count < 0) throw std::invalid_argument("negative node count");
}

void Dag::check_node(int v) const {
  if (v < 0 || v >= n_) throw std::invalid_argument("node index out of range");
}

const std::string& Dag::label(int v) const {
  check_node(v);
  return labels_[v];
}

int Dag::index_of(const std::string& label) const {
  for (int i = 0; i < n_; ++i)
    if (labels_[i] == label) return i;
  return -1;
}

bool Dag::reachable(int from, int to) const {
  if (from == to) return true;
  std::vector<char> seen(n_, 0);
  std::deque<int> queue{from};
  seen[from] = 1;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int c : children_[u]) {
      if (c == to) return true;
      if (!seen[c]) {
        seen[c] = 1;
        queue.push_back(c);
      }
    }
  }
  return false;
}

void Dag::add_edge(int from, int to) {
  check_node(from);
  check_node(to);
  if (from == to) throw std::invalid_argument("self-loop rejected");
  if (has_[from][to]) throw std::invalid_argument("duplicate edge rejected");
  if (reachable(to, from))
    throw std::invalid_argument("edge " + labels_[from] + " -> " + labels_[to] +
                                " would create a cycle");
  has_[from][to] = 1;
  children_[from].insert(
      std::lower_bound(children_[from].begin(), children_[from].end(), to), to);
  parents_[to].insert(
      std::lower_bound(parents_[to].begin(), parents_[to].end(), from), from);
  ++edge_count_;
}

bool Dag::has_edge(int from, int to) const {
  check_node(from);
  check_node(to);
  return has_[from][to] != 0;
}

bool Dag::adjacent(int a, int b) const {
  check_node(a);
  check_node(b);
  return has_[a][b] || has_[b][a];
}

const std::vector<int>& Dag::parents(int v) const {
  check_node(v);
  return parents_[v];
}

const std::vector<int>& Dag::children(int v) const {
  check_node(v);
  return children_[v];
}

std::vector<Edge> Dag::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (int u = 0; u < n_; ++u)
    for (int v : children_[u]) out.push_back({u, v});
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> Dag::topological_order() const {
  std::vector<int> indeg(n_, 0), order;
  order.reserve(n_);
  for (int v = 0; v < n_; ++v) indeg[v] = static_cast<int>(parents_[v].size());
  std::deque<int> ready;
  for (int v = 0; v < n_; ++v)
    if (indeg[v] == 0) ready.push_back(v);
  while (!ready.empty()) {
    int u = ready.front();
    ready.pop_front();
    order.push_back(u);
    for (int c : children_[u])
      if (--indeg[c] == 0) ready.push_back(c);
  }
  return order;  // always complete: acyclicity is a class invariant
}

std::vector<char> Dag::ancestors_of(const std::vector<int>& seeds) const {
  std::vector<char> anc(n_, 0);
  std::deque<int> queue;
  for (int s : seeds) {
    check_node(s);
    if (!anc[s]) {
      anc[s] = 1;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int p : parents_[u])
      if (!anc[p]) {
        anc[p] = 1;
        queue.push_back(p);
      }
  }
  return anc;
}

std::vector<char> Dag::descendants_of(int v) const {
  check_node(v);
  std::vector<char> des(n_, 0);
  std::deque<int> queue{v};
  des[v] = 1;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int c : children_[u])
      if (!des[c]) {
        des[c] = 1;
        queue.push_back(c);
      }
  }
  return des;
}

std::vector<std::array<int, 3>> Dag::unshielded_colliders() const {
  std::vector<std::array<int, 3>> out;
  for (int c = 0; c < n_; ++c) {
    const auto& pa = parents_[c];
    for (size_t i = 0; i < pa.size(); ++i)
      for (size_t j = i + 1; j < pa.size(); ++j)
        if (!adjacent(pa[i], pa[j])) out.push_back({pa[i], c, pa[j]});
  }
  std::sort(out.begin(), out.end());
  return out;
}

// --- d-separation -----------------------------------------------------------
//
// Reachability over active trails: a ball entering a node "up" (from a child)
// may pass to parents and children unless the node is conditioned on; a ball
// entering "down" (from a parent) may pass to children unless conditioned,
// and may bounce back to parents when the node is an ancestor of the
// conditioning set (collider opened by conditioning on it or a descendant).

bool d_separated(const Dag& g, int x, int y, const std::vector<int>& z) {
  int n = g.node_count();
  if (x < 0 || x >= n || y < 0 || y >= n) throw std::invalid_argument("node out of range");
  if (x == y) throw std::invalid_argument("d-separation needs distinct endpoints");
  std::vector<char> in_z(n, 0);
  for (int v : z) {
    if (v < 0 || v >= n) throw std::invalid_argument("conditioning node out of range");
    if (v == x || v == y)
      throw std::invalid_argument("conditioning set must exclude the endpoints");
    in_z[v] = 1;
  }

  std::vector<char> anc_z = g.ancestors_of(z);

  constexpr int kUp = 0, kDown = 1;
  std::vector<char> visited(static_cast<size_t>(n) * 2, 0);
  std::deque<std::pair<int, int>> queue;
  queue.emplace_back(x, kUp);

  while (!queue.empty()) {
    auto [v, dir] = queue.front();
    queue.pop_front();
    char& seen = visited[static_cast<size_t>(v) * 2 + dir];
    if (seen) continue;
    seen = 1;
    if (v == y) return false;  // found an active trail

    if (dir == kUp) {
      if (!in_z[v]) {
        for (int p : g.parents(v)) queue.emplace_back(p, kUp);
        for (int c : g.children(v)) queue.emplace_back(c, kDown);
      }
    } else {
      if (!in_z[v])
        for (int c : g.children(v)) queue.emplace_back(c, kDown);
      if (anc_z[v])
        for (int p : g.parents(v)) queue.emplace_back(p, kUp);
    }
  }
  return true;
}

bool d_separated_sets(const Dag& g, const std::vector<int>& xs,
                      const std::vector<int>& ys, const std::vector<int>& z) {
  for (int a : xs)
    for (int b : ys) {
      if (a == b) return false;
      if (!d_separated(g, a, b, z)) return false;
    }
  return true;
}

// --- Cpdag ------------------------------------------------------------------

Cpdag::Cpdag(int node_count, std::vector<std::string> labels)
    : n_(node_count),
      labels_(default_labels(node_count, labels)),
      mark_(static_cast<size_t>(node_count) * node_count, 0) {
  if (node_count < 0) throw std::invalid_argument("negative node count");
}

Cpdag Cpdag::complete_undirected(int node_count, std::vector<std::string> labels) {
  Cpdag g(node_count, std::move(labels));
  for (int a = 0; a < node_count; ++a)
    for (int b = a + 1; b < node_count; ++b) g.set_undirected(a, b);
  return g;
}

void Cpdag::check_node(int v) const {
  if (v < 0 || v >= n_) throw std::invalid_argument("node index out of range");
}

const std::string& Cpdag::label(int v) const {
  check_node(v);
  return labels_[v];
}

EdgeMark Cpdag::mark(int a, int b) const {
  check_node(a);
  check_node(b);
  if (a == b) return EdgeMark::None;
  signed char m = mark_[static_cast<size_t>(a) * n_ + b];
  if (m == 2) return EdgeMark::Undirected;
  if (m == 1) return EdgeMark::Forward;
  if (mark_[static_cast<size_t>(b) * n_ + a] == 1) return EdgeMark::Backward;
  return EdgeMark::None;
}

bool Cpdag::has_directed(int from, int to) const {
  check_node(from);
  check_node(to);
  return mark_[static_cast<size_t>(from) * n_ + to] == 1;
}

bool Cpdag::has_undirected(int a, int b) const {
  check_node(a);
  check_node(b);
  return mark_[static_cast<size_t>(a) * n_ + b] == 2;
}

void Cpdag::set_undirected(int a, int b) {
  check_node(a);
  check_node(b);
  if (a == b) throw std::invalid_argument("self-loop rejected");
  mark_[static_cast<size_t>(a) * n_ + b] = 2;
  mark_[static_cast<size_t>(b) * n_ + a] = 2;
}

void Cpdag::set_directed(int from, int to) {
  check_node(from);
  check_node(to);
  if (from == to) throw std::invalid_argument("self-loop rejected");
  mark_[static_cast<size_t>(from) * n_ + to] = 1;
  mark_[static_cast<size_t>(to) * n_ + from] = 0;
}

void Cpdag::remove_edge(int a, int b) {
  check_node(a);
  check_node(b);
  mark_[static_cast<size_t>(a) * n_ + b] = 0;
  mark_[static_cast<size_t>(b) * n_ + a] = 0;
}

std::vector<int> Cpdag::neighbors(int v) const {
  check_node(v);
  std::vector<int> out;
  for (int u = 0; u < n_; ++u)
    if (u != v && adjacent(v, u)) out.push_back(u);
  return out;
}

std::vector<Edge> Cpdag::directed_edges() const {
  std::vector<Edge> out;
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b)
      if (mark_[static_cast<size_t>(a) * n_ + b] == 1) out.push_back({a, b});
  return out;  // scan order is already (from, to) sorted
}

std::vector<Edge> Cpdag::undirected_edges() const {
  std::vector<Edge> out;
  for (int a = 0; a < n_; ++a)
    for (int b = a + 1; b < n_; ++b)
      if (mark_[static_cast<size_t>(a) * n_ + b] == 2) out.push_back({a, b});
  return out;
}

int Cpdag::edge_count() const {
  return static_cast<int>(directed_edges().size() + undirected_edges().size());
}

bool Cpdag::operator==(const Cpdag& other) const {
  return n_ == other.n_ && mark_ == other.mark_;
}

// --- orientation ------------------------------------------------------------

namespace {

// Rules 1-4, applied to every ordered pair with an undirected edge, in a
// fixed scan order so results are reproducible. Only undirected edges are
// upgraded; existing directed edges are never flipped.
bool apply_rules_once(Cpdag& g) {
  int n = g.node_count();
  bool changed = false;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a == b || !g.has_undirected(a, b)) continue;

      // Rule 1: c -> a, a -- b, c and b non-adjacent  =>  a -> b.
      bool oriented = false;
      for (int c = 0; c < n && !oriented; ++c) {
        if (c == a || c == b) continue;
        if (g.has_directed(c, a) && !g.adjacent(c, b)) oriented = true;
      }
      // Rule 2: a -> c -> b with a -- b  =>  a -> b.
      for (int c = 0; c < n && !oriented; ++c) {
        if (c == a || c == b) continue;
        if (g.has_directed(a, c) && g.has_directed(c, b)) oriented = true;
      }
      // Rule 3: a -- c -> b, a -- d -> b, c and d non-adjacent  =>  a -> b.
      for (int c = 0; c < n && !oriented; ++c) {
        if (c == a || c == b) continue;
        if (!(g.has_undirected(a, c) && g.has_directed(c, b))) continue;
        for (int d = c + 1; d < n && !oriented; ++d) {
          if (d == a || d == b) continue;
          if (g.has_undirected(a, d) && g.has_directed(d, b) && !g.adjacent(c, d))
            oriented = true;
        }
      }
      // Rule 4: u -> v -> b, a adjacent to u and v, u and b non-adjacent
      //         =>  a -> b.
      for (int u = 0; u < n && !oriented; ++u) {
        if (u == a || u == b || !g.adjacent(a, u) || g.adjacent(u, b)) continue;
        for (int v = 0; v < n && !oriented; ++v) {
          if (v == a || v == b || v == u) continue;
          if (g.has_directed(u, v) && g.has_directed(v, b) && g.adjacent(a, v))
            oriented = true;
        }
      }

      if (oriented) {
        g.set_directed(a, b);
        changed = true;
      }
    }
  }
  return changed;
}

}  // namespace

void meek_closure(Cpdag& g) {
  while (apply_rules_once(g)) {
  }
}

Cpdag orient(const Cpdag& skeleton, const Sepsets& sepsets) {
  Cpdag g = skeleton;
  int n = g.node_count();
  // Collider phase. Triples scanned in a fixed (w, x, y) order; a later
  // claim overwrites an earlier conflicting one.
  for (int w = 0; w < n; ++w) {
    for (int x = 0; x < n; ++x) {
      if (x == w || !g.adjacent(x, w)) continue;
      for (int y = x + 1; y < n; ++y) {
        if (y == w || !g.adjacent(y, w) || g.adjacent(x, y)) continue;
        auto it = sepsets.find({std::min(x, y), std::max(x, y)});
        if (it == sepsets.end()) continue;
        const auto& sep = it->second;
        if (std::find(sep.begin(), sep.end(), w) == sep.end()) {
          g.set_directed(x, w);
          g.set_directed(y, w);
        }
      }
    }
  }
  meek_closure(g);
  return g;
}

Cpdag dag_to_cpdag(const Dag& g) {
  Cpdag c(g.node_count(), g.labels());
  for (const Edge& e : g.edges()) c.set_undirected(e.from, e.to);
  for (const auto& [a, w, b] : g.unshielded_colliders()) {
    c.set_directed(a, w);
    c.set_directed(b, w);
  }
  meek_closure(c);
  return c;
}

// --- MGraph -----------------------------------------------------------------

MGraph::MGraph(Dag dag, std::map<int, std::vector<int>> indicator_parents)
    : dag_(std::move(dag)), indicator_parents_(std::move(indicator_parents)) {
  int p = dag_.node_count();
  for (auto& [v, pa] : indicator_parents_) {
    if (v < 0 || v >= p)
      throw std::invalid_argument("indicator attached to unknown variable");
    std::sort(pa.begin(), pa.end());
    pa.erase(std::unique(pa.begin(), pa.end()), pa.end());
    for (int q : pa) {
      if (q < 0 || q >= p)
        throw std::invalid_argument("indicator parent out of range");
      if (q == v)
        throw std::invalid_argument("self-masking rejected: " + dag_.label(v) +
                                    " cannot cause its own missingness");
    }
    partial_.push_back(v);
  }
  // partial_ is sorted because std::map iterates keys in order.

  std::vector<std::string> labels = dag_.labels();
  for (int v : partial_) labels.push_back("R_" + dag_.label(v));
  full_ = Dag(p + static_cast<int>(partial_.size()), labels);
  for (const Edge& e : dag_.edges()) full_.add_edge(e.from, e.to);
  int next = p;
  for (int v : partial_) {
    indicator_node_[v] = next;
    for (int q : indicator_parents_[v]) full_.add_edge(q, next);
    ++next;
  }
}

bool MGraph::is_partially_observed(int v) const {
  return indicator_parents_.count(v) != 0;
}

const std::vector<int>& MGraph::indicator_parents(int v) const {
  auto it = indicator_parents_.find(v);
  if (it == indicator_parents_.end())
    throw std::invalid_argument("variable has no missingness indicator");
  return it->second;
}

int MGraph::indicator_node(int v) const {
  auto it = indicator_node_.find(v);
  if (it == indicator_node_.end())
    throw std::invalid_argument("variable has no missingness indicator");
  return it->second;
}

MGraph::Mechanism MGraph::classify() const {
  int p = dag_.node_count();
  std::vector<int> indicators, observed;
  for (int v : partial_) indicators.push_back(indicator_node_.at(v));
  for (int v = 0; v < p; ++v)
    if (!is_partially_observed(v)) observed.push_back(v);

  std::vector<int> all_vars(p);
  for (int v = 0; v < p; ++v) all_vars[v] = v;

  if (indicators.empty() ||
      d_separated_sets(full_, all_vars, indicators, {}))
    return Mechanism::MCAR;
  if (d_separated_sets(full_, partial_, indicators, observed))
    return Mechanism::MAR;
  return Mechanism::MNAR;
}

const char* mechanism_name(MGraph::Mechanism m) {
  switch (m) {
    case MGraph::Mechanism::MCAR: return "MCAR";
    case MGraph::Mechanism::MAR: return "MAR";
    case MGraph::Mechanism::MNAR: return "MNAR";
  }
  return "?";
}

// --- serialization ----------------------------------------------------------

std::string to_edge_list(const Dag& g) {
  std::ostringstream out;
  for (const Edge& e : g.edges())
    out << g.label(e.from) << " -> " << g.label(e.to) << "\n";
  return out.str();
}

std::string to_edge_list(const Cpdag& g) {
  std::ostringstream out;
  for (const Edge& e : g.directed_edges())
    out << g.label(e.from) << " -> " << g.label(e.to) << "\n";
  for (const Edge& e : g.undirected_edges())
    out << g.label(e.from) << " -- " << g.label(e.to) << "\n";
  return out.str();
}

std::string to_dot(const Dag& g) {
  std::ostringstream out;
  out << "digraph {\n";
  for (int v = 0; v < g.node_count(); ++v)
    out << "  \"" << g.label(v) << "\";\n";
  for (const Edge& e : g.edges())
    out << "  \"" << g.label(e.from) << "\" -> \"" << g.label(e.to) << "\";\n";
  out << "}\n";
  return out.str();
}

std::string to_dot(const Cpdag& g) {
  std::ostringstream out;
  out << "digraph {\n";
  for (int v = 0; v < g.node_count(); ++v)
    out << "  \"" << g.label(v) << "\";\n";
  for (const Edge& e : g.directed_edges())
    out << "  \"" << g.label(e.from) << "\" -> \"" << g.label(e.to) << "\";\n";
  for (const Edge& e : g.undirected_edges())
    out << "  \"" << g.label(e.from) << "\" -> \"" << g.label(e.to)
        << "\" [dir=none];\n";
  out << "}\n";
  return out.str();
}

namespace {

struct ParsedEdge {
  int a;
  int b;
  bool directed;
};

std::vector<ParsedEdge> parse_edge_lines(const std::string& text,
                                         const std::vector<std::string>& labels) {
  auto index_of = [&](const std::string& name, int line_no) {
    for (size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == name) return static_cast<int>(i);
    throw std::runtime_error("edge list line " + std::to_string(line_no) +
                             ": unknown node '" + name + "'");
  };

  std::vector<ParsedEdge> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string a, op, b, extra;
    if (!(ls >> a)) continue;  // blank line
    if (a[0] == '#') continue;
    if (!(ls >> op >> b) || (ls >> extra))
      throw std::runtime_error("edge list line " + std::to_string(line_no) +
                               ": expected 'A -> B' or 'A -- B'");
    bool directed;
    if (op == "->")
      directed = true;
    else if (op == "--")
      directed = false;
    else
      throw std::runtime_error("edge list line " + std::to_string(line_no) +
                               ": unknown edge operator '" + op + "'");
    out.push_back({index_of(a, line_no), index_of(b, line_no), directed});
  }
  return out;
}

}  // namespace

Dag dag_from_edge_list(const std::string& text,
                       const std::vector<std::string>& labels) {
  Dag g(static_cast<int>(labels.size()), labels);
  for (const ParsedEdge& e : parse_edge_lines(text, labels)) {
    if (!e.directed)
      throw std::runtime_error("undirected edge not allowed in a DAG edge list");
    g.add_edge(e.a, e.b);
  }
  return g;
}

Cpdag cpdag_from_edge_list(const std::string& text,
                           const std::vector<std::string>& labels) {
  Cpdag g(static_cast<int>(labels.size()), labels);
  for (const ParsedEdge& e : parse_edge_lines(text, labels)) {
    if (e.directed)
      g.set_directed(e.a, e.b);
    else
      g.set_undirected(e.a, e.b);
  }
  return g;
}

}  // namespace mvpc
