#pragma once

#include <cstdint>
#include <vector>

#include "mvpc/discovery.hpp"
#include "mvpc/graph.hpp"

// Reference implementations kept deliberately naive so they share no logic
// with the library: the tests trust agreement between the two, not either
// side alone.
namespace oracle {

// d-separation decided by enumerating every simple path between x and y and
// applying the blocking rules node by node.
bool path_d_separated(const mvpc::Dag& g, int x, int y,
                      const std::vector<int>& z);

// Markov-equivalence pattern by brute force: every acyclic orientation of
// g's skeleton that entails exactly the same d-separations as g votes on
// each edge. Unanimous directions stay directed, the rest go undirected.
mvpc::Cpdag consensus_pattern(const mvpc::Dag& g);

// CI function answering from the graph instead of data: p-value 1 when
// d-separated, 0 otherwise.
mvpc::CiFunction dsep_ci(const mvpc::Dag& g);

// Random DAG over a shuffled topological order, each forward pair wired
// independently with probability edge_prob. No structural rejection.
mvpc::Dag random_test_dag(int p, double edge_prob, std::uint64_t seed);

}  // namespace oracle
