// Permutation-invariant feature vector for constellation graphs: typed node
// counts, typed edge counts, typed (node, edge, node) triple counts over a
// fixed canonical enumeration, and commitment flags.
#pragma once

#include <array>
#include <vector>

#include "cardbench/types.hpp"

namespace cardbench {

struct TripleType {
  NodeType src;
  EdgeType edge;
  NodeType dst;
};

// Canonical ordered enumeration of the typed triples that occur across the
// built-in family graphs. Triples outside this list do not contribute.
const std::vector<TripleType>& canonical_triples();

// Total feature-vector length: node counts + edge counts + triple counts +
// commitment flags.
int graph_feature_length();

// psi(graph): fixed-length, permutation-invariant under node-id relabeling.
std::vector<double> graph_features(const ConstellationGraph& graph);

}  // namespace cardbench
