#include "cardbench/graph_features.hpp"

#include <unordered_map>

namespace cardbench {

const std::vector<TripleType>& canonical_triples() {
  // Fixed enumeration of the typed triples occurring across the built-in
  // family graphs. The order is part of the feature contract.
  static const std::vector<TripleType> kTriples = {
      {NodeType::law_schema, EdgeType::uses, NodeType::observable},
      {NodeType::law_schema, EdgeType::measures, NodeType::observable},
      {NodeType::law_schema, EdgeType::valid_in, NodeType::context},
      {NodeType::law_schema, EdgeType::assumes, NodeType::posit},
      {NodeType::law_schema, EdgeType::extends, NodeType::law_schema},
      {NodeType::law_schema, EdgeType::introduces, NodeType::posit},
      {NodeType::law_schema, EdgeType::constrains, NodeType::constraint},
      {NodeType::law_schema, EdgeType::preserves, NodeType::limit_relation},
      {NodeType::limit_relation, EdgeType::reduces_to, NodeType::law_schema},
      {NodeType::posit, EdgeType::conflicts, NodeType::posit},
      {NodeType::transformation_rule, EdgeType::preserves, NodeType::constraint},
  };
  return kTriples;
}

int graph_feature_length() {
  return kNumNodeTypes + kNumEdgeTypes + static_cast<int>(canonical_triples().size()) +
         kNumCommitmentFlags;
}

std::vector<double> graph_features(const ConstellationGraph& graph) {
  std::vector<double> psi(graph_feature_length(), 0.0);

  std::unordered_map<std::string, NodeType> node_type;
  node_type.reserve(graph.nodes.size());
  for (const auto& n : graph.nodes) {
    node_type[n.id] = n.type;
    psi[static_cast<int>(n.type)] += 1.0;
  }

  const int edge_offset = kNumNodeTypes;
  const int triple_offset = edge_offset + kNumEdgeTypes;
  const auto& triples = canonical_triples();
  for (const auto& e : graph.edges) {
    psi[edge_offset + static_cast<int>(e.type)] += 1.0;
    auto src = node_type.find(e.src);
    auto dst = node_type.find(e.dst);
    if (src == node_type.end() || dst == node_type.end()) continue;
    for (size_t t = 0; t < triples.size(); ++t) {
      if (triples[t].src == src->second && triples[t].edge == e.type &&
          triples[t].dst == dst->second) {
        psi[triple_offset + static_cast<int>(t)] += 1.0;
      }
    }
  }

  const int flag_offset = triple_offset + static_cast<int>(triples.size());
  const Commitments& c = graph.commitments;
  const bool flags[kNumCommitmentFlags] = {
      c.invariant_speed,  c.low_speed_limit,  c.quantization_scale, c.absolute_time,
      c.preferred_frame,  c.limit_relation,   c.removes_old_posit,  c.introduces_constraint};
  for (int i = 0; i < kNumCommitmentFlags; ++i) {
    psi[flag_offset + i] = flags[i] ? 1.0 : 0.0;
  }
  return psi;
}

}  // namespace cardbench
