#include <algorithm>
#include <random>

#include <doctest.h>

#include "cardbench/card_io.hpp"
#include "cardbench/graph_features.hpp"
#include "cardbench/types.hpp"
#include "test_helpers.hpp"

using namespace cardbench;
using cardbench::testing::tiny_card;

namespace {

ConstellationGraph lorentz_style_graph() {
  ConstellationGraph g;
  g.nodes = {{"u", NodeType::observable},
             {"w", NodeType::observable},
             {"law", NodeType::law_schema},
             {"c_posit", NodeType::posit},
             {"speed_cap", NodeType::constraint},
             {"low_speed", NodeType::limit_relation},
             {"old_law", NodeType::law_schema}};
  g.edges = {{"law", EdgeType::uses, "u"},
             {"law", EdgeType::measures, "w"},
             {"law", EdgeType::introduces, "c_posit"},
             {"law", EdgeType::constrains, "speed_cap"},
             {"law", EdgeType::preserves, "low_speed"},
             {"low_speed", EdgeType::reduces_to, "old_law"}};
  g.commitments.invariant_speed = true;
  g.commitments.low_speed_limit = true;
  g.commitments.introduces_constraint = true;
  g.commitments.limit_relation = true;
  return g;
}

}  // namespace

TEST_CASE("validate_card accepts a well-formed card") {
  const TransitionCard card = tiny_card([](double x) { return 2.0 * x; });
  CHECK(validate_card(card).empty());
}

TEST_CASE("validate_card flags structural violations") {
  const auto base = tiny_card([](double x) { return 2.0 * x; });

  SUBCASE("record outside its regime") {
    TransitionCard card = base;
    card.dataset(Context::source).records[0].x[0] = 5.0;
    CHECK_FALSE(validate_card(card).empty());
  }
  SUBCASE("non-finite observation") {
    TransitionCard card = base;
    card.dataset(Context::target).records[0].y = std::numeric_limits<double>::infinity();
    CHECK_FALSE(validate_card(card).empty());
  }
  SUBCASE("dangling graph edge") {
    TransitionCard card = base;
    card.candidates[0].graph.edges.push_back({"law", EdgeType::uses, "ghost"});
    CHECK_FALSE(validate_card(card).empty());
  }
  SUBCASE("duplicate candidate id") {
    TransitionCard card = base;
    card.candidates.push_back(card.candidates[1]);
    CHECK_FALSE(validate_card(card).empty());
  }
  SUBCASE("base candidate with non-zero cost") {
    TransitionCard card = base;
    card.candidates[0].cost = 0.3;
    CHECK_FALSE(validate_card(card).empty());
  }
  SUBCASE("intended id does not match intended role") {
    TransitionCard card = base;
    card.intended_candidate_id = "constant";
    CHECK_FALSE(validate_card(card).empty());
  }
  SUBCASE("unknown model spec") {
    TransitionCard card = base;
    card.candidates[1].model.spec_id = "no_such_spec";
    CHECK_FALSE(validate_card(card).empty());
  }
  SUBCASE("limit regime escaping the source regime") {
    TransitionCard card = base;
    card.limit.limit_regime = {{0.0, 2.5}};
    CHECK_FALSE(validate_card(card).empty());
  }
  SUBCASE("limit_relation commitment without a limit_relation node") {
    TransitionCard card = base;
    card.candidates[1].graph.commitments.limit_relation = true;
    CHECK_FALSE(validate_card(card).empty());
  }
  SUBCASE("monotonic constraint with out-of-range axis") {
    TransitionCard card = base;
    ConstraintSpec cs;
    cs.id = "mono";
    cs.kind = ConstraintKind::monotonic_increasing;
    cs.applies_in = {Context::target};
    cs.parameters["axis"] = 3.0;
    card.constraints.push_back(cs);
    CHECK_FALSE(validate_card(card).empty());
  }
  SUBCASE("bound constraint missing its bound parameter") {
    TransitionCard card = base;
    ConstraintSpec cs;
    cs.id = "cap";
    cs.kind = ConstraintKind::upper_bound;
    cs.applies_in = {Context::target};
    card.constraints.push_back(cs);
    CHECK_FALSE(validate_card(card).empty());
  }
}

TEST_CASE("card serialization round-trips and is canonical") {
  TransitionCard card = tiny_card([](double x) { return 1.0 + 0.5 * x; });
  ConstraintSpec cs;
  cs.id = "cap";
  cs.kind = ConstraintKind::upper_bound;
  cs.applies_in = {Context::overlap, Context::target};
  cs.parameters["bound"] = 4.25;
  card.constraints.push_back(cs);
  card.candidates[1].model.frozen_theta = std::vector<double>{0.5};
  card.source_graph = lorentz_style_graph();

  const std::string text = serialize_card(card);
  const TransitionCard loaded = deserialize_card(text);
  // Canonical-form fixed point: serialize(deserialize(text)) == text.
  CHECK(serialize_card(loaded) == text);

  CHECK(loaded.card_id == card.card_id);
  CHECK(loaded.card_seed == card.card_seed);
  CHECK(loaded.transition_type == card.transition_type);
  CHECK(loaded.intended_candidate_id == card.intended_candidate_id);
  CHECK(loaded.candidates.size() == card.candidates.size());
  CHECK(loaded.candidates[1].model.frozen_theta == card.candidates[1].model.frozen_theta);
  CHECK(loaded.constraints.size() == 1);
  CHECK(loaded.constraints[0].parameters.at("bound") == 4.25);
  REQUIRE(loaded.dataset(Context::source).records.size() ==
          card.dataset(Context::source).records.size());
  for (size_t i = 0; i < card.dataset(Context::source).records.size(); ++i) {
    CHECK(loaded.dataset(Context::source).records[i].y ==
          card.dataset(Context::source).records[i].y);
    CHECK(loaded.dataset(Context::source).records[i].x ==
          card.dataset(Context::source).records[i].x);
  }
  CHECK(loaded.source_graph.commitments.invariant_speed);
  CHECK(validate_card(loaded).empty());
}

TEST_CASE("malformed card text raises a schema error") {
  CHECK_THROWS_AS(deserialize_card("not json at all {"), SchemaError);
  CHECK_THROWS_AS(deserialize_card("{\"schema_version\": \"1.0\"}"), SchemaError);
}

TEST_CASE("graph feature vector has fixed length and documented layout") {
  // 8 node-type counts + 11 edge-type counts + canonical triples + 8 flags.
  const int n_triples = static_cast<int>(canonical_triples().size());
  CHECK(graph_feature_length() == 8 + 11 + n_triples + 8);

  // Worked example: one law node, one constraint node, one constrains edge.
  ConstellationGraph g;
  g.nodes = {{"L", NodeType::law_schema}, {"C", NodeType::constraint}};
  g.edges = {{"L", EdgeType::constrains, "C"}};
  const auto psi = graph_features(g);
  CHECK(psi[static_cast<int>(NodeType::law_schema)] == 1.0);
  CHECK(psi[static_cast<int>(NodeType::constraint)] == 1.0);
  CHECK(psi[8 + static_cast<int>(EdgeType::constrains)] == 1.0);
  // The (law_schema, constrains, constraint) triple is part of the canonical
  // enumeration and must be counted.
  bool found = false;
  for (int t = 0; t < n_triples; ++t) {
    const TripleType& tt = canonical_triples()[t];
    if (tt.src == NodeType::law_schema && tt.edge == EdgeType::constrains &&
        tt.dst == NodeType::constraint) {
      CHECK(psi[8 + 11 + t] == 1.0);
      found = true;
    }
  }
  CHECK(found);
  double total_triples = 0.0;
  for (int t = 0; t < n_triples; ++t) total_triples += psi[8 + 11 + t];
  CHECK(total_triples == 1.0);
}

TEST_CASE("graph features carry commitment flags in canonical order") {
  const auto psi = graph_features(lorentz_style_graph());
  const int flag_offset = graph_feature_length() - 8;
  // invariant_speed, low_speed_limit, quantization_scale, absolute_time,
  // preferred_frame, limit_relation, removes_old_posit, introduces_constraint.
  CHECK(psi[flag_offset + 0] == 1.0);
  CHECK(psi[flag_offset + 1] == 1.0);
  CHECK(psi[flag_offset + 2] == 0.0);
  CHECK(psi[flag_offset + 3] == 0.0);
  CHECK(psi[flag_offset + 4] == 0.0);
  CHECK(psi[flag_offset + 5] == 1.0);
  CHECK(psi[flag_offset + 6] == 0.0);
  CHECK(psi[flag_offset + 7] == 1.0);
}

TEST_CASE("graph features are invariant under node relabeling and reordering") {
  ConstellationGraph g = lorentz_style_graph();
  const auto psi = graph_features(g);

  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 20; ++trial) {
    ConstellationGraph shuffled = g;
    // Relabel node ids with a random permutation suffix and shuffle orders.
    for (size_t i = 0; i < shuffled.nodes.size(); ++i) {
      const std::string old_id = shuffled.nodes[i].id;
      const std::string new_id = "n" + std::to_string(rng() % 100000) + "_" + old_id;
      shuffled.nodes[i].id = new_id;
      for (auto& e : shuffled.edges) {
        if (e.src == old_id) e.src = new_id;
        if (e.dst == old_id) e.dst = new_id;
      }
    }
    std::shuffle(shuffled.nodes.begin(), shuffled.nodes.end(), rng);
    std::shuffle(shuffled.edges.begin(), shuffled.edges.end(), rng);
    CHECK(graph_features(shuffled) == psi);
  }
}

TEST_CASE("strip_labels exposes everything except the evaluation labels") {
  const TransitionCard card = tiny_card([](double x) { return x; });
  const CardView view = strip_labels(card);
  CHECK(view.card_id == card.card_id);
  CHECK(view.candidates.size() == card.candidates.size());
  CHECK(&view.datasets == &card.datasets);
}
