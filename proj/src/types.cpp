#include "cardbench/types.hpp"

#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "cardbench/models.hpp"

namespace cardbench {
namespace {

const std::vector<std::string> kContextNames = {"source", "overlap", "target", "validation"};
const std::vector<std::string> kNodeTypeNames = {
    "observable",     "posit",          "law_schema",          "constraint",
    "measurement_role", "limit_relation", "transformation_rule", "context"};
const std::vector<std::string> kEdgeTypeNames = {
    "uses",       "assumes", "constrains", "preserves",  "valid_in", "reduces_to",
    "extends",    "conflicts", "measures", "introduces", "removes"};
const std::vector<std::string> kRoleNames = {"base", "deformation", "incorrect", "intended"};
const std::vector<std::string> kMoveTypeNames = {"deformation", "extension"};
const std::vector<std::string> kTransitionTypeNames = {"deformation_sufficient",
                                                       "extension_required"};
const std::vector<std::string> kConstraintKindNames = {
    "upper_bound", "lower_bound", "monotonic_increasing", "monotonic_decreasing",
    "finiteness",  "sign"};

int index_of(const std::vector<std::string>& names, const std::string& s, const char* what) {
  for (int i = 0; i < static_cast<int>(names.size()); ++i) {
    if (names[i] == s) return i;
  }
  throw SchemaError(std::string("unknown ") + what + ": '" + s + "'");
}

}  // namespace

const std::string& to_string(Context c) { return kContextNames[static_cast<int>(c)]; }
const std::string& to_string(NodeType t) { return kNodeTypeNames[static_cast<int>(t)]; }
const std::string& to_string(EdgeType t) { return kEdgeTypeNames[static_cast<int>(t)]; }
const std::string& to_string(Role r) { return kRoleNames[static_cast<int>(r)]; }
const std::string& to_string(MoveType m) { return kMoveTypeNames[static_cast<int>(m)]; }
const std::string& to_string(TransitionType t) { return kTransitionTypeNames[static_cast<int>(t)]; }
const std::string& to_string(ConstraintKind k) { return kConstraintKindNames[static_cast<int>(k)]; }

Context context_from_string(const std::string& s) {
  return static_cast<Context>(index_of(kContextNames, s, "context"));
}
NodeType node_type_from_string(const std::string& s) {
  return static_cast<NodeType>(index_of(kNodeTypeNames, s, "node type"));
}
EdgeType edge_type_from_string(const std::string& s) {
  return static_cast<EdgeType>(index_of(kEdgeTypeNames, s, "edge type"));
}
Role role_from_string(const std::string& s) {
  return static_cast<Role>(index_of(kRoleNames, s, "role"));
}
MoveType move_type_from_string(const std::string& s) {
  return static_cast<MoveType>(index_of(kMoveTypeNames, s, "move type"));
}
TransitionType transition_type_from_string(const std::string& s) {
  return static_cast<TransitionType>(index_of(kTransitionTypeNames, s, "transition type"));
}
ConstraintKind constraint_kind_from_string(const std::string& s) {
  return static_cast<ConstraintKind>(index_of(kConstraintKindNames, s, "constraint kind"));
}

CardView strip_labels(const TransitionCard& card) {
  return CardView{card.card_id,     card.family_id, card.card_seed,  card.input_arity,
                  card.source_model, card.source_graph, card.datasets, card.candidates,
                  card.constraints, card.limit};
}

namespace {

void validate_graph(const ConstellationGraph& g, const std::string& where,
                    std::vector<std::string>& out) {
  std::unordered_set<std::string> ids;
  for (const auto& n : g.nodes) {
    if (n.id.empty()) out.push_back(where + ": node with empty id");
    if (!ids.insert(n.id).second) out.push_back(where + ": duplicate node id '" + n.id + "'");
  }
  for (const auto& e : g.edges) {
    if (!ids.count(e.src)) {
      out.push_back(where + ": edge source '" + e.src + "' is not a node");
    }
    if (!ids.count(e.dst)) {
      out.push_back(where + ": edge target '" + e.dst + "' is not a node");
    }
  }
  if (g.commitments.limit_relation) {
    bool has_limit_node = false;
    for (const auto& n : g.nodes) {
      if (n.type == NodeType::limit_relation) has_limit_node = true;
    }
    if (!has_limit_node) {
      out.push_back(where + ": limit_relation commitment set but no limit_relation node");
    }
  }
}

void validate_model_ref(const ModelRef& ref, const std::string& where,
                        std::vector<std::string>& out) {
  if (!model_spec_exists(ref.family_id, ref.spec_id)) {
    out.push_back(where + ": unknown model spec '" + ref.family_id + "/" + ref.spec_id + "'");
    return;
  }
  const ModelSpec& spec = find_model_spec(ref.family_id, ref.spec_id);
  if (ref.frozen_theta &&
      static_cast<int>(ref.frozen_theta->size()) != spec.parameter_count) {
    out.push_back(where + ": frozen theta size does not match parameter count of '" +
                  ref.spec_id + "'");
  }
}

bool regime_ok(const Regime& regime, int arity) {
  if (static_cast<int>(regime.size()) != arity) return false;
  for (const auto& iv : regime) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || iv.lo > iv.hi) return false;
  }
  return true;
}

}  // namespace

std::vector<std::string> validate_card(const TransitionCard& card) {
  std::vector<std::string> out;
  if (card.schema_version != kSchemaVersion) {
    out.push_back("unsupported schema_version '" + card.schema_version + "'");
  }
  if (card.card_id.empty()) out.push_back("empty card_id");
  if (card.input_arity < 1) out.push_back("input_arity must be >= 1");

  // Datasets: regimes match arity, records are finite, in-regime, and tagged
  // with their dataset's context. Source/overlap/target must be non-empty.
  for (int c = 0; c < kNumContexts; ++c) {
    const ContextDataset& ds = card.datasets[c];
    const std::string where = "dataset '" + kContextNames[c] + "'";
    if (ds.context != static_cast<Context>(c)) {
      out.push_back(where + ": context tag mismatch");
    }
    if (!regime_ok(ds.regime, card.input_arity)) {
      out.push_back(where + ": regime must have one finite ordered interval per input");
      continue;
    }
    if (c != static_cast<int>(Context::validation) && ds.records.empty()) {
      out.push_back(where + ": must be non-empty");
    }
    for (size_t i = 0; i < ds.records.size(); ++i) {
      const ObservationRecord& r = ds.records[i];
      if (static_cast<int>(r.x.size()) != card.input_arity) {
        out.push_back(where + ": record " + std::to_string(i) + " has wrong input arity");
        continue;
      }
      if (!std::isfinite(r.y)) {
        out.push_back(where + ": record " + std::to_string(i) + " has non-finite y");
      }
      if (r.context != ds.context) {
        out.push_back(where + ": record " + std::to_string(i) + " has mismatched context tag");
      }
      for (int d = 0; d < card.input_arity; ++d) {
        if (!std::isfinite(r.x[d]) || !ds.regime[d].contains(r.x[d])) {
          out.push_back(where + ": record " + std::to_string(i) + " input " +
                        std::to_string(d) + " outside the declared regime");
          break;
        }
      }
    }
  }

  validate_graph(card.source_graph, "source graph", out);
  validate_model_ref(card.source_model, "source model", out);

  if (card.candidates.empty()) out.push_back("card has no candidates");
  int n_base = 0;
  int n_intended = 0;
  const CandidateMove* intended = nullptr;
  std::unordered_set<std::string> cand_ids;
  for (const auto& cand : card.candidates) {
    const std::string where = "candidate '" + cand.id + "'";
    if (cand.id.empty()) out.push_back("candidate with empty id");
    if (!cand_ids.insert(cand.id).second) out.push_back("duplicate candidate id '" + cand.id + "'");
    if (!(cand.cost >= 0.0) || !std::isfinite(cand.cost)) {
      out.push_back(where + ": cost must be finite and non-negative");
    }
    if (cand.role == Role::base) {
      ++n_base;
      if (cand.cost != 0.0) out.push_back(where + ": base candidate must have zero cost");
      if (cand.move_type != MoveType::deformation) {
        out.push_back(where + ": base candidate must be typed as a deformation");
      }
    }
    if (cand.role == Role::intended) {
      ++n_intended;
      intended = &cand;
    }
    validate_model_ref(cand.model, where, out);
    validate_graph(cand.graph, where + " graph", out);
    if (model_spec_exists(cand.model.family_id, cand.model.spec_id)) {
      const ModelSpec& spec = find_model_spec(cand.model.family_id, cand.model.spec_id);
      if (spec.input_arity != card.input_arity) {
        out.push_back(where + ": model input arity does not match the card");
      }
    }
  }
  if (n_base != 1) out.push_back("card must have exactly one base-role candidate");
  if (n_intended != 1) {
    out.push_back("card must have exactly one intended-role candidate");
  } else {
    if (intended->id != card.intended_candidate_id) {
      out.push_back("intended_candidate_id does not name the intended-role candidate");
    }
    const MoveType required = card.transition_type == TransitionType::extension_required
                                  ? MoveType::extension
                                  : MoveType::deformation;
    if (intended->move_type != required) {
      out.push_back("intended candidate's move type is inconsistent with the transition type");
    }
  }

  for (const auto& cs : card.constraints) {
    const std::string where = "constraint '" + cs.id + "'";
    if (cs.applies_in.empty()) out.push_back(where + ": empty applies_in");
    auto need = [&](const char* key) {
      if (!cs.parameters.count(key)) {
        out.push_back(where + ": missing parameter '" + key + "'");
      }
    };
    switch (cs.kind) {
      case ConstraintKind::upper_bound:
      case ConstraintKind::lower_bound:
        need("bound");
        break;
      case ConstraintKind::monotonic_increasing:
      case ConstraintKind::monotonic_decreasing:
        need("axis");
        if (cs.parameters.count("axis")) {
          const int axis = static_cast<int>(cs.parameters.at("axis"));
          if (axis < 0 || axis >= card.input_arity) {
            out.push_back(where + ": axis out of range");
          }
        }
        break;
      case ConstraintKind::sign:
        need("sign");
        break;
      case ConstraintKind::finiteness:
        break;
    }
  }

  // Limit spec: probes live inside the source regime.
  if (!regime_ok(card.limit.limit_regime, card.input_arity)) {
    out.push_back("limit regime must have one finite ordered interval per input");
  } else if (regime_ok(card.dataset(Context::source).regime, card.input_arity)) {
    const Regime& src = card.dataset(Context::source).regime;
    for (int d = 0; d < card.input_arity; ++d) {
      if (card.limit.limit_regime[d].lo < src[d].lo - 1e-9 ||
          card.limit.limit_regime[d].hi > src[d].hi + 1e-9) {
        out.push_back("limit regime is not contained in the source regime");
        break;
      }
    }
  }
  if (card.limit.n_probe < 2) out.push_back("limit n_probe must be >= 2");
  validate_model_ref(card.limit.reference, "limit reference", out);

  return out;
}

}  // namespace cardbench
