// Core data model for transition cards: observation datasets, constellation
// graphs, candidate moves, constraint/limit specifications, and card-level
// validation.
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace cardbench {

inline constexpr const char* kSchemaVersion = "1.0";

// Thrown when a file or JSON document does not conform to the card schema.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when a model is evaluated outside its prediction domain.
class PredictionDomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown for invalid run configuration (unknown ids, bad weights, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Context : int { source = 0, overlap = 1, target = 2, validation = 3 };
inline constexpr int kNumContexts = 4;

enum class NodeType : int {
  observable = 0,
  posit,
  law_schema,
  constraint,
  measurement_role,
  limit_relation,
  transformation_rule,
  context,
};
inline constexpr int kNumNodeTypes = 8;

enum class EdgeType : int {
  uses = 0,
  assumes,
  constrains,
  preserves,
  valid_in,
  reduces_to,
  extends,
  conflicts,
  measures,
  introduces,
  removes,
};
inline constexpr int kNumEdgeTypes = 11;

enum class Role : int { base = 0, deformation, incorrect, intended };
enum class MoveType : int { deformation = 0, extension };
enum class TransitionType : int { deformation_sufficient = 0, extension_required };

enum class ConstraintKind : int {
  upper_bound = 0,
  lower_bound,
  monotonic_increasing,
  monotonic_decreasing,
  finiteness,
  sign,
};

const std::string& to_string(Context c);
const std::string& to_string(NodeType t);
const std::string& to_string(EdgeType t);
const std::string& to_string(Role r);
const std::string& to_string(MoveType m);
const std::string& to_string(TransitionType t);
const std::string& to_string(ConstraintKind k);

Context context_from_string(const std::string& s);
NodeType node_type_from_string(const std::string& s);
EdgeType edge_type_from_string(const std::string& s);
Role role_from_string(const std::string& s);
MoveType move_type_from_string(const std::string& s);
TransitionType transition_type_from_string(const std::string& s);
ConstraintKind constraint_kind_from_string(const std::string& s);

// Closed interval [lo, hi] on one input axis.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v, double tol = 1e-9) const {
    return v >= lo - tol && v <= hi + tol;
  }
  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
};

// One interval per model input.
using Regime = std::vector<Interval>;

// A single (x, y) observation tagged with the regime it was drawn from.
struct ObservationRecord {
  std::vector<double> x;
  double y = 0.0;
  Context context = Context::source;
};

// All observations for one context together with the sampling regime.
struct ContextDataset {
  Context context = Context::source;
  Regime regime;
  std::vector<ObservationRecord> records;
};

struct GraphNode {
  std::string id;
  NodeType type = NodeType::observable;
};

struct GraphEdge {
  std::string src;
  EdgeType type = EdgeType::uses;
  std::string dst;
};

// Boolean structural commitments carried by a constellation. Order here is the
// canonical feature order used by graph_features().
struct Commitments {
  bool invariant_speed = false;
  bool low_speed_limit = false;
  bool quantization_scale = false;
  bool absolute_time = false;
  bool preferred_frame = false;
  bool limit_relation = false;
  bool removes_old_posit = false;
  bool introduces_constraint = false;
};
inline constexpr int kNumCommitmentFlags = 8;

// Typed multigraph of posits, laws, observables, and structural relations.
struct ConstellationGraph {
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;
  Commitments commitments;
};

// Reference to a registered model spec, optionally with all parameters frozen
// (zero remaining degrees of freedom) and/or fixed-constant overrides.
struct ModelRef {
  std::string family_id;
  std::string spec_id;
  std::optional<std::vector<double>> frozen_theta;
  std::map<std::string, double> constant_overrides;
};

// One candidate theory move: a model spec plus its constellation graph,
// structural role, move type, and structural cost.
struct CandidateMove {
  std::string id;
  Role role = Role::deformation;
  MoveType move_type = MoveType::deformation;
  double cost = 0.0;
  ModelRef model;
  ConstellationGraph graph;
};

// Declarative constraint evaluated on a probe grid of the global chart.
struct ConstraintSpec {
  std::string id;
  ConstraintKind kind = ConstraintKind::upper_bound;
  std::set<Context> applies_in;
  // Kind-specific scalars: "bound" (upper/lower), "axis" (monotonic sweeps),
  // "sign" (+1/-1 for sign constraints).
  std::map<std::string, double> parameters;
};

// Limit-regime comparison against the source theory with canonical parameters.
struct LimitSpec {
  Regime limit_regime;
  int n_probe = 16;
  ModelRef reference;
};

// A self-contained benchmark problem: source constellation, datasets in four
// regimes, candidate moves, constraints, and limit specification.
// transition_type and intended_candidate_id are evaluation labels; ranking
// consumes a label-stripped view (see CardView).
struct TransitionCard {
  std::string schema_version = kSchemaVersion;
  std::string card_id;
  std::string family_id;
  int variant_index = 0;
  std::uint64_t card_seed = 0;
  int input_arity = 1;
  TransitionType transition_type = TransitionType::deformation_sufficient;
  std::string intended_candidate_id;
  ModelRef source_model;
  ConstellationGraph source_graph;
  std::array<ContextDataset, kNumContexts> datasets;
  std::vector<CandidateMove> candidates;
  std::vector<ConstraintSpec> constraints;
  LimitSpec limit;

  const ContextDataset& dataset(Context c) const {
    return datasets[static_cast<int>(c)];
  }
  ContextDataset& dataset(Context c) { return datasets[static_cast<int>(c)]; }
};

// Read-only view of a card with the evaluation labels (transition_type,
// intended_candidate_id) stripped. Scoring code accepts only this view so the
// labels cannot influence ranking.
struct CardView {
  const std::string& card_id;
  const std::string& family_id;
  std::uint64_t card_seed;
  int input_arity;
  const ModelRef& source_model;
  const ConstellationGraph& source_graph;
  const std::array<ContextDataset, kNumContexts>& datasets;
  const std::vector<CandidateMove>& candidates;
  const std::vector<ConstraintSpec>& constraints;
  const LimitSpec& limit;

  const ContextDataset& dataset(Context c) const {
    return datasets[static_cast<int>(c)];
  }
};

CardView strip_labels(const TransitionCard& card);

// Structural well-formedness check. Returns a list of human-readable
// violations; an empty list means the card is valid.
std::vector<std::string> validate_card(const TransitionCard& card);

}  // namespace cardbench
