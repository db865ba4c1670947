#include "cardbench/generator.hpp"

#include <algorithm>
#include <cmath>

#include "cardbench/card_io.hpp"
#include "cardbench/models.hpp"
#include "cardbench/rng.hpp"

namespace cardbench {
namespace {

Regime box(std::initializer_list<Interval> intervals) { return Regime(intervals); }

ConstraintSpec speed_bound_constraint() {
  ConstraintSpec cs;
  cs.id = "speed_bound";
  cs.kind = ConstraintKind::upper_bound;
  cs.applies_in = {Context::overlap, Context::target};
  cs.parameters["bound"] = 1.0;
  return cs;
}

ConstraintSpec monotonic_constraint(const std::string& id, int axis) {
  ConstraintSpec cs;
  cs.id = id;
  cs.kind = ConstraintKind::monotonic_increasing;
  cs.applies_in = {Context::overlap, Context::target};
  cs.parameters["axis"] = static_cast<double>(axis);
  return cs;
}

ConstraintSpec derived_radiance_bound() {
  ConstraintSpec cs;
  cs.id = "finite_radiance";
  cs.kind = ConstraintKind::upper_bound;
  cs.applies_in = {Context::target};
  cs.parameters["bound"] = -1.0;  // derived from target data at generation time
  return cs;
}

std::vector<FamilyDef> build_families() {
  std::vector<FamilyDef> fams;

  {
    FamilyDef f;
    f.family_id = "galilean_lorentz";
    f.transition_type = TransitionType::extension_required;
    f.input_arity = 2;
    f.input_names = {"u", "v"};
    f.output_name = "w";
    f.generating_spec_id = "lorentz";
    f.true_theta = {};
    // The particle speed u is observable in every context; the boost v
    // escalates from near-rest frames to relativistic ones.
    f.source_regime = box({{0.005, 0.95}, {0.005, 0.05}});
    f.overlap_regime = box({{0.005, 0.95}, {0.05, 0.3}});
    f.target_regime = box({{0.005, 0.95}, {0.3, 0.95}});
    f.validation_regime = box({{0.005, 0.95}, {0.005, 0.95}});
    f.candidates = {
        {"additive", Role::base, MoveType::deformation, 0.0, "additive"},
        {"scaled_additive", Role::deformation, MoveType::deformation, 0.4, "scaled_additive"},
        {"poly_composition", Role::deformation, MoveType::deformation, 0.4, "poly_composition"},
        {"damped_additive", Role::incorrect, MoveType::extension, 1.5, "damped_additive"},
        {"lorentz", Role::intended, MoveType::extension, 1.6, "lorentz"},
    };
    f.constraints = {speed_bound_constraint()};
    f.limit_regime = box({{0.005, 0.02}, {0.005, 0.02}});
    f.limit_n_probe = 16;
    f.stress_distractor_spec_id = "cubic_composition";
    fams.push_back(std::move(f));
  }

  {
    FamilyDef f;
    f.family_id = "newton_relativistic";
    f.transition_type = TransitionType::extension_required;
    f.input_arity = 1;
    f.input_names = {"v"};
    f.output_name = "E";
    f.generating_spec_id = "relativistic";
    f.true_theta = {};
    f.source_regime = box({{0.01, 0.1}});
    f.overlap_regime = box({{0.1, 0.35}});
    f.target_regime = box({{0.35, 0.95}});
    f.validation_regime = box({{0.01, 0.95}});
    f.candidates = {
        {"newtonian", Role::base, MoveType::deformation, 0.0, "newtonian"},
        {"scaled_newtonian", Role::deformation, MoveType::deformation, 0.5, "scaled_newtonian"},
        {"rational_energy", Role::incorrect, MoveType::extension, 1.5, "rational_energy"},
        {"relativistic", Role::intended, MoveType::extension, 1.6, "relativistic"},
    };
    f.constraints = {monotonic_constraint("energy_monotone", 0)};
    f.limit_regime = box({{0.01, 0.05}});
    f.limit_n_probe = 12;
    f.stress_distractor_spec_id = "cubic_energy";
    fams.push_back(std::move(f));
  }

  {
    FamilyDef f;
    f.family_id = "rj_planck";
    f.transition_type = TransitionType::extension_required;
    f.input_arity = 2;
    f.input_names = {"lambda", "T"};
    f.output_name = "B";
    f.generating_spec_id = "planck";
    f.true_theta = {1.0, 1.0};  // amplitude matches the long-wavelength law
    f.source_regime = box({{3.0, 8.0}, {0.8, 1.6}});
    f.overlap_regime = box({{0.8, 3.0}, {0.8, 1.6}});
    f.target_regime = box({{0.12, 0.8}, {0.8, 1.6}});
    f.validation_regime = box({{0.12, 8.0}, {0.8, 1.6}});
    f.candidates = {
        {"rayleigh_jeans", Role::base, MoveType::deformation, 0.0, "rayleigh_jeans"},
        {"rj_linear_repair", Role::deformation, MoveType::deformation, 0.5, "rj_linear_repair"},
        {"rj_quadratic_repair", Role::incorrect, MoveType::extension, 1.5, "rj_quadratic_repair"},
        {"planck", Role::intended, MoveType::extension, 1.6, "planck"},
    };
    f.constraints = {derived_radiance_bound()};
    f.limit_regime = box({{5.0, 8.0}, {0.8, 1.6}});
    f.limit_n_probe = 16;
    f.stress_distractor_spec_id = "powerlaw_radiation";
    fams.push_back(std::move(f));
  }

  {
    FamilyDef f;
    f.family_id = "pendulum_finite";
    f.transition_type = TransitionType::deformation_sufficient;
    f.input_arity = 1;
    f.input_names = {"theta0"};
    f.output_name = "period";
    f.generating_spec_id = "finite_angle";
    f.true_theta = {0.0625};  // 1/16 finite-amplitude correction
    f.source_regime = box({{0.05, 0.35}});
    f.overlap_regime = box({{0.35, 0.7}});
    f.target_regime = box({{0.7, 1.4}});
    f.validation_regime = box({{0.05, 1.4}});
    f.noise_sigma = 0.002;  // period timing is far more precise than 2%
    f.candidates = {
        {"small_angle", Role::base, MoveType::deformation, 0.0, "small_angle"},
        {"finite_angle", Role::intended, MoveType::deformation, 0.5, "finite_angle"},
        {"rational_period", Role::incorrect, MoveType::extension, 1.5, "rational_period"},
    };
    f.constraints = {monotonic_constraint("period_monotone", 0)};
    f.limit_regime = box({{0.05, 0.12}});
    f.limit_n_probe = 10;
    f.stress_distractor_spec_id = "linear_period";
    fams.push_back(std::move(f));
  }

  {
    FamilyDef f;
    f.family_id = "ideal_virial";
    f.transition_type = TransitionType::deformation_sufficient;
    f.input_arity = 1;
    f.input_names = {"rho"};
    f.output_name = "Z";
    f.generating_spec_id = "linear_virial";
    f.true_theta = {0.45};
    f.source_regime = box({{0.01, 0.1}});
    f.overlap_regime = box({{0.1, 0.3}});
    f.target_regime = box({{0.3, 0.8}});
    f.validation_regime = box({{0.01, 0.8}});
    f.noise_sigma = 0.005;
    f.candidates = {
        {"ideal", Role::base, MoveType::deformation, 0.0, "ideal"},
        {"linear_virial", Role::intended, MoveType::deformation, 0.4, "linear_virial"},
        {"quadratic_virial", Role::deformation, MoveType::deformation, 0.6, "quadratic_virial"},
        {"hard_sphere", Role::incorrect, MoveType::extension, 1.5, "hard_sphere"},
    };
    f.constraints = {monotonic_constraint("compressibility_monotone", 0)};
    f.limit_regime = box({{0.01, 0.05}});
    f.limit_n_probe = 10;
    f.stress_distractor_spec_id = "exp_virial";
    fams.push_back(std::move(f));
  }

  {
    FamilyDef f;
    f.family_id = "ohm_temperature";
    f.transition_type = TransitionType::deformation_sufficient;
    f.input_arity = 2;
    f.input_names = {"I", "T"};
    f.output_name = "V";
    f.generating_spec_id = "linear_temp";
    f.true_theta = {0.004};
    f.source_regime = box({{0.5, 2.0}, {290.0, 310.0}});
    f.overlap_regime = box({{0.5, 2.0}, {310.0, 350.0}});
    f.target_regime = box({{0.5, 2.0}, {350.0, 500.0}});
    f.validation_regime = box({{0.5, 2.0}, {290.0, 500.0}});
    f.noise_sigma = 0.005;
    f.candidates = {
        {"ohmic", Role::base, MoveType::deformation, 0.0, "ohmic"},
        {"linear_temp", Role::intended, MoveType::deformation, 0.5, "linear_temp"},
        {"quadratic_temp", Role::incorrect, MoveType::extension, 1.5, "quadratic_temp"},
    };
    f.constraints = {monotonic_constraint("resistance_monotone", 1)};
    f.limit_regime = box({{0.5, 2.0}, {295.0, 305.0}});
    f.limit_n_probe = 16;
    f.stress_distractor_spec_id = "power_temp";
    fams.push_back(std::move(f));
  }

  return fams;
}

// Per-variant jitter of the generating parameters (data-level diversity
// beyond resampling). Families with dimensionless fixed truths stay fixed.
std::vector<double> jittered_truth(const FamilyDef& family, std::uint64_t seed) {
  std::vector<double> theta = family.true_theta;
  if (family.family_id == "ideal_virial" || family.family_id == "ohm_temperature") {
    auto rng = make_rng(derive_seed(seed, "truth-jitter"));
    std::uniform_real_distribution<double> jitter(-0.1, 0.1);
    for (double& t : theta) t *= 1.0 + jitter(rng);
  }
  return theta;
}

ContextDataset sample_dataset(const FamilyDef& family, Context context, const Regime& regime,
                              int n, const ResolvedModel& generator, std::uint64_t card_seed) {
  ContextDataset ds;
  ds.context = context;
  ds.regime = regime;
  auto rng = make_rng(derive_seed(card_seed, "data:" + to_string(context)));
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  ds.records.reserve(n);
  for (int i = 0; i < n; ++i) {
    ObservationRecord r;
    r.context = context;
    r.x.resize(family.input_arity);
    for (int d = 0; d < family.input_arity; ++d) {
      r.x[d] = regime[d].lo + regime[d].width() * uniform(rng);
    }
    const double y_true = generator.eval(nullptr, r.x.data());
    r.y = y_true * (1.0 + family.noise_sigma * noise(rng));
    ds.records.push_back(std::move(r));
  }
  return ds;
}

}  // namespace

const std::vector<FamilyDef>& builtin_families() {
  static const std::vector<FamilyDef> kFamilies = build_families();
  return kFamilies;
}

const FamilyDef& find_family(const std::string& family_id) {
  for (const auto& f : builtin_families()) {
    if (f.family_id == family_id) return f;
  }
  throw ConfigError("unknown family '" + family_id + "'");
}

std::uint64_t variant_seed(std::uint64_t master_seed, const std::string& family_id,
                           int variant_index) {
  return derive_seed(master_seed, "family:" + family_id, static_cast<std::uint64_t>(variant_index));
}

ConstellationGraph build_source_graph(const FamilyDef& family) {
  ConstellationGraph g;
  for (const auto& name : family.input_names) g.nodes.push_back({name, NodeType::observable});
  g.nodes.push_back({family.output_name, NodeType::observable});
  g.nodes.push_back({"law", NodeType::law_schema});
  g.nodes.push_back({"classical_posit", NodeType::posit});
  g.nodes.push_back({"ctx_source", NodeType::context});
  for (const auto& name : family.input_names) g.edges.push_back({"law", EdgeType::uses, name});
  g.edges.push_back({"law", EdgeType::measures, family.output_name});
  g.edges.push_back({"law", EdgeType::assumes, "classical_posit"});
  g.edges.push_back({"law", EdgeType::valid_in, "ctx_source"});
  if (family.family_id == "galilean_lorentz") {
    g.commitments.absolute_time = true;
    g.commitments.preferred_frame = true;
  } else if (family.family_id == "newton_relativistic") {
    g.commitments.absolute_time = true;
  }
  return g;
}

ConstellationGraph build_candidate_graph(const FamilyDef& family, const CandidateTemplate& cand) {
  if (cand.role == Role::base) return build_source_graph(family);

  ConstellationGraph g;
  for (const auto& name : family.input_names) g.nodes.push_back({name, NodeType::observable});
  g.nodes.push_back({family.output_name, NodeType::observable});
  g.nodes.push_back({"law", NodeType::law_schema});
  g.nodes.push_back({"ctx_source", NodeType::context});
  g.nodes.push_back({"ctx_target", NodeType::context});
  for (const auto& name : family.input_names) g.edges.push_back({"law", EdgeType::uses, name});
  g.edges.push_back({"law", EdgeType::measures, family.output_name});
  g.edges.push_back({"law", EdgeType::valid_in, "ctx_source"});
  g.edges.push_back({"law", EdgeType::valid_in, "ctx_target"});

  const bool intended_extension =
      cand.role == Role::intended && cand.move_type == MoveType::extension;

  if (cand.move_type == MoveType::deformation) {
    // Stays within the source language: a correction term extending the old
    // law, with the classical posit retained.
    g.nodes.push_back({"source_law", NodeType::law_schema});
    g.nodes.push_back({"classical_posit", NodeType::posit});
    g.edges.push_back({"law", EdgeType::extends, "source_law"});
    g.edges.push_back({"law", EdgeType::assumes, "classical_posit"});
    if (family.family_id == "galilean_lorentz" || family.family_id == "newton_relativistic") {
      g.commitments.absolute_time = true;
    }
  } else if (intended_extension) {
    // Principled extension: a new posit and constraint, plus an explicit
    // limit relation back to the source law.
    g.nodes.push_back({"source_law", NodeType::law_schema});
    g.nodes.push_back({"new_posit", NodeType::posit});
    g.nodes.push_back({"new_constraint", NodeType::constraint});
    g.nodes.push_back({"limit_rel", NodeType::limit_relation});
    g.nodes.push_back({"transform", NodeType::transformation_rule});
    g.edges.push_back({"law", EdgeType::introduces, "new_posit"});
    g.edges.push_back({"law", EdgeType::constrains, "new_constraint"});
    g.edges.push_back({"law", EdgeType::preserves, "limit_rel"});
    g.edges.push_back({"limit_rel", EdgeType::reduces_to, "source_law"});
    g.edges.push_back({"transform", EdgeType::preserves, "new_constraint"});
    g.commitments.limit_relation = true;
    g.commitments.introduces_constraint = true;
    if (family.family_id == "rj_planck") {
      g.commitments.quantization_scale = true;
    } else {
      g.commitments.invariant_speed = true;
      g.commitments.low_speed_limit = true;
    }
  } else {
    // Incorrect extension: discards the old posit without a limit relation.
    g.nodes.push_back({"classical_posit", NodeType::posit});
    g.nodes.push_back({"new_posit", NodeType::posit});
    g.edges.push_back({"law", EdgeType::introduces, "new_posit"});
    g.edges.push_back({"new_posit", EdgeType::conflicts, "classical_posit"});
    g.commitments.removes_old_posit = true;
  }
  return g;
}

TransitionCard generate_card(const FamilyDef& family, std::uint64_t master_seed,
                             int variant_index) {
  TransitionCard card;
  card.family_id = family.family_id;
  card.variant_index = variant_index;
  card.card_seed = variant_seed(master_seed, family.family_id, variant_index);
  {
    char suffix[8];
    std::snprintf(suffix, sizeof(suffix), "%02d", variant_index);
    card.card_id = family.family_id + "-" + suffix;
  }
  card.input_arity = family.input_arity;
  card.transition_type = family.transition_type;

  ModelRef generating_ref;
  generating_ref.family_id = family.family_id;
  generating_ref.spec_id = family.generating_spec_id;
  const std::vector<double> truth = jittered_truth(family, card.card_seed);
  if (!truth.empty()) generating_ref.frozen_theta = truth;
  const ResolvedModel generator = resolve_model(generating_ref);

  card.datasets[static_cast<int>(Context::source)] = sample_dataset(
      family, Context::source, family.source_regime, family.n_source, generator, card.card_seed);
  card.datasets[static_cast<int>(Context::overlap)] =
      sample_dataset(family, Context::overlap, family.overlap_regime, family.n_overlap, generator,
                     card.card_seed);
  card.datasets[static_cast<int>(Context::target)] = sample_dataset(
      family, Context::target, family.target_regime, family.n_target, generator, card.card_seed);
  card.datasets[static_cast<int>(Context::validation)] =
      sample_dataset(family, Context::validation, family.validation_regime, family.n_validation,
                     generator, card.card_seed);

  // Source constellation: base-family model with canonical parameters.
  const CandidateTemplate* base_template = nullptr;
  for (const auto& ct : family.candidates) {
    if (ct.role == Role::base) base_template = &ct;
  }
  if (base_template == nullptr) throw ConfigError("family without base candidate");
  card.source_model.family_id = family.family_id;
  card.source_model.spec_id = base_template->spec_id;
  card.source_graph = build_source_graph(family);

  for (const auto& ct : family.candidates) {
    CandidateMove cand;
    cand.id = ct.id;
    cand.role = ct.role;
    cand.move_type = ct.move_type;
    cand.cost = ct.cost;
    cand.model.family_id = family.family_id;
    cand.model.spec_id = ct.spec_id;
    cand.graph = build_candidate_graph(family, ct);
    card.candidates.push_back(std::move(cand));
    if (ct.role == Role::intended) card.intended_candidate_id = ct.id;
  }

  card.constraints = family.constraints;
  for (auto& cs : card.constraints) {
    if (cs.kind == ConstraintKind::upper_bound && cs.parameters.at("bound") < 0.0) {
      double max_y = 0.0;
      for (const auto& r : card.dataset(Context::target).records) {
        max_y = std::max(max_y, std::fabs(r.y));
      }
      cs.parameters["bound"] = 1.3 * max_y;
    }
  }

  card.limit.limit_regime = family.limit_regime;
  card.limit.n_probe = family.limit_n_probe;
  card.limit.reference.family_id = family.family_id;
  card.limit.reference.spec_id = base_template->spec_id;

  return card;
}

std::vector<TransitionCard> generate_benchmark(std::uint64_t master_seed,
                                               int variants_per_family) {
  std::vector<TransitionCard> cards;
  for (const auto& family : builtin_families()) {
    for (int v = 0; v < variants_per_family; ++v) {
      cards.push_back(generate_card(family, master_seed, v));
    }
  }
  return cards;
}

}  // namespace cardbench
