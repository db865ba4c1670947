// Deterministic benchmark generator: six built-in theory-shift families, each
// instantiated as several seeded variants of a transition card.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cardbench/types.hpp"

namespace cardbench {

inline constexpr std::uint64_t kDefaultMasterSeed = 42;
inline constexpr int kDefaultVariantsPerFamily = 5;
inline constexpr double kDefaultNoiseSigma = 0.02;  // relative multiplicative noise

// Template for one candidate move of a family.
struct CandidateTemplate {
  std::string id;
  Role role = Role::deformation;
  MoveType move_type = MoveType::deformation;
  double cost = 0.0;
  std::string spec_id;
};

// Static definition of a benchmark family.
struct FamilyDef {
  std::string family_id;
  TransitionType transition_type = TransitionType::deformation_sufficient;
  int input_arity = 1;
  std::vector<std::string> input_names;
  std::string output_name;
  // Generating law (registered spec id within this family) and true theta.
  std::string generating_spec_id;
  std::vector<double> true_theta;
  // Sampling regimes, one per context, each with input_arity intervals.
  Regime source_regime, overlap_regime, target_regime, validation_regime;
  // Record counts per context: source, overlap, target, validation.
  int n_source = 40, n_overlap = 20, n_target = 40, n_validation = 20;
  double noise_sigma = kDefaultNoiseSigma;
  std::vector<CandidateTemplate> candidates;
  std::vector<ConstraintSpec> constraints;  // upper_bound "bound" < 0 means
                                            // "derive from target data at
                                            // generation time"
  Regime limit_regime;
  int limit_n_probe = 16;
  // Cross-family distractor spec used by the stress expansion.
  std::string stress_distractor_spec_id;
};

const std::vector<FamilyDef>& builtin_families();
const FamilyDef& find_family(const std::string& family_id);

// Deterministic per-card seed stream: hash of (master_seed, family, variant).
std::uint64_t variant_seed(std::uint64_t master_seed, const std::string& family_id,
                           int variant_index);

// One card of the family. Same (family, seed) -> identical card.
TransitionCard generate_card(const FamilyDef& family, std::uint64_t master_seed,
                             int variant_index);

// Full benchmark: every built-in family x variants_per_family variants.
std::vector<TransitionCard> generate_benchmark(std::uint64_t master_seed = kDefaultMasterSeed,
                                               int variants_per_family = kDefaultVariantsPerFamily);

// Constellation-graph construction used by the generator (exposed so stress
// candidates can build graphs consistent with the built-in cards).
ConstellationGraph build_source_graph(const FamilyDef& family);
ConstellationGraph build_candidate_graph(const FamilyDef& family, const CandidateTemplate& cand);

}  // namespace cardbench
