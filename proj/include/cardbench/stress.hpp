// Stress expansion of cards with adversarial candidates, selection margins,
// weight-sensitivity sweeps, data-robustness grids, and validation-residual
// diagnostics.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cardbench/obstruction.hpp"
#include "cardbench/types.hpp"

namespace cardbench {

struct StressConfig {
  int n_incorrect_formulas = 1;   // cross-family distractor formulas
  int n_randomized = 2;           // frozen perturbations of the intended law
  int n_matched_cost = 1;         // incorrect extensions at the intended cost
  double perturbation_scale = 0.15;
  std::uint64_t seed = 0;
};

// Returns a copy of the card with adversarial candidates appended (all with
// role incorrect). Deterministic in (card, config).
TransitionCard expand_card(const TransitionCard& card, const StressConfig& cfg);

// Selection margin: Obs(best non-intended candidate) - Obs(intended).
// Positive means the benchmark-correct move is selected with slack.
double stress_margin(const RankingResult& result);

struct StressCardReport {
  std::string card_id;
  std::string family_id;
  bool intended_selected = false;
  double margin = 0.0;
  std::string best_alternative_id;
  bool matched_cost_outranks_intended = false;  // on extension-required cards
};

struct StressSummary {
  BenchmarkMetrics metrics;
  std::vector<StressCardReport> reports;
  std::vector<std::string> negative_margin_cards;  // card ids with margin < 0
};

StressSummary stress_eval(const std::vector<TransitionCard>& cards, const StressConfig& cfg,
                          const ObstructionWeights& w, int jobs = 1);

// Weight sensitivity: rescale one weight block at a time and re-rank from the
// cached signatures. Blocks: residual (w_s,w_o,w_t together), gluing,
// constraints, limit, cost.
struct SensitivityCell {
  std::string block;
  double multiplier = 1.0;
  BenchmarkMetrics metrics;
  int n_selection_changes = 0;  // vs multiplier 1.0
};

const std::vector<std::string>& sensitivity_blocks();
const std::vector<double>& default_sensitivity_multipliers();

std::vector<SensitivityCell> weight_sensitivity(const std::vector<RankingResult>& baseline_results,
                                                const std::vector<CardLabels>& labels,
                                                const ObstructionWeights& w,
                                                const std::vector<double>& multipliers =
                                                    default_sensitivity_multipliers());

// Data robustness: multiplicative observation noise eta and subsampling
// fraction q (at least 3 records per context are kept), several seeded
// repeats per grid cell, full re-ranking.
struct RobustnessGrid {
  std::vector<double> noise_levels = {0.0, 0.01, 0.02, 0.05, 0.1, 0.2};
  std::vector<double> subsample_fractions = {1.0, 0.8, 0.6, 0.4, 0.25};
  int repeats = 5;
  std::uint64_t seed = 0;
};

struct RobustnessCell {
  double noise = 0.0;
  double subsample = 1.0;
  BenchmarkMetrics metrics;  // averaged over repeats
};

std::vector<RobustnessCell> robustness_sweep(const std::vector<TransitionCard>& cards,
                                             const RobustnessGrid& grid,
                                             const ObstructionWeights& w, int jobs = 1);

// Mean validation residual per candidate class over a ranked benchmark.
struct ValidationDiagnostics {
  double intended = 0.0;
  double selected = 0.0;
  double best_incorrect = 0.0;  // lowest-obstruction incorrect-role candidate
  double base = 0.0;
};

ValidationDiagnostics validation_diagnostics(const std::vector<RankingResult>& results,
                                             const std::vector<CardLabels>& labels);

}  // namespace cardbench
