// Obstruction functional: per-candidate residual/gluing/constraint/limit
// signature, weighted score, card-level ranking, benchmark metrics, baseline
// scorers, and ablations.
#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cardbench/fit.hpp"
#include "cardbench/types.hpp"

namespace cardbench {

// Weights of the obstruction functional. Defaults are the reference setting.
struct ObstructionWeights {
  double w_source = 1.00;
  double w_overlap = 1.00;
  double w_target = 1.50;
  double w_gluing = 1.50;
  double w_constraint = 2.00;
  double w_limit = 1.50;
  double lambda_cost = 0.25;
};

// Per-candidate diagnostic signature. r_validation is diagnostic only and is
// never part of the obstruction score.
struct ObstructionSignature {
  double r_source = 0.0;
  double r_overlap = 0.0;
  double r_target = 0.0;
  double r_validation = 0.0;
  double gluing = 0.0;
  double constraint = 0.0;
  double limit = 0.0;
  double cost = 0.0;
};

// Obs = w_s*R_s + w_o*R_o + w_t*R_t + w_g*G + w_c*C + w_l*P + lambda*Cost.
double obstruction_score(const ObstructionSignature& sig, const ObstructionWeights& w);

struct RankedCandidate {
  std::string candidate_id;
  Role role = Role::deformation;
  MoveType move_type = MoveType::deformation;
  ObstructionSignature signature;
  double score = 0.0;
  int rank = 0;  // 1-based
  std::vector<double> psi;  // graph features, carried for downstream probes
};

struct RankingResult {
  std::string card_id;
  std::string family_id;
  int variant_index = 0;
  double scale = 0.0;  // normalization scale used for all residual terms
  std::vector<RankedCandidate> rows;  // sorted ascending by score
  std::string selected_id;            // rows[0]
  int intended_rank = 0;              // 1-based rank of the intended candidate
  double margin = 0.0;  // Obs(best non-intended) - Obs(intended)
};

// Normalization scale of a card: population std of y over source+overlap+
// target records, falling back to max|y| when the std is degenerate.
double card_scale(const CardView& card);

// Consistency residual between the source-fit and target-fit charts evaluated
// on the overlap inputs: RMSE(pred_s, pred_t)/scale, saturated. Exactly zero
// for zero-parameter candidates.
double gluing_residual(const CardView& card, const CandidateMove& candidate,
                       const FitOptions& options = FitOptions());

// Mean normalized constraint violation of the candidate's global chart over
// the card's constraint specs (each evaluated on a deterministic stratified
// probe grid and saturated); zero when the card declares no constraints.
double constraint_violation(const CardView& card, const CandidateMove& candidate,
                            const ResolvedModel& model, const FittedChart& global_chart);

// Normalized RMSE between the candidate's global chart and the canonical
// source-theory reference on the limit-regime probe grid, saturated.
double limit_penalty(const CardView& card, const CandidateMove& candidate,
                     const ResolvedModel& model, const FittedChart& global_chart);

// Full signature for one candidate (fits source/target/global charts).
ObstructionSignature candidate_signature(const CardView& card, const CandidateMove& candidate,
                                         double scale, const FitOptions& options = FitOptions());

// Score and sort all candidates of a card. Ascending score; ties broken by
// ascending cost, then lexicographic candidate id. Evaluation labels are not
// visible to this overload.
RankingResult rank_card(const CardView& card, const ObstructionWeights& w,
                        const FitOptions& options = FitOptions());

// Convenience overload: ranks the label-stripped view, then fills
// intended_rank/margin from the card's labels.
RankingResult rank_card(const TransitionCard& card, const ObstructionWeights& w,
                        const FitOptions& options = FitOptions());

// Evaluation labels needed to score a ranking against a benchmark.
struct CardLabels {
  std::string card_id;
  std::string intended_candidate_id;
  TransitionType transition_type = TransitionType::deformation_sufficient;
};

CardLabels card_labels(const TransitionCard& card);

// Attach labels to a ranking produced from a stripped view.
void apply_labels(RankingResult& result, const CardLabels& labels);

struct BenchmarkMetrics {
  double top1 = 0.0;           // fraction of cards whose top candidate is intended
  double mrr = 0.0;            // mean reciprocal rank of the intended candidate
  double type_accuracy = 0.0;  // fraction whose selected move type matches the
                               // card's required transition type
  int n_cards = 0;
};

BenchmarkMetrics benchmark_metrics(const std::vector<RankingResult>& results,
                                   const std::vector<CardLabels>& labels);

enum class Baseline : int {
  target_only = 0,
  source_target,
  source_overlap_target,
  residual_cost,
  residual_gluing,
  full_obstruction,
};

const std::vector<Baseline>& all_baselines();
const std::string& to_string(Baseline b);
Baseline baseline_from_string(const std::string& s);

// Score of a signature under one baseline (weighted terms use the reference
// weights carried in `w`; target_only is the unweighted target residual).
double baseline_score(const ObstructionSignature& sig, Baseline b, const ObstructionWeights& w);

// Re-rank an existing result under an arbitrary signature scorer (used by
// baselines and weight sweeps; signatures are score-independent).
RankingResult rerank(const RankingResult& result,
                     const std::function<double(const ObstructionSignature&)>& scorer,
                     const CardLabels& labels);

// Weights with one named term removed (set to zero). Terms: source, overlap,
// target, gluing, constraints, limit, cost.
ObstructionWeights ablated_weights(const ObstructionWeights& w, const std::string& term);
const std::vector<std::string>& ablation_terms();

}  // namespace cardbench
