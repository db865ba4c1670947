// Kernel probe over candidate signatures: blockwise Gaussian kernel plus a
// normalized graph-feature kernel, kernel ridge scoring, and transfer
// evaluations (leave-family-out, variant suites, ablations).
#pragma once

#include <map>
#include <string>
#include <vector>

#include "cardbench/obstruction.hpp"
#include "cardbench/types.hpp"

namespace cardbench {

struct KernelConfig {
  // Block mixture coefficients.
  double alpha_residual = 1.0;
  double alpha_gluing = 1.0;
  double alpha_constraint = 1.0;
  double alpha_limit = 1.0;
  double alpha_graph = 1.0;
  // Gaussian bandwidths per block.
  double sigma_residual = 1.0;
  double sigma_gluing = 1.0;
  double sigma_constraint = 1.0;
  double sigma_limit = 1.0;
  double ridge = 1e-3;
  double graph_epsilon = 1e-9;
};

// One candidate row of a ranked benchmark, as consumed by the kernel probe.
struct CandidateRow {
  std::string card_id;
  std::string family_id;
  int variant_index = 0;
  std::string candidate_id;
  Role role = Role::deformation;
  MoveType move_type = MoveType::deformation;
  ObstructionSignature signature;
  std::vector<double> psi;
  // Evaluation labels (used only to train/evaluate the probe).
  bool relevant = false;  // true iff this is the intended candidate
  TransitionType transition_type = TransitionType::deformation_sufficient;
};

// Flatten ranked results + labels into kernel rows.
std::vector<CandidateRow> make_candidate_rows(const std::vector<RankingResult>& results,
                                              const std::vector<CardLabels>& labels);

// Per-feature standardization statistics, computed from training rows only.
struct Standardization {
  std::vector<double> mean;  // 7 entries: R_s,R_o,R_t,R_v,G,C,P
  std::vector<double> std;
};

Standardization fit_standardization(const std::vector<CandidateRow>& train_rows);

// Blockwise kernel between two rows under a shared standardization.
double kernel(const CandidateRow& a, const CandidateRow& b, const Standardization& st,
              const KernelConfig& cfg);

// Kernel ridge scoring model trained on binary relevance labels.
struct ScoringModel {
  std::vector<CandidateRow> train_rows;
  std::vector<double> coefficients;
  Standardization standardization;
  KernelConfig config;

  double score(const CandidateRow& row) const;
};

ScoringModel fit_scoring_model(const std::vector<CandidateRow>& train_rows,
                               const KernelConfig& cfg);

// Ranking metrics of a scored row set, grouped per card (descending score;
// ties broken by ascending candidate id).
BenchmarkMetrics score_and_evaluate(const ScoringModel& model,
                                    const std::vector<CandidateRow>& test_rows);

// Pairwise preference accuracy: fraction of (intended, other) pairs within a
// card where the intended row scores strictly higher.
double pairwise_preference_accuracy(const ScoringModel& model,
                                    const std::vector<CandidateRow>& test_rows);

// Leave-family-out transfer: one fold per family, standardization and model
// fitted on the remaining families only. Returns pooled metrics.
BenchmarkMetrics leave_family_out_eval(const std::vector<CandidateRow>& rows,
                                       const KernelConfig& cfg);

// Kernel ablations: full config plus each block coefficient zeroed in turn.
// Keys: full, no_residual, no_gluing, no_constraint, no_limit, no_graph.
std::map<std::string, BenchmarkMetrics> kernel_ablation_suite(const std::vector<CandidateRow>& rows,
                                                              const KernelConfig& cfg);

// Protocol x scorer grid. Protocols: leave_family_out, leave_variant_out_mixed,
// within_family_heldout. Scorers: kernel_ranking (top-1/MRR/type from KRR
// scores) and pairwise_ranking (preference accuracy reported in `pairwise`).
struct VariantSuiteCell {
  std::string protocol;
  std::string scorer;
  BenchmarkMetrics metrics;
  double pairwise = 0.0;
};

std::vector<VariantSuiteCell> variant_suite_eval(const std::vector<CandidateRow>& rows,
                                                 const KernelConfig& cfg);

}  // namespace cardbench
