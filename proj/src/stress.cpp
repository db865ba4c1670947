#include "cardbench/stress.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>

#include "cardbench/generator.hpp"
#include "cardbench/models.hpp"
#include "cardbench/rng.hpp"

namespace cardbench {
namespace {

// Run fn(i) for i in [0, n) with up to `jobs` worker tasks; results keep
// their index order, so parallel runs are byte-identical to serial ones.
template <typename Result, typename Fn>
std::vector<Result> parallel_map(int n, int jobs, Fn fn) {
  std::vector<Result> out(n);
  if (jobs <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) out[i] = fn(i);
  };
  std::vector<std::future<void>> tasks;
  for (int t = 0; t < std::min(jobs, n); ++t) {
    tasks.push_back(std::async(std::launch::async, worker));
  }
  for (auto& t : tasks) t.get();
  return out;
}

const CandidateMove& intended_candidate(const TransitionCard& card) {
  for (const auto& c : card.candidates) {
    if (c.id == card.intended_candidate_id) return c;
  }
  throw ConfigError("card '" + card.card_id + "' has no intended candidate");
}

const CandidateMove* find_role(const TransitionCard& card, Role role) {
  for (const auto& c : card.candidates) {
    if (c.role == role) return &c;
  }
  return nullptr;
}

ConstellationGraph distractor_graph(const FamilyDef& family) {
  CandidateTemplate tmpl;
  tmpl.role = Role::incorrect;
  tmpl.move_type = MoveType::extension;
  return build_candidate_graph(family, tmpl);
}

}  // namespace

TransitionCard expand_card(const TransitionCard& card, const StressConfig& cfg) {
  TransitionCard out = card;
  const FamilyDef& family = find_family(card.family_id);
  const CandidateMove& intended = intended_candidate(card);
  auto rng = make_rng(derive_seed(cfg.seed, "stress:" + card.card_id));
  std::normal_distribution<double> gauss(0.0, 1.0);

  // (a) Cross-family distractor formulas with extension-like cost.
  for (int i = 0; i < cfg.n_incorrect_formulas; ++i) {
    CandidateMove cand;
    cand.id = "stress_formula_" + std::to_string(i);
    cand.role = Role::incorrect;
    cand.move_type = MoveType::extension;
    cand.cost = 1.5;
    cand.model.family_id = family.family_id;
    cand.model.spec_id = family.stress_distractor_spec_id;
    cand.graph = distractor_graph(family);
    out.candidates.push_back(std::move(cand));
  }

  // (b) Frozen perturbations of the intended law: parameters (or, for
  // parameter-free intended laws, fixed constants) scaled by
  // (1 + perturbation_scale * N(0,1)); zero remaining degrees of freedom.
  const ModelSpec& intended_spec =
      find_model_spec(intended.model.family_id, intended.model.spec_id);
  for (int i = 0; i < cfg.n_randomized; ++i) {
    CandidateMove cand;
    cand.id = "stress_perturbed_" + std::to_string(i);
    cand.role = Role::incorrect;
    cand.move_type = intended.move_type;
    cand.cost = intended.cost;
    cand.model = intended.model;
    cand.graph = intended.graph;
    cand.graph.commitments.removes_old_posit = true;
    if (intended_spec.parameter_count > 0) {
      // Freeze the family's recorded generating truth (bound midpoints when
      // the intended spec does not match the generating spec).
      std::vector<double> truth = family.true_theta;
      if (static_cast<int>(truth.size()) != intended_spec.parameter_count) {
        truth.assign(intended_spec.parameter_count, 0.0);
        for (int d = 0; d < intended_spec.parameter_count; ++d) {
          truth[d] = intended_spec.bounds[d].mid();
        }
      }
      for (double& t : truth) t *= 1.0 + cfg.perturbation_scale * gauss(rng);
      cand.model.frozen_theta = truth;
    } else {
      for (auto& [key, value] : intended_spec.constants) {
        cand.model.constant_overrides[key] = value * (1.0 + cfg.perturbation_scale * gauss(rng));
      }
    }
    out.candidates.push_back(std::move(cand));
  }

  // (c) Incorrect extensions priced exactly at the intended candidate's cost.
  const CandidateMove* incorrect = find_role(card, Role::incorrect);
  for (int i = 0; i < cfg.n_matched_cost; ++i) {
    CandidateMove cand;
    if (incorrect != nullptr) {
      cand = *incorrect;
    } else {
      cand.model.family_id = family.family_id;
      cand.model.spec_id = family.stress_distractor_spec_id;
      cand.graph = distractor_graph(family);
    }
    cand.id = "stress_matched_cost_" + std::to_string(i);
    cand.role = Role::incorrect;
    cand.move_type = MoveType::extension;
    cand.cost = intended.cost;
    out.candidates.push_back(std::move(cand));
  }

  return out;
}

double stress_margin(const RankingResult& result) { return result.margin; }

StressSummary stress_eval(const std::vector<TransitionCard>& cards, const StressConfig& cfg,
                          const ObstructionWeights& w, int jobs) {
  StressSummary summary;
  std::vector<CardLabels> labels;
  const auto results = parallel_map<RankingResult>(
      static_cast<int>(cards.size()), jobs,
      [&](int i) { return rank_card(expand_card(cards[i], cfg), w); });
  for (const auto& card : cards) labels.push_back(card_labels(card));
  summary.metrics = benchmark_metrics(results, labels);

  for (size_t i = 0; i < cards.size(); ++i) {
    const TransitionCard& card = cards[i];
    const RankingResult& res = results[i];
    StressCardReport report;
    report.card_id = card.card_id;
    report.family_id = card.family_id;
    report.intended_selected = res.selected_id == card.intended_candidate_id;
    report.margin = stress_margin(res);
    for (const auto& row : res.rows) {
      if (row.candidate_id != card.intended_candidate_id) {
        report.best_alternative_id = row.candidate_id;
        break;
      }
    }
    if (card.transition_type == TransitionType::extension_required) {
      int intended_rank = 0;
      for (const auto& row : res.rows) {
        if (row.candidate_id == card.intended_candidate_id) intended_rank = row.rank;
      }
      for (const auto& row : res.rows) {
        const bool matched_cost = row.candidate_id.rfind("stress_matched_cost_", 0) == 0;
        if (matched_cost && row.rank < intended_rank) {
          report.matched_cost_outranks_intended = true;
        }
      }
    }
    if (report.margin < 0.0) summary.negative_margin_cards.push_back(card.card_id);
    summary.reports.push_back(std::move(report));
  }
  return summary;
}

const std::vector<std::string>& sensitivity_blocks() {
  static const std::vector<std::string> kBlocks = {"residual", "gluing", "constraints", "limit",
                                                   "cost"};
  return kBlocks;
}

const std::vector<double>& default_sensitivity_multipliers() {
  static const std::vector<double> kMultipliers = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0};
  return kMultipliers;
}

std::vector<SensitivityCell> weight_sensitivity(const std::vector<RankingResult>& baseline_results,
                                                const std::vector<CardLabels>& labels,
                                                const ObstructionWeights& w,
                                                const std::vector<double>& multipliers) {
  std::vector<SensitivityCell> out;
  for (const auto& block : sensitivity_blocks()) {
    for (double mult : multipliers) {
      ObstructionWeights scaled = w;
      if (block == "residual") {
        scaled.w_source *= mult;
        scaled.w_overlap *= mult;
        scaled.w_target *= mult;
      } else if (block == "gluing") {
        scaled.w_gluing *= mult;
      } else if (block == "constraints") {
        scaled.w_constraint *= mult;
      } else if (block == "limit") {
        scaled.w_limit *= mult;
      } else {
        scaled.lambda_cost *= mult;
      }

      SensitivityCell cell;
      cell.block = block;
      cell.multiplier = mult;
      std::vector<RankingResult> reranked;
      for (size_t i = 0; i < baseline_results.size(); ++i) {
        reranked.push_back(rerank(
            baseline_results[i],
            [&scaled](const ObstructionSignature& sig) { return obstruction_score(sig, scaled); },
            labels[i]));
        if (reranked.back().selected_id != baseline_results[i].selected_id) {
          ++cell.n_selection_changes;
        }
      }
      cell.metrics = benchmark_metrics(reranked, labels);
      out.push_back(std::move(cell));
    }
  }
  return out;
}

namespace {

TransitionCard perturb_card(const TransitionCard& card, double noise, double subsample,
                            std::uint64_t seed) {
  TransitionCard out = card;
  auto rng = make_rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (auto& ds : out.datasets) {
    // Subsample, keeping at least 3 records per context.
    if (subsample < 1.0 && !ds.records.empty()) {
      const int keep = std::max(
          3, static_cast<int>(std::llround(subsample * static_cast<double>(ds.records.size()))));
      if (keep < static_cast<int>(ds.records.size())) {
        std::vector<int> idx(ds.records.size());
        for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
        std::shuffle(idx.begin(), idx.end(), rng);
        idx.resize(keep);
        std::sort(idx.begin(), idx.end());
        std::vector<ObservationRecord> kept;
        kept.reserve(keep);
        for (int i : idx) kept.push_back(ds.records[i]);
        ds.records = std::move(kept);
      }
    }
    if (noise > 0.0) {
      for (auto& r : ds.records) r.y *= 1.0 + noise * gauss(rng);
    }
  }
  return out;
}

}  // namespace

std::vector<RobustnessCell> robustness_sweep(const std::vector<TransitionCard>& cards,
                                             const RobustnessGrid& grid,
                                             const ObstructionWeights& w, int jobs) {
  std::vector<CardLabels> labels;
  for (const auto& card : cards) labels.push_back(card_labels(card));

  struct Task {
    int cell;
    int repeat;
    int card;
  };
  std::vector<RobustnessCell> cells;
  std::vector<Task> tasks;
  int cell_index = 0;
  for (double noise : grid.noise_levels) {
    for (double q : grid.subsample_fractions) {
      cells.push_back({noise, q, BenchmarkMetrics{}});
      for (int rep = 0; rep < grid.repeats; ++rep) {
        for (int c = 0; c < static_cast<int>(cards.size()); ++c) {
          tasks.push_back({cell_index, rep, c});
        }
      }
      ++cell_index;
    }
  }

  const auto results = parallel_map<RankingResult>(
      static_cast<int>(tasks.size()), jobs, [&](int t) {
        const Task& task = tasks[t];
        const RobustnessCell& cell = cells[task.cell];
        const TransitionCard& card = cards[task.card];
        const std::uint64_t seed =
            derive_seed(grid.seed, "robustness:" + card.card_id,
                        static_cast<std::uint64_t>(task.cell) * 1000 + task.repeat);
        return rank_card(perturb_card(card, cell.noise, cell.subsample, seed), w);
      });

  // Average metrics over repeats within each cell.
  for (size_t cell = 0; cell < cells.size(); ++cell) {
    BenchmarkMetrics acc;
    int n_repeats = 0;
    for (int rep = 0; rep < grid.repeats; ++rep) {
      std::vector<RankingResult> repeat_results;
      for (size_t t = 0; t < tasks.size(); ++t) {
        if (tasks[t].cell == static_cast<int>(cell) && tasks[t].repeat == rep) {
          repeat_results.push_back(results[t]);
        }
      }
      if (repeat_results.empty()) continue;
      const BenchmarkMetrics m = benchmark_metrics(repeat_results, labels);
      acc.top1 += m.top1;
      acc.mrr += m.mrr;
      acc.type_accuracy += m.type_accuracy;
      acc.n_cards = m.n_cards;
      ++n_repeats;
    }
    if (n_repeats > 0) {
      acc.top1 /= n_repeats;
      acc.mrr /= n_repeats;
      acc.type_accuracy /= n_repeats;
    }
    cells[cell].metrics = acc;
  }
  return cells;
}

ValidationDiagnostics validation_diagnostics(const std::vector<RankingResult>& results,
                                             const std::vector<CardLabels>& labels) {
  if (results.size() != labels.size()) {
    throw ConfigError("validation_diagnostics: results/labels size mismatch");
  }
  ValidationDiagnostics d;
  int n_intended = 0, n_selected = 0, n_incorrect = 0, n_base = 0;
  for (size_t i = 0; i < results.size(); ++i) {
    const RankingResult& res = results[i];
    const CardLabels& lab = labels[i];
    const RankedCandidate* best_incorrect = nullptr;
    for (const auto& row : res.rows) {
      if (row.candidate_id == lab.intended_candidate_id) {
        d.intended += row.signature.r_validation;
        ++n_intended;
      }
      if (row.rank == 1) {
        d.selected += row.signature.r_validation;
        ++n_selected;
      }
      if (row.role == Role::incorrect &&
          (best_incorrect == nullptr || row.rank < best_incorrect->rank)) {
        best_incorrect = &row;
      }
      if (row.role == Role::base) {
        d.base += row.signature.r_validation;
        ++n_base;
      }
    }
    if (best_incorrect != nullptr) {
      d.best_incorrect += best_incorrect->signature.r_validation;
      ++n_incorrect;
    }
  }
  if (n_intended > 0) d.intended /= n_intended;
  if (n_selected > 0) d.selected /= n_selected;
  if (n_incorrect > 0) d.best_incorrect /= n_incorrect;
  if (n_base > 0) d.base /= n_base;
  return d;
}

}  // namespace cardbench
