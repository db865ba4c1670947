// Acceptance suite: prints one [PASS]/[FAIL] line per criterion and exits
// non-zero if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "cardbench/generator.hpp"
#include "cardbench/kernel.hpp"
#include "cardbench/obstruction.hpp"
#include "cardbench/stress.hpp"

using namespace cardbench;

namespace {

int g_failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %2d. %s%s%s\n", pass ? "PASS" : "FAIL", index, name.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

const RankedCandidate& row_of(const RankingResult& res, const std::string& id) {
  for (const auto& row : res.rows) {
    if (row.candidate_id == id) return row;
  }
  throw std::runtime_error("missing candidate " + id + " on " + res.card_id);
}

double best_score_with(const RankingResult& res, Role role, MoveType move_type) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& row : res.rows) {
    if (row.role == role && row.move_type == move_type) best = std::min(best, row.score);
  }
  return best;
}

// ---- Criterion 10: property suites (compact re-checks). ---------------------

bool property_linearity_and_scaling(std::string* detail) {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    ObstructionSignature a{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
    ObstructionSignature b{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
    ObstructionWeights w;
    w.w_source = u(rng);
    w.w_overlap = u(rng);
    w.w_target = u(rng);
    w.w_gluing = u(rng);
    w.w_constraint = u(rng);
    w.w_limit = u(rng);
    w.lambda_cost = u(rng);
    // Linearity in the signature.
    ObstructionSignature sum{a.r_source + b.r_source, a.r_overlap + b.r_overlap,
                             a.r_target + b.r_target, a.r_validation + b.r_validation,
                             a.gluing + b.gluing,     a.constraint + b.constraint,
                             a.limit + b.limit,       a.cost + b.cost};
    if (std::fabs(obstruction_score(sum, w) -
                  (obstruction_score(a, w) + obstruction_score(b, w))) > 1e-9) {
      *detail = "linearity violated";
      return false;
    }
    // Positive uniform weight scaling preserves the argmin.
    ObstructionWeights scaled = w;
    const double k = 0.1 + u(rng);
    scaled.w_source *= k;
    scaled.w_overlap *= k;
    scaled.w_target *= k;
    scaled.w_gluing *= k;
    scaled.w_constraint *= k;
    scaled.w_limit *= k;
    scaled.lambda_cost *= k;
    const bool order = obstruction_score(a, w) < obstruction_score(b, w);
    const bool order_scaled = obstruction_score(a, scaled) < obstruction_score(b, scaled);
    if (order != order_scaled) {
      *detail = "positive scaling changed the ordering";
      return false;
    }
    // The validation residual never moves the score.
    ObstructionSignature av = a;
    av.r_validation += u(rng) + 1.0;
    if (obstruction_score(av, w) != obstruction_score(a, w)) {
      *detail = "validation residual influenced the score";
      return false;
    }
  }
  return true;
}

bool property_label_stripping(const TransitionCard& card, std::string* detail) {
  TransitionCard mutated = card;
  mutated.transition_type = mutated.transition_type == TransitionType::extension_required
                                ? TransitionType::deformation_sufficient
                                : TransitionType::extension_required;
  for (auto& cand : mutated.candidates) {
    cand.role = cand.role == Role::intended ? Role::deformation : cand.role;
  }
  mutated.intended_candidate_id = mutated.candidates.front().id;
  const RankingResult a = rank_card(strip_labels(card), ObstructionWeights{});
  const RankingResult b = rank_card(strip_labels(mutated), ObstructionWeights{});
  if (a.selected_id != b.selected_id || a.rows.size() != b.rows.size()) {
    *detail = "labels leaked into ranking";
    return false;
  }
  for (size_t i = 0; i < a.rows.size(); ++i) {
    if (a.rows[i].candidate_id != b.rows[i].candidate_id || a.rows[i].score != b.rows[i].score) {
      *detail = "labels leaked into scores";
      return false;
    }
  }
  return true;
}

bool property_zero_param_invariants(std::string* detail) {
  for (const auto& family : builtin_families()) {
    const TransitionCard card = generate_card(family, 42, 0);
    for (const auto& cand : card.candidates) {
      if (cand.role != Role::base) continue;
      const ResolvedModel model = resolve_model(cand.model);
      if (model.free_parameter_count != 0) {
        *detail = "base candidate of " + family.family_id + " has free parameters";
        return false;
      }
      if (gluing_residual(strip_labels(card), cand) != 0.0) {
        *detail = "base gluing non-zero for " + family.family_id;
        return false;
      }
      if (limit_penalty(strip_labels(card), cand, model, FittedChart{}) != 0.0) {
        *detail = "base limit penalty non-zero for " + family.family_id;
        return false;
      }
    }
  }
  return true;
}

bool property_kernel(std::string* detail) {
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  std::vector<CandidateRow> rows;
  for (int c = 0; c < 5; ++c) {
    for (int i = 0; i < 3; ++i) {
      CandidateRow row;
      row.card_id = "p" + std::to_string(c);
      row.candidate_id = "c" + std::to_string(i);
      row.relevant = i == 0;
      row.signature = {u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
      row.psi = {u(rng), u(rng), u(rng)};
      rows.push_back(row);
    }
  }
  const Standardization st = fit_standardization(rows);
  const KernelConfig cfg;
  const int n = static_cast<int>(rows.size());
  std::vector<std::vector<double>> gram(n, std::vector<double>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      gram[i][j] = kernel(rows[i], rows[j], st, cfg);
      if (j < i && std::fabs(gram[i][j] - gram[j][i]) > 1e-12) {
        *detail = "kernel asymmetry";
        return false;
      }
    }
  }
  // PSD floor via a power-iteration estimate of the most negative eigenvalue:
  // shift by the largest eigenvalue bound and check the shifted matrix PSD.
  // Use Gershgorin: every eigenvalue >= min_i (a_ii - sum_{j!=i} |a_ij|) is too
  // loose here, so run a small Jacobi sweep instead.
  std::vector<std::vector<double>> a = gram;
  for (int sweep = 0; sweep < 60; ++sweep) {
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::fabs(a[p][q]) < 1e-15) continue;
        const double theta = 0.5 * std::atan2(2.0 * a[p][q], a[q][q] - a[p][p]);
        const double c = std::cos(theta), s = std::sin(theta);
        for (int k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    if (a[i][i] < -1e-8) {
      *detail = "gram matrix not PSD";
      return false;
    }
  }
  // Standardization leakage: statistics must depend only on the rows given.
  std::vector<CandidateRow> train(rows.begin(), rows.begin() + 9);
  const Standardization st_train = fit_standardization(train);
  std::vector<CandidateRow> mutated_rest(rows.begin() + 9, rows.end());
  for (auto& row : mutated_rest) row.signature.r_target += 100.0;
  const Standardization st_again = fit_standardization(train);
  if (st_train.mean != st_again.mean || st_train.std != st_again.std) {
    *detail = "standardization depends on held-out rows";
    return false;
  }
  const ScoringModel model = fit_scoring_model(train, cfg);
  const ScoringModel model_again = fit_scoring_model(train, cfg);
  if (model.coefficients != model_again.coefficients) {
    *detail = "scoring model not deterministic";
    return false;
  }
  return true;
}

// Brute-force oracle: dense grid over <=1 free parameter per candidate.
bool property_bruteforce_oracle(std::string* detail) {
  TransitionCard card;
  card.card_id = "oracle-00";
  card.family_id = "synthetic";
  card.card_seed = 3;
  card.input_arity = 1;
  card.transition_type = TransitionType::deformation_sufficient;
  auto dataset = [](Context ctx, Interval regime, std::vector<double> xs) {
    ContextDataset ds;
    ds.context = ctx;
    ds.regime = {regime};
    for (double x : xs) ds.records.push_back({{x}, 1.3 * x, ctx});
    return ds;
  };
  card.datasets[0] = dataset(Context::source, {0.0, 1.0}, {0.2, 0.5, 0.8});
  card.datasets[1] = dataset(Context::overlap, {1.0, 2.0}, {1.2, 1.7});
  card.datasets[2] = dataset(Context::target, {2.0, 3.0}, {2.2, 2.6, 2.9});
  card.datasets[3] = dataset(Context::validation, {0.0, 3.0}, {0.5, 2.5});
  auto candidate = [](const std::string& id, Role role, double cost, const std::string& spec) {
    CandidateMove cand;
    cand.id = id;
    cand.role = role;
    cand.move_type = MoveType::deformation;
    cand.cost = cost;
    cand.model.family_id = "synthetic";
    cand.model.spec_id = spec;
    cand.graph.nodes = {{"law", NodeType::law_schema}};
    return cand;
  };
  card.candidates = {candidate("zero", Role::base, 0.0, "zero"),
                     candidate("linear", Role::intended, 0.5, "linear"),
                     candidate("constant", Role::incorrect, 1.5, "constant")};
  card.intended_candidate_id = "linear";
  card.limit.limit_regime = {{0.0, 0.5}};
  card.limit.n_probe = 3;
  card.limit.reference.family_id = "synthetic";
  card.limit.reference.spec_id = "zero";

  const CardView view = strip_labels(card);
  const double scale = card_scale(view);
  const ObstructionWeights w;
  const RankingResult res = rank_card(view, w);

  // Oracle: exhaustive 1e-4-step grid search per fit, all terms recomputed.
  auto grid_fit = [&](const ResolvedModel& model, const std::vector<ObservationRecord>& records)
      -> std::vector<double> {
    if (model.free_parameter_count == 0) return {};
    const Interval b = model.free_bounds[0];
    double best_theta = b.lo, best_loss = std::numeric_limits<double>::infinity();
    const int steps = 20000;
    for (int i = 0; i <= steps; ++i) {
      const double t = b.lo + (b.hi - b.lo) * i / steps;
      double loss = 0.0;
      for (const auto& r : records) {
        const double err = model.eval(&t, r.x.data()) - r.y;
        loss += err * err;
      }
      if (loss < best_loss) {
        best_loss = loss;
        best_theta = t;
      }
    }
    return {best_theta};
  };
  std::string best_id;
  double best_obs = std::numeric_limits<double>::infinity();
  for (const auto& cand : card.candidates) {
    const ResolvedModel model = resolve_model(cand.model);
    auto rmse = [&](const std::vector<double>& theta,
                    const std::vector<ObservationRecord>& records) {
      double sum = 0.0;
      for (const auto& r : records) {
        const double err = model.eval(theta.empty() ? nullptr : theta.data(), r.x.data()) - r.y;
        sum += err * err;
      }
      return std::sqrt(sum / records.size()) / scale;
    };
    std::vector<ObservationRecord> pooled;
    for (int c = 0; c < 3; ++c) {
      for (const auto& r : card.datasets[c].records) pooled.push_back(r);
    }
    const auto theta_g = grid_fit(model, pooled);
    const auto theta_s = grid_fit(model, card.datasets[0].records);
    const auto theta_t = grid_fit(model, card.datasets[2].records);
    double glue = 0.0;
    for (const auto& r : card.datasets[1].records) {
      const double ps = model.eval(theta_s.empty() ? nullptr : theta_s.data(), r.x.data());
      const double pt = model.eval(theta_t.empty() ? nullptr : theta_t.data(), r.x.data());
      glue += (ps - pt) * (ps - pt);
    }
    glue = std::sqrt(glue / card.datasets[1].records.size()) / scale;
    // Limit penalty vs the zero reference on the probe grid.
    double lim = 0.0;
    for (int i = 0; i < card.limit.n_probe; ++i) {
      const double x = 0.0 + 0.5 * i / (card.limit.n_probe - 1);
      const double p = model.eval(theta_g.empty() ? nullptr : theta_g.data(), &x);
      lim += p * p;
    }
    lim = std::sqrt(lim / card.limit.n_probe) / scale;
    const double obs = 1.0 * rmse(theta_g, card.datasets[0].records) +
                       1.0 * rmse(theta_g, card.datasets[1].records) +
                       1.5 * rmse(theta_g, card.datasets[2].records) + 1.5 * glue + 1.5 * lim +
                       0.25 * cand.cost;
    if (obs < best_obs) {
      best_obs = obs;
      best_id = cand.id;
    }
  }
  if (res.selected_id != best_id) {
    *detail = "selected " + res.selected_id + ", oracle " + best_id;
    return false;
  }
  const double gap = std::fabs(row_of(res, best_id).score - best_obs);
  if (gap > 1e-3) {
    *detail = "score gap vs oracle " + fmt(gap);
    return false;
  }
  return true;
}

}  // namespace

int main() {
  const int jobs = std::max(1u, std::thread::hardware_concurrency());
  const ObstructionWeights w;

  // Criterion 1: generate + rank, single-threaded timing.
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<TransitionCard> cards = generate_benchmark(kDefaultMasterSeed);
  std::vector<RankingResult> results;
  std::vector<CardLabels> labels;
  for (const auto& card : cards) {
    results.push_back(rank_card(card, w));
    labels.push_back(card_labels(card));
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const BenchmarkMetrics metrics = benchmark_metrics(results, labels);
  report(1, "default benchmark: type accuracy 1.0, top-1 >= 0.85, < 60 s",
         metrics.type_accuracy == 1.0 && metrics.top1 >= 0.85 && seconds < 60.0,
         "top1=" + fmt(metrics.top1) + " type=" + fmt(metrics.type_accuracy) + " t=" +
             fmt(seconds) + "s");

  // Criterion 2: per-family strict orderings on extension families.
  {
    bool pass = true;
    std::string detail;
    for (size_t i = 0; i < cards.size(); ++i) {
      const RankingResult& res = results[i];
      double intended = 0.0, middle = 0.0, base = 0.0;
      if (res.family_id == "galilean_lorentz") {
        intended = row_of(res, "lorentz").score;
        middle = best_score_with(res, Role::deformation, MoveType::deformation);
        base = row_of(res, "additive").score;
      } else if (res.family_id == "newton_relativistic") {
        intended = row_of(res, "relativistic").score;
        middle = row_of(res, "rational_energy").score;
        base = row_of(res, "newtonian").score;
      } else if (res.family_id == "rj_planck") {
        intended = row_of(res, "planck").score;
        middle = std::min(row_of(res, "rj_linear_repair").score,
                          row_of(res, "rj_quadratic_repair").score);
        base = row_of(res, "rayleigh_jeans").score;
      } else {
        continue;
      }
      if (!(intended < middle && middle < base)) {
        pass = false;
        detail += res.card_id + " ";
      }
    }
    report(2, "extension families: intended < alternative < base on every card", pass,
           pass ? "" : "violated on: " + detail);
  }

  // Criterion 3: deformation families always select a deformation.
  {
    bool pass = true;
    std::string detail;
    for (const auto& res : results) {
      if (res.family_id != "pendulum_finite" && res.family_id != "ideal_virial" &&
          res.family_id != "ohm_temperature") {
        continue;
      }
      if (res.rows.front().move_type != MoveType::deformation) {
        pass = false;
        detail += res.card_id + " ";
      }
    }
    report(3, "deformation families select deformations on every card", pass,
           pass ? "" : "violated on: " + detail);
  }

  // Criterion 4: baseline separation.
  {
    auto eval_baseline = [&](Baseline b) {
      std::vector<RankingResult> reranked;
      for (size_t i = 0; i < results.size(); ++i) {
        reranked.push_back(rerank(
            results[i],
            [&](const ObstructionSignature& sig) { return baseline_score(sig, b, w); },
            labels[i]));
      }
      return benchmark_metrics(reranked, labels);
    };
    const BenchmarkMetrics target_only = eval_baseline(Baseline::target_only);
    const BenchmarkMetrics residual_cost = eval_baseline(Baseline::residual_cost);
    const BenchmarkMetrics residual_gluing = eval_baseline(Baseline::residual_gluing);
    const bool pass = residual_gluing.type_accuracy == 1.0 && metrics.type_accuracy == 1.0 &&
                      target_only.type_accuracy < 1.0 && residual_cost.top1 < metrics.top1;
    report(4, "baseline separation (type accuracy and top-1 directions)", pass,
           "target_only type=" + fmt(target_only.type_accuracy) + " residual_gluing type=" +
               fmt(residual_gluing.type_accuracy) + " residual_cost top1=" +
               fmt(residual_cost.top1) + " full top1=" + fmt(metrics.top1));
  }

  // Criterion 5: stress expansion.
  {
    StressConfig cfg;
    cfg.seed = kDefaultMasterSeed;
    const StressSummary stress = stress_eval(cards, cfg, w, jobs);
    bool matched = false;
    for (const auto& rep : stress.reports) matched |= rep.matched_cost_outranks_intended;
    std::string negatives;
    bool negatives_outside_virial = false;
    for (const auto& rep : stress.reports) {
      if (rep.margin < 0.0) {
        negatives += rep.card_id + "(margin=" + fmt(rep.margin) + ") ";
        if (rep.family_id != "ideal_virial") negatives_outside_virial = true;
      }
    }
    const bool pass = !matched && stress.metrics.top1 >= 0.80;
    std::string detail = "top1=" + fmt(stress.metrics.top1);
    if (!negatives.empty()) {
      detail += negatives_outside_virial ? "; negative margins reported for review: "
                                         : "; negative margins (virial): ";
      detail += negatives;
    }
    report(5, "stress: no matched-cost win on extension cards, top-1 >= 0.80", pass, detail);
  }

  // Criterion 6: weight sensitivity.
  {
    const auto cells = weight_sensitivity(results, labels, w);
    bool stable = true;
    std::string detail;
    for (const auto& cell : cells) {
      if (cell.block == "cost" || cell.multiplier < 0.5 || cell.multiplier > 2.0) continue;
      if (std::fabs(cell.metrics.top1 - metrics.top1) > 0.1 || cell.n_selection_changes > 3) {
        stable = false;
        detail += cell.block + "x" + fmt(cell.multiplier) + " ";
      }
    }
    bool cost_flips_extension = false;
    for (const auto& cell : cells) {
      if (cell.block != "cost" || cell.multiplier < 8.0) continue;
      if (cell.metrics.top1 >= metrics.top1) continue;
      ObstructionWeights scaled = w;
      scaled.lambda_cost *= cell.multiplier;
      for (size_t i = 0; i < results.size(); ++i) {
        if (labels[i].transition_type != TransitionType::extension_required) continue;
        const RankingResult reranked = rerank(
            results[i],
            [&](const ObstructionSignature& sig) { return obstruction_score(sig, scaled); },
            labels[i]);
        if (reranked.selected_id != results[i].selected_id) cost_flips_extension = true;
      }
    }
    report(6, "sensitivity: stable in [0.5,2], cost multiplier >= 8 flips extensions",
           stable && cost_flips_extension,
           stable ? (cost_flips_extension ? "" : "no extension-required flip at cost x8")
                  : "unstable blocks: " + detail);
  }

  // Criterion 7: robustness trend.
  {
    RobustnessGrid grid;
    grid.seed = kDefaultMasterSeed;
    const auto cells = robustness_sweep(cards, grid, w, jobs);
    double clean = 0.0, noisy = 0.0, q06 = 0.0;
    int n_clean = 0, n_noisy = 0;
    const double max_noise =
        *std::max_element(grid.noise_levels.begin(), grid.noise_levels.end());
    for (const auto& cell : cells) {
      if (cell.noise == 0.0) {
        clean += cell.metrics.top1;
        ++n_clean;
        if (cell.subsample == 0.6) q06 = cell.metrics.top1;
      }
      if (cell.noise == max_noise) {
        noisy += cell.metrics.top1;
        ++n_noisy;
      }
    }
    clean /= n_clean;
    noisy /= n_noisy;
    const bool pass = noisy < clean && std::fabs(q06 - metrics.top1) <= 0.1;
    report(7, "robustness: high noise degrades top-1; q=0.6 within 0.1 of clean", pass,
           "clean=" + fmt(clean) + " noisy=" + fmt(noisy) + " q0.6=" + fmt(q06));
  }

  // Criterion 8: validation-residual ordering.
  {
    const ValidationDiagnostics d = validation_diagnostics(results, labels);
    const bool pass =
        d.intended <= d.selected && d.selected < d.best_incorrect && d.best_incorrect < d.base;
    report(8, "validation residuals: intended <= selected < best incorrect < base", pass,
           fmt(d.intended) + " <= " + fmt(d.selected) + " < " + fmt(d.best_incorrect) + " < " +
               fmt(d.base));
  }

  // Criterion 9: kernel probe.
  {
    const auto rows = make_candidate_rows(results, labels);
    const KernelConfig cfg;
    const BenchmarkMetrics lofo = leave_family_out_eval(rows, cfg);
    double random_top1 = 0.0;
    for (const auto& card : cards) random_top1 += 1.0 / card.candidates.size();
    random_top1 /= cards.size();
    double within_top1 = 0.0;
    for (const auto& cell : variant_suite_eval(rows, cfg)) {
      if (cell.protocol == "within_family_heldout" && cell.scorer == "kernel_ranking") {
        within_top1 = cell.metrics.top1;
      }
    }
    const auto ablations = kernel_ablation_suite(rows, cfg);
    const BenchmarkMetrics& full = ablations.at("full");
    const BenchmarkMetrics& no_gluing = ablations.at("no_gluing");
    const bool gluing_matters =
        !(no_gluing.top1 > full.top1 && no_gluing.type_accuracy > full.type_accuracy);
    const bool pass = lofo.top1 > random_top1 && within_top1 >= 0.9 && gluing_matters;
    report(9, "kernel: transfer beats random, within-family >= 0.9, gluing block matters", pass,
           "lofo=" + fmt(lofo.top1) + " random=" + fmt(random_top1) + " within=" +
               fmt(within_top1) + " no_gluing=" + fmt(no_gluing.top1) + "/" +
               fmt(no_gluing.type_accuracy));
  }

  // Criterion 10: property suites.
  {
    std::string detail;
    bool pass = property_linearity_and_scaling(&detail);
    if (pass) pass = property_label_stripping(cards.front(), &detail);
    if (pass) pass = property_zero_param_invariants(&detail);
    if (pass) pass = property_kernel(&detail);
    if (pass) pass = property_bruteforce_oracle(&detail);
    report(10, "property suites (linearity, stripping, invariants, kernel, oracle)", pass,
           detail);
  }

  // Criterion 11: worked obstruction arithmetic.
  {
    ObstructionSignature sig;
    sig.r_source = 0.1;
    sig.r_overlap = 0.1;
    sig.r_target = 0.2;
    sig.gluing = 0.1;
    sig.constraint = 0.0;
    sig.limit = 0.0;
    sig.cost = 1.6;
    const double obs = obstruction_score(sig, ObstructionWeights{});
    report(11, "worked signature scores exactly 1.05 under reference weights",
           std::fabs(obs - 1.05) < 1e-12, "obs=" + fmt(obs));
  }

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
