#include "cardbench/obstruction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cardbench/graph_features.hpp"
#include "cardbench/rng.hpp"

namespace cardbench {

double obstruction_score(const ObstructionSignature& sig, const ObstructionWeights& w) {
  return w.w_source * sig.r_source + w.w_overlap * sig.r_overlap + w.w_target * sig.r_target +
         w.w_gluing * sig.gluing + w.w_constraint * sig.constraint + w.w_limit * sig.limit +
         w.lambda_cost * sig.cost;
}

double card_scale(const CardView& card) {
  double sum = 0.0, sum_sq = 0.0, max_abs = 0.0;
  std::size_t n = 0;
  for (Context c : {Context::source, Context::overlap, Context::target}) {
    for (const auto& r : card.dataset(c).records) {
      sum += r.y;
      sum_sq += r.y * r.y;
      max_abs = std::max(max_abs, std::fabs(r.y));
      ++n;
    }
  }
  if (n == 0) return 1.0;
  const double mean = sum / static_cast<double>(n);
  const double var = std::max(0.0, sum_sq / static_cast<double>(n) - mean * mean);
  const double std_dev = std::sqrt(var);
  if (std_dev >= 1e-12) return std_dev;
  return max_abs >= 1e-12 ? max_abs : 1.0;
}

namespace {

FitOptions with_scale(const FitOptions& options, double scale) {
  FitOptions o = options;
  o.scale = scale;
  return o;
}

// RMSE between two prediction vectors over the overlap inputs, normalized by
// scale and saturated; invalid predictions contribute the saturated error.
double prediction_gap(const ResolvedModel& model, const FittedChart& a, const FittedChart& b,
                      const std::vector<ObservationRecord>& overlap, double scale) {
  if (overlap.empty()) return 0.0;
  const double sat_sq = (kSaturation * scale) * (kSaturation * scale);
  double sum = 0.0;
  for (const auto& r : overlap) {
    const double pa = model.eval(a.theta.data(), r.x.data());
    const double pb = model.eval(b.theta.data(), r.x.data());
    if (std::isnan(pa) || std::isinf(pa) || std::isnan(pb) || std::isinf(pb)) {
      sum += sat_sq;
    } else {
      const double diff = pa - pb;
      sum += std::min(diff * diff, sat_sq);
    }
  }
  const double rmse = std::sqrt(sum / static_cast<double>(overlap.size()));
  return std::min(rmse / scale, kSaturation);
}

// Deterministic stratified probe points (Latin-hypercube style) in a regime.
std::vector<std::vector<double>> stratified_probes(const Regime& regime, int n,
                                                   std::uint64_t seed) {
  const int arity = static_cast<int>(regime.size());
  std::vector<std::vector<double>> probes(n, std::vector<double>(arity, 0.0));
  auto rng = make_rng(seed);
  for (int d = 0; d < arity; ++d) {
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::uniform_real_distribution<double> jitter(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
      const double u = (perm[i] + jitter(rng)) / static_cast<double>(n);
      probes[i][d] = regime[d].lo + regime[d].width() * u;
    }
  }
  return probes;
}

// Regular grid of approximately n points over a regime (exactly n on one
// axis; round(n^(1/arity)) per axis otherwise).
std::vector<std::vector<double>> regular_grid(const Regime& regime, int n) {
  const int arity = static_cast<int>(regime.size());
  std::vector<std::vector<double>> probes;
  if (arity == 1) {
    for (int i = 0; i < n; ++i) {
      const double u = n == 1 ? 0.5 : static_cast<double>(i) / (n - 1);
      probes.push_back({regime[0].lo + regime[0].width() * u});
    }
    return probes;
  }
  const int per_axis = std::max(2, static_cast<int>(std::llround(
                                       std::pow(static_cast<double>(n), 1.0 / arity))));
  std::vector<int> counter(arity, 0);
  while (true) {
    std::vector<double> p(arity);
    for (int d = 0; d < arity; ++d) {
      const double u = static_cast<double>(counter[d]) / (per_axis - 1);
      p[d] = regime[d].lo + regime[d].width() * u;
    }
    probes.push_back(std::move(p));
    int d = 0;
    while (d < arity && ++counter[d] == per_axis) {
      counter[d] = 0;
      ++d;
    }
    if (d == arity) break;
  }
  return probes;
}

// Bounding box of the regimes of the contexts a constraint applies in.
Regime applies_in_regime(const CardView& card, const ConstraintSpec& cs) {
  Regime out;
  bool first = true;
  for (Context c : cs.applies_in) {
    const Regime& r = card.dataset(c).regime;
    if (first) {
      out = r;
      first = false;
      continue;
    }
    for (size_t d = 0; d < out.size(); ++d) {
      out[d].lo = std::min(out[d].lo, r[d].lo);
      out[d].hi = std::max(out[d].hi, r[d].hi);
    }
  }
  return out;
}

constexpr int kConstraintProbes = 64;

// Normalized violation of one constraint spec for the global chart.
double one_constraint_violation(const CardView& card, const ConstraintSpec& cs,
                                const ResolvedModel& model, const FittedChart& chart,
                                double scale) {
  const Regime regime = applies_in_regime(card, cs);
  if (regime.empty()) return 0.0;
  const std::uint64_t seed = derive_seed(card.card_seed, "constraint-probes:" + cs.id);

  auto eval_at = [&](const std::vector<double>& x) {
    return model.eval(chart.theta.data(), x.data());
  };

  double value = 0.0;
  switch (cs.kind) {
    case ConstraintKind::upper_bound:
    case ConstraintKind::lower_bound: {
      const double bound = cs.parameters.at("bound");
      const auto probes = stratified_probes(regime, kConstraintProbes, seed);
      double sum = 0.0;
      for (const auto& p : probes) {
        const double y = eval_at(p);
        if (std::isnan(y) || std::isinf(y)) {
          sum += kSaturation * scale;
        } else if (cs.kind == ConstraintKind::upper_bound) {
          sum += std::max(0.0, y - bound);
        } else {
          sum += std::max(0.0, bound - y);
        }
      }
      value = sum / static_cast<double>(probes.size()) / scale;
      break;
    }
    case ConstraintKind::monotonic_increasing:
    case ConstraintKind::monotonic_decreasing: {
      // 1-D sweep along the constrained axis with the remaining inputs held
      // at the regime midpoint; mean wrong-direction increment, normalized.
      const int axis = static_cast<int>(cs.parameters.at("axis"));
      std::vector<double> base(regime.size());
      for (size_t d = 0; d < regime.size(); ++d) base[d] = regime[d].mid();
      double sum = 0.0;
      int pairs = 0;
      double prev = 0.0;
      bool prev_ok = false;
      for (int i = 0; i < kConstraintProbes; ++i) {
        std::vector<double> p = base;
        p[axis] = regime[axis].lo +
                  regime[axis].width() * static_cast<double>(i) / (kConstraintProbes - 1);
        const double y = eval_at(p);
        const bool ok = !(std::isnan(y) || std::isinf(y));
        if (ok && prev_ok) {
          const double delta = y - prev;
          const double wrong = cs.kind == ConstraintKind::monotonic_increasing
                                   ? std::max(0.0, -delta)
                                   : std::max(0.0, delta);
          sum += wrong;
          ++pairs;
        } else if (!ok) {
          sum += kSaturation * scale;
          ++pairs;
        }
        prev = y;
        prev_ok = ok;
      }
      value = pairs > 0 ? sum / pairs / scale : 0.0;
      break;
    }
    case ConstraintKind::finiteness: {
      const auto probes = stratified_probes(regime, kConstraintProbes, seed);
      int bad = 0;
      for (const auto& p : probes) {
        const double y = eval_at(p);
        if (std::isnan(y) || std::isinf(y)) ++bad;
      }
      value = kSaturation * static_cast<double>(bad) / static_cast<double>(probes.size());
      break;
    }
    case ConstraintKind::sign: {
      const double sign = cs.parameters.at("sign");
      const auto probes = stratified_probes(regime, kConstraintProbes, seed);
      double sum = 0.0;
      for (const auto& p : probes) {
        const double y = eval_at(p);
        if (std::isnan(y) || std::isinf(y)) {
          sum += kSaturation * scale;
        } else if (y * sign < 0.0) {
          sum += std::fabs(y);
        }
      }
      value = sum / static_cast<double>(probes.size()) / scale;
      break;
    }
  }
  return std::min(value, kSaturation);
}

}  // namespace

double gluing_residual(const CardView& card, const CandidateMove& candidate,
                       const FitOptions& options) {
  const ResolvedModel model = resolve_model(candidate.model);
  if (model.free_parameter_count == 0) return 0.0;
  const double scale = card_scale(card);
  const FitOptions scaled = with_scale(options, scale);
  const FittedChart chart_s = fit(model, card.dataset(Context::source).records, scaled);
  const FittedChart chart_t = fit(model, card.dataset(Context::target).records, scaled);
  return prediction_gap(model, chart_s, chart_t, card.dataset(Context::overlap).records, scale);
}

double constraint_violation(const CardView& card, const CandidateMove& /*candidate*/,
                            const ResolvedModel& model, const FittedChart& global_chart) {
  if (card.constraints.empty()) return 0.0;
  const double scale = card_scale(card);
  double sum = 0.0;
  for (const auto& cs : card.constraints) {
    sum += one_constraint_violation(card, cs, model, global_chart, scale);
  }
  return std::min(sum / static_cast<double>(card.constraints.size()), kSaturation);
}

double limit_penalty(const CardView& card, const CandidateMove& /*candidate*/,
                     const ResolvedModel& model, const FittedChart& global_chart) {
  const double scale = card_scale(card);
  const ResolvedModel reference = resolve_model(card.limit.reference);
  if (reference.free_parameter_count > 0) {
    throw ConfigError("limit reference must have canonical (frozen) parameters");
  }
  const auto probes = regular_grid(card.limit.limit_regime, card.limit.n_probe);
  if (probes.empty()) return 0.0;
  const double sat_sq = (kSaturation * scale) * (kSaturation * scale);
  double sum = 0.0;
  for (const auto& p : probes) {
    const double y_cand = model.eval(global_chart.theta.data(), p.data());
    const double y_ref = reference.eval(nullptr, p.data());
    if (std::isnan(y_cand) || std::isinf(y_cand) || std::isnan(y_ref) || std::isinf(y_ref)) {
      sum += sat_sq;
    } else {
      const double diff = y_cand - y_ref;
      sum += std::min(diff * diff, sat_sq);
    }
  }
  const double rmse = std::sqrt(sum / static_cast<double>(probes.size()));
  return std::min(rmse / scale, kSaturation);
}

ObstructionSignature candidate_signature(const CardView& card, const CandidateMove& candidate,
                                         double scale, const FitOptions& options) {
  const ResolvedModel model = resolve_model(candidate.model);
  const FitOptions scaled = with_scale(options, scale);

  // Global chart on the pooled source+overlap+target records.
  std::vector<ObservationRecord> pooled;
  for (Context c : {Context::source, Context::overlap, Context::target}) {
    const auto& recs = card.dataset(c).records;
    pooled.insert(pooled.end(), recs.begin(), recs.end());
  }
  const FittedChart global_chart = fit(model, pooled, scaled);

  ObstructionSignature sig;
  sig.r_source = nrmse(model, global_chart.theta, card.dataset(Context::source).records, scale);
  sig.r_overlap = nrmse(model, global_chart.theta, card.dataset(Context::overlap).records, scale);
  sig.r_target = nrmse(model, global_chart.theta, card.dataset(Context::target).records, scale);
  sig.r_validation =
      nrmse(model, global_chart.theta, card.dataset(Context::validation).records, scale);

  if (model.free_parameter_count == 0) {
    sig.gluing = 0.0;
  } else {
    const FittedChart chart_s = fit(model, card.dataset(Context::source).records, scaled);
    const FittedChart chart_t = fit(model, card.dataset(Context::target).records, scaled);
    sig.gluing =
        prediction_gap(model, chart_s, chart_t, card.dataset(Context::overlap).records, scale);
  }

  sig.constraint = constraint_violation(card, candidate, model, global_chart);
  sig.limit = limit_penalty(card, candidate, model, global_chart);
  sig.cost = candidate.cost;
  return sig;
}

RankingResult rank_card(const CardView& card, const ObstructionWeights& w,
                        const FitOptions& options) {
  RankingResult result;
  result.card_id = card.card_id;
  result.family_id = card.family_id;
  result.scale = card_scale(card);

  for (const auto& cand : card.candidates) {
    RankedCandidate row;
    row.candidate_id = cand.id;
    row.role = cand.role;
    row.move_type = cand.move_type;
    row.signature = candidate_signature(card, cand, result.scale, options);
    row.score = obstruction_score(row.signature, w);
    row.psi = graph_features(cand.graph);
    result.rows.push_back(std::move(row));
  }

  std::sort(result.rows.begin(), result.rows.end(),
            [](const RankedCandidate& a, const RankedCandidate& b) {
              if (a.score != b.score) return a.score < b.score;
              if (a.signature.cost != b.signature.cost) return a.signature.cost < b.signature.cost;
              return a.candidate_id < b.candidate_id;
            });
  for (size_t i = 0; i < result.rows.size(); ++i) result.rows[i].rank = static_cast<int>(i) + 1;
  if (!result.rows.empty()) result.selected_id = result.rows.front().candidate_id;
  return result;
}

CardLabels card_labels(const TransitionCard& card) {
  return CardLabels{card.card_id, card.intended_candidate_id, card.transition_type};
}

void apply_labels(RankingResult& result, const CardLabels& labels) {
  result.intended_rank = 0;
  double intended_score = 0.0;
  double best_other = std::numeric_limits<double>::infinity();
  for (const auto& row : result.rows) {
    if (row.candidate_id == labels.intended_candidate_id) {
      result.intended_rank = row.rank;
      intended_score = row.score;
    } else {
      best_other = std::min(best_other, row.score);
    }
  }
  result.margin = result.intended_rank > 0 && std::isfinite(best_other)
                      ? best_other - intended_score
                      : 0.0;
}

RankingResult rank_card(const TransitionCard& card, const ObstructionWeights& w,
                        const FitOptions& options) {
  RankingResult result = rank_card(strip_labels(card), w, options);
  result.variant_index = card.variant_index;
  apply_labels(result, card_labels(card));
  return result;
}

BenchmarkMetrics benchmark_metrics(const std::vector<RankingResult>& results,
                                   const std::vector<CardLabels>& labels) {
  if (results.size() != labels.size()) {
    throw ConfigError("benchmark_metrics: results/labels size mismatch");
  }
  BenchmarkMetrics m;
  m.n_cards = static_cast<int>(results.size());
  if (m.n_cards == 0) return m;
  for (size_t i = 0; i < results.size(); ++i) {
    const RankingResult& r = results[i];
    const CardLabels& l = labels[i];
    if (r.card_id != l.card_id) throw ConfigError("benchmark_metrics: card id mismatch");
    int intended_rank = 0;
    MoveType selected_type = MoveType::deformation;
    for (const auto& row : r.rows) {
      if (row.candidate_id == l.intended_candidate_id) intended_rank = row.rank;
      if (row.rank == 1) selected_type = row.move_type;
    }
    if (intended_rank == 1) m.top1 += 1.0;
    if (intended_rank > 0) m.mrr += 1.0 / intended_rank;
    const MoveType required = l.transition_type == TransitionType::extension_required
                                  ? MoveType::extension
                                  : MoveType::deformation;
    if (selected_type == required) m.type_accuracy += 1.0;
  }
  m.top1 /= m.n_cards;
  m.mrr /= m.n_cards;
  m.type_accuracy /= m.n_cards;
  return m;
}

const std::vector<Baseline>& all_baselines() {
  static const std::vector<Baseline> kAll = {
      Baseline::target_only,   Baseline::source_target, Baseline::source_overlap_target,
      Baseline::residual_cost, Baseline::residual_gluing, Baseline::full_obstruction};
  return kAll;
}

const std::string& to_string(Baseline b) {
  static const std::vector<std::string> kNames = {
      "target_only",   "source_target",   "source_overlap_target",
      "residual_cost", "residual_gluing", "full_obstruction"};
  return kNames[static_cast<int>(b)];
}

Baseline baseline_from_string(const std::string& s) {
  for (Baseline b : all_baselines()) {
    if (to_string(b) == s) return b;
  }
  throw ConfigError("unknown baseline '" + s + "'");
}

double baseline_score(const ObstructionSignature& sig, Baseline b, const ObstructionWeights& w) {
  switch (b) {
    case Baseline::target_only:
      return sig.r_target;
    case Baseline::source_target:
      return w.w_source * sig.r_source + w.w_target * sig.r_target;
    case Baseline::source_overlap_target:
      return w.w_source * sig.r_source + w.w_overlap * sig.r_overlap +
             w.w_target * sig.r_target;
    case Baseline::residual_cost:
      return w.w_source * sig.r_source + w.w_overlap * sig.r_overlap +
             w.w_target * sig.r_target + w.lambda_cost * sig.cost;
    case Baseline::residual_gluing:
      return w.w_source * sig.r_source + w.w_overlap * sig.r_overlap +
             w.w_target * sig.r_target + w.w_gluing * sig.gluing;
    case Baseline::full_obstruction:
      return obstruction_score(sig, w);
  }
  throw ConfigError("unknown baseline");
}

RankingResult rerank(const RankingResult& result,
                     const std::function<double(const ObstructionSignature&)>& scorer,
                     const CardLabels& labels) {
  RankingResult out = result;
  for (auto& row : out.rows) row.score = scorer(row.signature);
  std::sort(out.rows.begin(), out.rows.end(),
            [](const RankedCandidate& a, const RankedCandidate& b) {
              if (a.score != b.score) return a.score < b.score;
              if (a.signature.cost != b.signature.cost) return a.signature.cost < b.signature.cost;
              return a.candidate_id < b.candidate_id;
            });
  for (size_t i = 0; i < out.rows.size(); ++i) out.rows[i].rank = static_cast<int>(i) + 1;
  if (!out.rows.empty()) out.selected_id = out.rows.front().candidate_id;
  apply_labels(out, labels);
  return out;
}

const std::vector<std::string>& ablation_terms() {
  static const std::vector<std::string> kTerms = {"source",      "overlap", "target", "gluing",
                                                  "constraints", "limit",   "cost"};
  return kTerms;
}

ObstructionWeights ablated_weights(const ObstructionWeights& w, const std::string& term) {
  ObstructionWeights out = w;
  if (term == "source") {
    out.w_source = 0.0;
  } else if (term == "overlap") {
    out.w_overlap = 0.0;
  } else if (term == "target") {
    out.w_target = 0.0;
  } else if (term == "gluing") {
    out.w_gluing = 0.0;
  } else if (term == "constraints") {
    out.w_constraint = 0.0;
  } else if (term == "limit") {
    out.w_limit = 0.0;
  } else if (term == "cost") {
    out.lambda_cost = 0.0;
  } else {
    throw ConfigError("unknown ablation term '" + term + "'");
  }
  return out;
}

}  // namespace cardbench
