#include "cardbench/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace cardbench {
namespace {

// Signature as a flat 7-vector (cost is deliberately excluded from the
// kernel blocks): R_s, R_o, R_t, R_v, G, C, P.
std::array<double, 7> signature_features(const ObstructionSignature& s) {
  return {s.r_source, s.r_overlap, s.r_target, s.r_validation, s.gluing, s.constraint, s.limit};
}

std::array<double, 7> standardized(const CandidateRow& row, const Standardization& st) {
  const auto f = signature_features(row.signature);
  std::array<double, 7> z{};
  for (int i = 0; i < 7; ++i) z[i] = (f[i] - st.mean[i]) / st.std[i];
  return z;
}

double gaussian(double dist_sq, double sigma) {
  return std::exp(-dist_sq / (2.0 * sigma * sigma));
}

// Solve (K + ridge*I) a = y for symmetric positive semi-definite K.
std::vector<double> ridge_solve(std::vector<std::vector<double>> K, std::vector<double> y,
                                double ridge) {
  const int n = static_cast<int>(y.size());
  for (int i = 0; i < n; ++i) K[i][i] += ridge;
  // Gaussian elimination with partial pivoting.
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::fabs(K[r][col]) > std::fabs(K[pivot][col])) pivot = r;
    }
    std::swap(K[col], K[pivot]);
    std::swap(y[col], y[pivot]);
    const double diag = K[col][col];
    if (std::fabs(diag) < 1e-14) throw ConfigError("kernel system is singular");
    for (int r = col + 1; r < n; ++r) {
      const double factor = K[r][col] / diag;
      if (factor == 0.0) continue;
      for (int c = col; c < n; ++c) K[r][c] -= factor * K[col][c];
      y[r] -= factor * y[col];
    }
  }
  std::vector<double> a(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double sum = y[r];
    for (int c = r + 1; c < n; ++c) sum -= K[r][c] * a[c];
    a[r] = sum / K[r][r];
  }
  return a;
}

// Group test rows per card, rank by descending score, and compute metrics.
BenchmarkMetrics grouped_metrics(const std::vector<CandidateRow>& rows,
                                 const std::vector<double>& scores) {
  std::vector<std::string> card_order;
  std::set<std::string> seen;
  for (const auto& r : rows) {
    if (seen.insert(r.card_id).second) card_order.push_back(r.card_id);
  }
  BenchmarkMetrics m;
  m.n_cards = static_cast<int>(card_order.size());
  if (m.n_cards == 0) return m;
  for (const auto& card_id : card_order) {
    std::vector<int> idx;
    for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
      if (rows[i].card_id == card_id) idx.push_back(i);
    }
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      if (scores[a] != scores[b]) return scores[a] > scores[b];
      return rows[a].candidate_id < rows[b].candidate_id;
    });
    int intended_rank = 0;
    for (int r = 0; r < static_cast<int>(idx.size()); ++r) {
      if (rows[idx[r]].relevant) intended_rank = r + 1;
    }
    if (intended_rank == 1) m.top1 += 1.0;
    if (intended_rank > 0) m.mrr += 1.0 / intended_rank;
    const CandidateRow& top = rows[idx[0]];
    const MoveType required = top.transition_type == TransitionType::extension_required
                                  ? MoveType::extension
                                  : MoveType::deformation;
    if (top.move_type == required) m.type_accuracy += 1.0;
  }
  m.top1 /= m.n_cards;
  m.mrr /= m.n_cards;
  m.type_accuracy /= m.n_cards;
  return m;
}

}  // namespace

std::vector<CandidateRow> make_candidate_rows(const std::vector<RankingResult>& results,
                                              const std::vector<CardLabels>& labels) {
  if (results.size() != labels.size()) {
    throw ConfigError("make_candidate_rows: results/labels size mismatch");
  }
  std::vector<CandidateRow> rows;
  for (size_t i = 0; i < results.size(); ++i) {
    const RankingResult& res = results[i];
    const CardLabels& lab = labels[i];
    if (res.card_id != lab.card_id) throw ConfigError("make_candidate_rows: card id mismatch");
    for (const auto& rc : res.rows) {
      CandidateRow row;
      row.card_id = res.card_id;
      row.family_id = res.family_id;
      row.variant_index = res.variant_index;
      row.candidate_id = rc.candidate_id;
      row.role = rc.role;
      row.move_type = rc.move_type;
      row.signature = rc.signature;
      row.psi = rc.psi;
      row.relevant = rc.candidate_id == lab.intended_candidate_id;
      row.transition_type = lab.transition_type;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

Standardization fit_standardization(const std::vector<CandidateRow>& train_rows) {
  Standardization st;
  st.mean.assign(7, 0.0);
  st.std.assign(7, 1.0);
  if (train_rows.empty()) return st;
  const double n = static_cast<double>(train_rows.size());
  std::vector<double> sum(7, 0.0), sum_sq(7, 0.0);
  for (const auto& row : train_rows) {
    const auto f = signature_features(row.signature);
    for (int i = 0; i < 7; ++i) {
      sum[i] += f[i];
      sum_sq[i] += f[i] * f[i];
    }
  }
  for (int i = 0; i < 7; ++i) {
    st.mean[i] = sum[i] / n;
    const double var = std::max(0.0, sum_sq[i] / n - st.mean[i] * st.mean[i]);
    st.std[i] = std::sqrt(var) > 1e-12 ? std::sqrt(var) : 1.0;
  }
  return st;
}

double kernel(const CandidateRow& a, const CandidateRow& b, const Standardization& st,
              const KernelConfig& cfg) {
  const auto za = standardized(a, st);
  const auto zb = standardized(b, st);

  auto block_dist_sq = [&](int lo, int hi) {
    double d = 0.0;
    for (int i = lo; i < hi; ++i) {
      const double diff = za[i] - zb[i];
      d += diff * diff;
    }
    return d;
  };

  double k = 0.0;
  k += cfg.alpha_residual * gaussian(block_dist_sq(0, 4), cfg.sigma_residual);
  k += cfg.alpha_gluing * gaussian(block_dist_sq(4, 5), cfg.sigma_gluing);
  k += cfg.alpha_constraint * gaussian(block_dist_sq(5, 6), cfg.sigma_constraint);
  k += cfg.alpha_limit * gaussian(block_dist_sq(6, 7), cfg.sigma_limit);

  double dot = 0.0, na = 0.0, nb = 0.0;
  const size_t dim = std::min(a.psi.size(), b.psi.size());
  for (size_t i = 0; i < dim; ++i) dot += a.psi[i] * b.psi[i];
  for (double v : a.psi) na += v * v;
  for (double v : b.psi) nb += v * v;
  k += cfg.alpha_graph * dot / (std::sqrt(na) * std::sqrt(nb) + cfg.graph_epsilon);
  return k;
}

double ScoringModel::score(const CandidateRow& row) const {
  double s = 0.0;
  for (size_t i = 0; i < train_rows.size(); ++i) {
    s += coefficients[i] * kernel(train_rows[i], row, standardization, config);
  }
  return s;
}

ScoringModel fit_scoring_model(const std::vector<CandidateRow>& train_rows,
                               const KernelConfig& cfg) {
  ScoringModel model;
  model.train_rows = train_rows;
  model.config = cfg;
  model.standardization = fit_standardization(train_rows);

  const int n = static_cast<int>(train_rows.size());
  std::vector<std::vector<double>> K(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double k = kernel(train_rows[i], train_rows[j], model.standardization, cfg);
      K[i][j] = k;
      K[j][i] = k;
    }
  }
  std::vector<double> y(n, 0.0);
  for (int i = 0; i < n; ++i) y[i] = train_rows[i].relevant ? 1.0 : 0.0;
  model.coefficients = ridge_solve(std::move(K), std::move(y), cfg.ridge);
  return model;
}

BenchmarkMetrics score_and_evaluate(const ScoringModel& model,
                                    const std::vector<CandidateRow>& test_rows) {
  std::vector<double> scores;
  scores.reserve(test_rows.size());
  for (const auto& row : test_rows) scores.push_back(model.score(row));
  return grouped_metrics(test_rows, scores);
}

double pairwise_preference_accuracy(const ScoringModel& model,
                                    const std::vector<CandidateRow>& test_rows) {
  std::vector<double> scores;
  scores.reserve(test_rows.size());
  for (const auto& row : test_rows) scores.push_back(model.score(row));
  int good = 0, total = 0;
  for (size_t i = 0; i < test_rows.size(); ++i) {
    if (!test_rows[i].relevant) continue;
    for (size_t j = 0; j < test_rows.size(); ++j) {
      if (j == i || test_rows[j].card_id != test_rows[i].card_id || test_rows[j].relevant) {
        continue;
      }
      ++total;
      if (scores[i] > scores[j]) ++good;
    }
  }
  return total > 0 ? static_cast<double>(good) / total : 0.0;
}

namespace {

std::vector<std::string> unique_families(const std::vector<CandidateRow>& rows) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& r : rows) {
    if (seen.insert(r.family_id).second) out.push_back(r.family_id);
  }
  return out;
}

std::vector<int> unique_variants(const std::vector<CandidateRow>& rows) {
  std::set<int> seen;
  for (const auto& r : rows) seen.insert(r.variant_index);
  return std::vector<int>(seen.begin(), seen.end());
}

BenchmarkMetrics pool_metrics(const std::vector<BenchmarkMetrics>& folds) {
  BenchmarkMetrics m;
  for (const auto& f : folds) {
    m.top1 += f.top1 * f.n_cards;
    m.mrr += f.mrr * f.n_cards;
    m.type_accuracy += f.type_accuracy * f.n_cards;
    m.n_cards += f.n_cards;
  }
  if (m.n_cards > 0) {
    m.top1 /= m.n_cards;
    m.mrr /= m.n_cards;
    m.type_accuracy /= m.n_cards;
  }
  return m;
}

template <typename SplitPred>
std::pair<BenchmarkMetrics, double> fold_eval(const std::vector<CandidateRow>& rows,
                                              const KernelConfig& cfg, SplitPred in_test) {
  std::vector<CandidateRow> train, test;
  for (const auto& r : rows) (in_test(r) ? test : train).push_back(r);
  if (train.empty() || test.empty()) return {BenchmarkMetrics{}, 0.0};
  const ScoringModel model = fit_scoring_model(train, cfg);
  return {score_and_evaluate(model, test), pairwise_preference_accuracy(model, test)};
}

}  // namespace

BenchmarkMetrics leave_family_out_eval(const std::vector<CandidateRow>& rows,
                                       const KernelConfig& cfg) {
  std::vector<BenchmarkMetrics> folds;
  for (const auto& family : unique_families(rows)) {
    auto [metrics, pairwise] =
        fold_eval(rows, cfg, [&](const CandidateRow& r) { return r.family_id == family; });
    (void)pairwise;
    folds.push_back(metrics);
  }
  return pool_metrics(folds);
}

std::map<std::string, BenchmarkMetrics> kernel_ablation_suite(const std::vector<CandidateRow>& rows,
                                                              const KernelConfig& cfg) {
  std::map<std::string, BenchmarkMetrics> out;
  auto run = [&](const std::string& name, KernelConfig c) {
    out[name] = leave_family_out_eval(rows, c);
  };
  run("full", cfg);
  {
    KernelConfig c = cfg;
    c.alpha_residual = 0.0;
    run("no_residual", c);
  }
  {
    KernelConfig c = cfg;
    c.alpha_gluing = 0.0;
    run("no_gluing", c);
  }
  {
    KernelConfig c = cfg;
    c.alpha_constraint = 0.0;
    run("no_constraint", c);
  }
  {
    KernelConfig c = cfg;
    c.alpha_limit = 0.0;
    run("no_limit", c);
  }
  {
    KernelConfig c = cfg;
    c.alpha_graph = 0.0;
    run("no_graph", c);
  }
  return out;
}

std::vector<VariantSuiteCell> variant_suite_eval(const std::vector<CandidateRow>& rows,
                                                 const KernelConfig& cfg) {
  struct Fold {
    std::function<bool(const CandidateRow&)> in_test;
    std::function<bool(const CandidateRow&)> in_train;  // defaults to !in_test
  };

  std::vector<VariantSuiteCell> out;
  const auto families = unique_families(rows);
  const auto variants = unique_variants(rows);

  auto run_protocol = [&](const std::string& protocol, const std::vector<Fold>& folds) {
    std::vector<BenchmarkMetrics> fold_metrics;
    double pairwise_sum = 0.0;
    int pairwise_cards = 0;
    for (const auto& fold : folds) {
      std::vector<CandidateRow> train, test;
      for (const auto& r : rows) {
        if (fold.in_test(r)) {
          test.push_back(r);
        } else if (!fold.in_train || fold.in_train(r)) {
          train.push_back(r);
        }
      }
      if (train.empty() || test.empty()) continue;
      const ScoringModel model = fit_scoring_model(train, cfg);
      const BenchmarkMetrics m = score_and_evaluate(model, test);
      fold_metrics.push_back(m);
      pairwise_sum += pairwise_preference_accuracy(model, test) * m.n_cards;
      pairwise_cards += m.n_cards;
    }
    const BenchmarkMetrics pooled = pool_metrics(fold_metrics);
    const double pairwise = pairwise_cards > 0 ? pairwise_sum / pairwise_cards : 0.0;
    out.push_back({protocol, "kernel_ranking", pooled, 0.0});
    VariantSuiteCell pw;
    pw.protocol = protocol;
    pw.scorer = "pairwise_ranking";
    pw.metrics = pooled;
    pw.pairwise = pairwise;
    out.push_back(pw);
  };

  {
    std::vector<Fold> folds;
    for (const auto& family : families) {
      folds.push_back(
          {[family](const CandidateRow& r) { return r.family_id == family; }, nullptr});
    }
    run_protocol("leave_family_out", folds);
  }
  {
    std::vector<Fold> folds;
    for (int v : variants) {
      folds.push_back({[v](const CandidateRow& r) { return r.variant_index == v; }, nullptr});
    }
    run_protocol("leave_variant_out_mixed", folds);
  }
  {
    // Train only on sibling variants within the same family.
    std::vector<Fold> folds;
    for (const auto& family : families) {
      for (int v : variants) {
        folds.push_back({[family, v](const CandidateRow& r) {
                           return r.family_id == family && r.variant_index == v;
                         },
                         [family, v](const CandidateRow& r) {
                           return r.family_id == family && r.variant_index != v;
                         }});
      }
    }
    run_protocol("within_family_heldout", folds);
  }
  return out;
}

}  // namespace cardbench
