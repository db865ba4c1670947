// Command-line driver: benchmark generation, obstruction ranking, baseline and
// ablation comparisons, stress/sensitivity/robustness sweeps, the kernel
// probe, and an aggregate report over previously written artifacts.
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cardbench/card_io.hpp"
#include "cardbench/generator.hpp"
#include "cardbench/kernel.hpp"
#include "cardbench/obstruction.hpp"
#include "cardbench/rng.hpp"
#include "cardbench/stress.hpp"

namespace cardbench {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

struct CommonOptions {
  std::string benchmark_dir;
  std::string weights_path;
  std::string out_dir;
  std::uint64_t seed = kDefaultMasterSeed;
  int jobs = 1;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

ObstructionWeights load_weights(const std::string& path) {
  ObstructionWeights w;
  if (path.empty()) return w;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open weights file '" + path + "'");
  ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("weights file '" + path + "' is not valid JSON: " + e.what());
  }
  auto get = [&](const char* key, double& slot) {
    if (j.contains(key)) {
      if (!j[key].is_number()) throw ConfigError(std::string("weight '") + key + "' must be a number");
      slot = j[key].get<double>();
    }
  };
  get("w_source", w.w_source);
  get("w_overlap", w.w_overlap);
  get("w_target", w.w_target);
  get("w_gluing", w.w_gluing);
  get("w_constraint", w.w_constraint);
  get("w_limit", w.w_limit);
  get("lambda_cost", w.lambda_cost);
  return w;
}

ordered_json weights_json(const ObstructionWeights& w) {
  ordered_json j;
  j["w_source"] = w.w_source;
  j["w_overlap"] = w.w_overlap;
  j["w_target"] = w.w_target;
  j["w_gluing"] = w.w_gluing;
  j["w_constraint"] = w.w_constraint;
  j["w_limit"] = w.w_limit;
  j["lambda_cost"] = w.lambda_cost;
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
}

// Writes <out_dir>/<stem>_summary.json with the run configuration, its FNV-1a
// hash, and command-specific payload fields.
void write_summary(const CommonOptions& opt, const std::string& stem, ordered_json config,
                   ordered_json payload) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = stem;
  j["seed"] = opt.seed;
  j["config"] = config;
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(fnv1a(config.dump())));
  j["config_hash"] = hash;
  for (auto& [key, value] : payload.items()) j[key] = value;
  const std::string text = j.dump(2) + "\n";
  if (!opt.out_dir.empty()) {
    write_text((fs::path(opt.out_dir) / (stem + "_summary.json")).string(), text);
  }
  std::cout << text;
}

void write_table(const CommonOptions& opt, const std::string& stem,
                 const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  for (size_t i = 0; i < header.size(); ++i) out << (i ? "\t" : "") << header[i];
  out << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "\t" : "") << row[i];
    out << "\n";
  }
  if (!opt.out_dir.empty()) {
    write_text((fs::path(opt.out_dir) / (stem + ".tsv")).string(), out.str());
  } else {
    std::cout << out.str();
  }
}

std::vector<TransitionCard> load_benchmark(const CommonOptions& opt) {
  if (opt.benchmark_dir.empty()) throw ConfigError("--benchmark is required for this command");
  return read_benchmark_dir(opt.benchmark_dir);
}

std::vector<RankingResult> rank_all(const std::vector<TransitionCard>& cards,
                                    const ObstructionWeights& w, int jobs) {
  const int n = static_cast<int>(cards.size());
  std::vector<RankingResult> results(n);
  if (jobs <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) results[i] = rank_card(cards[i], w);
    return results;
  }
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      results[i] = rank_card(cards[i], w);
    }
  };
  std::vector<std::future<void>> tasks;
  for (int t = 0; t < std::min(jobs, n); ++t) {
    tasks.push_back(std::async(std::launch::async, worker));
  }
  for (auto& t : tasks) t.get();
  return results;
}

std::vector<CardLabels> labels_of(const std::vector<TransitionCard>& cards) {
  std::vector<CardLabels> labels;
  for (const auto& card : cards) labels.push_back(card_labels(card));
  return labels;
}

ordered_json metrics_json(const BenchmarkMetrics& m) {
  ordered_json j;
  j["top1"] = m.top1;
  j["mrr"] = m.mrr;
  j["type_accuracy"] = m.type_accuracy;
  j["n_cards"] = m.n_cards;
  return j;
}

int cmd_generate(const CommonOptions& opt, int variants) {
  if (opt.out_dir.empty()) throw ConfigError("generate: --out is required");
  const auto cards = generate_benchmark(opt.seed, variants);
  write_benchmark_dir(cards, opt.seed, opt.out_dir);
  ordered_json config;
  config["variants_per_family"] = variants;
  ordered_json payload;
  payload["n_cards"] = cards.size();
  payload["benchmark_dir"] = opt.out_dir;
  CommonOptions summary_opt = opt;
  write_summary(summary_opt, "generate", config, payload);
  return 0;
}

int cmd_rank(const CommonOptions& opt) {
  const auto cards = load_benchmark(opt);
  const ObstructionWeights w = load_weights(opt.weights_path);
  const auto results = rank_all(cards, w, opt.jobs);
  const auto labels = labels_of(cards);

  std::vector<std::vector<std::string>> rows;
  for (const auto& res : results) {
    for (const auto& cand : res.rows) {
      std::string psi;
      for (size_t i = 0; i < cand.psi.size(); ++i) {
        psi += (i ? "," : "") + fmt(cand.psi[i]);
      }
      rows.push_back({res.card_id, res.family_id, std::to_string(res.variant_index),
                      cand.candidate_id, to_string(cand.role), to_string(cand.move_type),
                      std::to_string(cand.rank), fmt(cand.score), fmt(cand.signature.r_source),
                      fmt(cand.signature.r_overlap), fmt(cand.signature.r_target),
                      fmt(cand.signature.r_validation), fmt(cand.signature.gluing),
                      fmt(cand.signature.constraint), fmt(cand.signature.limit),
                      fmt(cand.signature.cost), psi});
    }
  }
  write_table(opt, "rank",
              {"card_id", "family_id", "variant", "candidate_id", "role", "move_type", "rank",
               "score", "r_source", "r_overlap", "r_target", "r_validation", "gluing",
               "constraint", "limit", "cost", "psi"},
              rows);

  const BenchmarkMetrics m = benchmark_metrics(results, labels);
  const ValidationDiagnostics diag = validation_diagnostics(results, labels);
  ordered_json config;
  config["weights"] = weights_json(w);
  ordered_json payload;
  payload["metrics"] = metrics_json(m);
  ordered_json vj;
  vj["intended"] = diag.intended;
  vj["selected"] = diag.selected;
  vj["best_incorrect"] = diag.best_incorrect;
  vj["base"] = diag.base;
  payload["validation_residuals"] = vj;
  write_summary(opt, "rank", config, payload);
  return 0;
}

int cmd_baselines(const CommonOptions& opt) {
  const auto cards = load_benchmark(opt);
  const ObstructionWeights w = load_weights(opt.weights_path);
  const auto results = rank_all(cards, w, opt.jobs);
  const auto labels = labels_of(cards);

  std::vector<std::vector<std::string>> rows;
  ordered_json payload_metrics;
  for (Baseline b : all_baselines()) {
    std::vector<RankingResult> reranked;
    for (size_t i = 0; i < results.size(); ++i) {
      reranked.push_back(rerank(
          results[i],
          [&](const ObstructionSignature& sig) { return baseline_score(sig, b, w); }, labels[i]));
    }
    const BenchmarkMetrics m = benchmark_metrics(reranked, labels);
    rows.push_back({to_string(b), fmt(m.top1), fmt(m.mrr), fmt(m.type_accuracy),
                    std::to_string(m.n_cards)});
    payload_metrics[to_string(b)] = metrics_json(m);
  }
  write_table(opt, "baselines", {"baseline", "top1", "mrr", "type_accuracy", "n_cards"}, rows);
  ordered_json config;
  config["weights"] = weights_json(w);
  ordered_json payload;
  payload["baselines"] = payload_metrics;
  write_summary(opt, "baselines", config, payload);
  return 0;
}

int cmd_ablate(const CommonOptions& opt) {
  const auto cards = load_benchmark(opt);
  const ObstructionWeights w = load_weights(opt.weights_path);
  const auto results = rank_all(cards, w, opt.jobs);
  const auto labels = labels_of(cards);

  std::vector<std::vector<std::string>> rows;
  ordered_json payload_metrics;
  auto eval_weights = [&](const std::string& name, const ObstructionWeights& weights) {
    std::vector<RankingResult> reranked;
    for (size_t i = 0; i < results.size(); ++i) {
      reranked.push_back(rerank(
          results[i],
          [&](const ObstructionSignature& sig) { return obstruction_score(sig, weights); },
          labels[i]));
    }
    const BenchmarkMetrics m = benchmark_metrics(reranked, labels);
    rows.push_back(
        {name, fmt(m.top1), fmt(m.mrr), fmt(m.type_accuracy), std::to_string(m.n_cards)});
    payload_metrics[name] = metrics_json(m);
  };
  eval_weights("full", w);
  for (const auto& term : ablation_terms()) {
    eval_weights("no_" + term, ablated_weights(w, term));
  }
  write_table(opt, "ablate", {"setting", "top1", "mrr", "type_accuracy", "n_cards"}, rows);
  ordered_json config;
  config["weights"] = weights_json(w);
  ordered_json payload;
  payload["ablations"] = payload_metrics;
  write_summary(opt, "ablate", config, payload);
  return 0;
}

int cmd_stress(const CommonOptions& opt) {
  const auto cards = load_benchmark(opt);
  const ObstructionWeights w = load_weights(opt.weights_path);
  StressConfig cfg;
  cfg.seed = opt.seed;
  const StressSummary summary = stress_eval(cards, cfg, w, opt.jobs);

  std::vector<std::vector<std::string>> rows;
  for (const auto& rep : summary.reports) {
    rows.push_back({rep.card_id, rep.family_id, rep.intended_selected ? "1" : "0",
                    fmt(rep.margin), rep.best_alternative_id,
                    rep.matched_cost_outranks_intended ? "1" : "0"});
  }
  write_table(opt, "stress",
              {"card_id", "family_id", "intended_selected", "margin", "best_alternative",
               "matched_cost_outranks_intended"},
              rows);

  ordered_json config;
  config["weights"] = weights_json(w);
  config["n_incorrect_formulas"] = cfg.n_incorrect_formulas;
  config["n_randomized"] = cfg.n_randomized;
  config["n_matched_cost"] = cfg.n_matched_cost;
  config["perturbation_scale"] = cfg.perturbation_scale;
  ordered_json payload;
  payload["metrics"] = metrics_json(summary.metrics);
  payload["negative_margin_cards"] = summary.negative_margin_cards;
  bool any_matched = false;
  for (const auto& rep : summary.reports) any_matched |= rep.matched_cost_outranks_intended;
  payload["matched_cost_outranks_intended"] = any_matched;
  write_summary(opt, "stress", config, payload);
  return 0;
}

int cmd_sensitivity(const CommonOptions& opt) {
  const auto cards = load_benchmark(opt);
  const ObstructionWeights w = load_weights(opt.weights_path);
  const auto results = rank_all(cards, w, opt.jobs);
  const auto labels = labels_of(cards);
  const auto cells = weight_sensitivity(results, labels, w);

  std::vector<std::vector<std::string>> rows;
  ordered_json payload_cells = ordered_json::array();
  for (const auto& cell : cells) {
    rows.push_back({cell.block, fmt(cell.multiplier), fmt(cell.metrics.top1),
                    fmt(cell.metrics.mrr), fmt(cell.metrics.type_accuracy),
                    std::to_string(cell.n_selection_changes)});
    ordered_json j;
    j["block"] = cell.block;
    j["multiplier"] = cell.multiplier;
    j["metrics"] = metrics_json(cell.metrics);
    j["n_selection_changes"] = cell.n_selection_changes;
    payload_cells.push_back(j);
  }
  write_table(opt, "sensitivity",
              {"block", "multiplier", "top1", "mrr", "type_accuracy", "n_selection_changes"},
              rows);
  ordered_json config;
  config["weights"] = weights_json(w);
  config["multipliers"] = default_sensitivity_multipliers();
  ordered_json payload;
  payload["cells"] = payload_cells;
  write_summary(opt, "sensitivity", config, payload);
  return 0;
}

int cmd_robustness(const CommonOptions& opt) {
  const auto cards = load_benchmark(opt);
  const ObstructionWeights w = load_weights(opt.weights_path);
  RobustnessGrid grid;
  grid.seed = opt.seed;
  const auto cells = robustness_sweep(cards, grid, w, opt.jobs);

  std::vector<std::vector<std::string>> rows;
  ordered_json payload_cells = ordered_json::array();
  for (const auto& cell : cells) {
    rows.push_back({fmt(cell.noise), fmt(cell.subsample), fmt(cell.metrics.top1),
                    fmt(cell.metrics.mrr), fmt(cell.metrics.type_accuracy)});
    ordered_json j;
    j["noise"] = cell.noise;
    j["subsample"] = cell.subsample;
    j["metrics"] = metrics_json(cell.metrics);
    payload_cells.push_back(j);
  }
  write_table(opt, "robustness", {"noise", "subsample", "top1", "mrr", "type_accuracy"}, rows);
  ordered_json config;
  config["weights"] = weights_json(w);
  config["noise_levels"] = grid.noise_levels;
  config["subsample_fractions"] = grid.subsample_fractions;
  config["repeats"] = grid.repeats;
  ordered_json payload;
  payload["cells"] = payload_cells;
  write_summary(opt, "robustness", config, payload);
  return 0;
}

int cmd_kernel(const CommonOptions& opt) {
  const auto cards = load_benchmark(opt);
  const ObstructionWeights w = load_weights(opt.weights_path);
  const auto results = rank_all(cards, w, opt.jobs);
  const auto labels = labels_of(cards);
  const auto rows_in = make_candidate_rows(results, labels);
  const KernelConfig cfg;

  std::vector<std::vector<std::string>> rows;
  ordered_json payload;

  const BenchmarkMetrics lofo = leave_family_out_eval(rows_in, cfg);
  rows.push_back({"leave_family_out", "kernel_ranking", "full", fmt(lofo.top1), fmt(lofo.mrr),
                  fmt(lofo.type_accuracy), ""});
  payload["leave_family_out"] = metrics_json(lofo);

  ordered_json payload_ablations;
  for (const auto& [name, m] : kernel_ablation_suite(rows_in, cfg)) {
    rows.push_back({"leave_family_out", "kernel_ranking", name, fmt(m.top1), fmt(m.mrr),
                    fmt(m.type_accuracy), ""});
    payload_ablations[name] = metrics_json(m);
  }
  payload["ablations"] = payload_ablations;

  ordered_json payload_suite = ordered_json::array();
  for (const auto& cell : variant_suite_eval(rows_in, cfg)) {
    rows.push_back({cell.protocol, cell.scorer, "full", fmt(cell.metrics.top1),
                    fmt(cell.metrics.mrr), fmt(cell.metrics.type_accuracy), fmt(cell.pairwise)});
    ordered_json j;
    j["protocol"] = cell.protocol;
    j["scorer"] = cell.scorer;
    j["metrics"] = metrics_json(cell.metrics);
    j["pairwise"] = cell.pairwise;
    payload_suite.push_back(j);
  }
  payload["variant_suite"] = payload_suite;

  double random_top1 = 0.0;
  for (const auto& card : cards) random_top1 += 1.0 / card.candidates.size();
  if (!cards.empty()) random_top1 /= cards.size();
  payload["random_top1"] = random_top1;

  write_table(opt, "kernel",
              {"protocol", "scorer", "setting", "top1", "mrr", "type_accuracy", "pairwise"}, rows);
  ordered_json config;
  config["weights"] = weights_json(w);
  config["ridge"] = cfg.ridge;
  write_summary(opt, "kernel", config, payload);
  return 0;
}

// Aggregates the summaries previously written into --out and re-checks the
// headline claims against them.
int cmd_report(const CommonOptions& opt) {
  if (opt.out_dir.empty()) throw ConfigError("report: --out is required");
  auto load = [&](const std::string& stem) -> ordered_json {
    const fs::path path = fs::path(opt.out_dir) / (stem + "_summary.json");
    if (!fs::exists(path)) return {};
    std::ifstream in(path);
    ordered_json j;
    in >> j;
    return j;
  };
  const ordered_json rank = load("rank");
  const ordered_json baselines = load("baselines");
  const ordered_json stress = load("stress");
  const ordered_json robustness = load("robustness");
  const ordered_json kernel = load("kernel");

  struct Check {
    std::string name;
    bool available;
    bool pass;
  };
  std::vector<Check> checks;
  auto add = [&](const std::string& name, bool available, bool pass) {
    checks.push_back({name, available, available && pass});
  };

  add("rank_type_accuracy_1.0", !rank.empty(),
      !rank.empty() && rank["metrics"]["type_accuracy"].get<double>() == 1.0);
  add("rank_top1_at_least_0.85", !rank.empty(),
      !rank.empty() && rank["metrics"]["top1"].get<double>() >= 0.85);
  add("baseline_target_only_misses_type", !baselines.empty(),
      !baselines.empty() &&
          baselines["baselines"]["target_only"]["type_accuracy"].get<double>() < 1.0);
  add("baseline_residual_cost_below_full", !baselines.empty(),
      !baselines.empty() && baselines["baselines"]["residual_cost"]["top1"].get<double>() <
                                baselines["baselines"]["full_obstruction"]["top1"].get<double>());
  add("stress_no_matched_cost_wins", !stress.empty(),
      !stress.empty() && !stress["matched_cost_outranks_intended"].get<bool>());
  add("stress_top1_at_least_0.80", !stress.empty(),
      !stress.empty() && stress["metrics"]["top1"].get<double>() >= 0.80);
  bool robustness_degrades = false, robustness_available = !robustness.empty();
  if (robustness_available) {
    double clean = 0.0, noisy = 0.0;
    int n_clean = 0, n_noisy = 0;
    for (const auto& cell : robustness["cells"]) {
      const double eta = cell["noise"].get<double>();
      const double top1 = cell["metrics"]["top1"].get<double>();
      if (eta == 0.0) {
        clean += top1;
        ++n_clean;
      } else if (eta >= 0.2) {
        noisy += top1;
        ++n_noisy;
      }
    }
    robustness_degrades = n_clean > 0 && n_noisy > 0 && noisy / n_noisy < clean / n_clean;
  }
  add("robustness_noise_degrades_top1", robustness_available, robustness_degrades);
  add("kernel_beats_random", !kernel.empty(),
      !kernel.empty() && kernel["leave_family_out"]["top1"].get<double>() >
                             kernel["random_top1"].get<double>());

  bool all_available_pass = true;
  ordered_json payload_checks = ordered_json::array();
  for (const auto& check : checks) {
    const std::string status = !check.available ? "MISSING" : check.pass ? "PASS" : "FAIL";
    std::cout << "[" << status << "] " << check.name << "\n";
    if (check.available && !check.pass) all_available_pass = false;
    ordered_json j;
    j["name"] = check.name;
    j["status"] = status;
    payload_checks.push_back(j);
  }
  ordered_json payload;
  payload["checks"] = payload_checks;
  payload["all_available_pass"] = all_available_pass;
  CommonOptions summary_opt = opt;
  write_summary(summary_opt, "report", ordered_json::object(), payload);
  return all_available_pass ? 0 : 1;
}

int run(int argc, char** argv) {
  CLI::App app{"Obstruction-based ranking benchmark for theory-shift transition cards"};
  app.require_subcommand(1);

  CommonOptions opt;
  int variants = kDefaultVariantsPerFamily;

  auto add_common = [&](CLI::App* sub, bool needs_benchmark) {
    if (needs_benchmark) {
      sub->add_option("--benchmark", opt.benchmark_dir, "Benchmark directory with manifest.json");
    }
    sub->add_option("--weights", opt.weights_path, "JSON file overriding obstruction weights");
    sub->add_option("--seed", opt.seed, "Master seed");
    sub->add_option("--out", opt.out_dir, "Output directory for tables and summaries");
    sub->add_option("--jobs", opt.jobs, "Worker threads");
  };

  CLI::App* generate = app.add_subcommand("generate", "Generate the built-in benchmark");
  add_common(generate, false);
  generate->add_option("--variants", variants, "Variants per family");

  CLI::App* rank = app.add_subcommand("rank", "Rank candidates by obstruction score");
  add_common(rank, true);
  CLI::App* baselines = app.add_subcommand("baselines", "Compare baseline scorers");
  add_common(baselines, true);
  CLI::App* ablate = app.add_subcommand("ablate", "Single-term weight ablations");
  add_common(ablate, true);
  CLI::App* stress = app.add_subcommand("stress", "Adversarial candidate expansion");
  add_common(stress, true);
  CLI::App* sensitivity = app.add_subcommand("sensitivity", "Weight multiplier sweep");
  add_common(sensitivity, true);
  CLI::App* robustness = app.add_subcommand("robustness", "Noise/subsampling sweep");
  add_common(robustness, true);
  CLI::App* kernel = app.add_subcommand("kernel", "Kernel probe over ranked signatures");
  add_common(kernel, true);
  CLI::App* report = app.add_subcommand("report", "Aggregate previously written summaries");
  add_common(report, false);

  CLI11_PARSE(app, argc, argv);

  if (generate->parsed()) return cmd_generate(opt, variants);
  if (rank->parsed()) return cmd_rank(opt);
  if (baselines->parsed()) return cmd_baselines(opt);
  if (ablate->parsed()) return cmd_ablate(opt);
  if (stress->parsed()) return cmd_stress(opt);
  if (sensitivity->parsed()) return cmd_sensitivity(opt);
  if (robustness->parsed()) return cmd_robustness(opt);
  if (kernel->parsed()) return cmd_kernel(opt);
  if (report->parsed()) return cmd_report(opt);
  return 2;
}

}  // namespace
}  // namespace cardbench

int main(int argc, char** argv) {
  try {
    return cardbench::run(argc, argv);
  } catch (const cardbench::SchemaError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const cardbench::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
