// Python bindings: cards are exchanged as canonical JSON strings, results as
// JSON strings the Python wrapper parses into dicts.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "cardbench/card_io.hpp"
#include "cardbench/generator.hpp"
#include "cardbench/graph_features.hpp"
#include "cardbench/kernel.hpp"
#include "cardbench/obstruction.hpp"
#include "cardbench/stress.hpp"

namespace py = pybind11;
using namespace cardbench;
using ordered_json = nlohmann::ordered_json;

namespace {

ObstructionWeights weights_from_json(const std::string& text) {
  ObstructionWeights w;
  if (text.empty()) return w;
  const ordered_json j = ordered_json::parse(text);
  auto get = [&](const char* key, double& slot) {
    if (j.contains(key)) slot = j[key].get<double>();
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

ObstructionSignature signature_from_json(const ordered_json& j) {
  ObstructionSignature sig;
  sig.r_source = j.value("r_source", 0.0);
  sig.r_overlap = j.value("r_overlap", 0.0);
  sig.r_target = j.value("r_target", 0.0);
  sig.r_validation = j.value("r_validation", 0.0);
  sig.gluing = j.value("gluing", 0.0);
  sig.constraint = j.value("constraint", 0.0);
  sig.limit = j.value("limit", 0.0);
  sig.cost = j.value("cost", 0.0);
  return sig;
}

ordered_json signature_to_json(const ObstructionSignature& sig) {
  ordered_json j;
  j["r_source"] = sig.r_source;
  j["r_overlap"] = sig.r_overlap;
  j["r_target"] = sig.r_target;
  j["r_validation"] = sig.r_validation;
  j["gluing"] = sig.gluing;
  j["constraint"] = sig.constraint;
  j["limit"] = sig.limit;
  j["cost"] = sig.cost;
  return j;
}

ordered_json metrics_to_json(const BenchmarkMetrics& m) {
  ordered_json j;
  j["top1"] = m.top1;
  j["mrr"] = m.mrr;
  j["type_accuracy"] = m.type_accuracy;
  j["n_cards"] = m.n_cards;
  return j;
}

ordered_json result_to_json(const RankingResult& res) {
  ordered_json j;
  j["card_id"] = res.card_id;
  j["family_id"] = res.family_id;
  j["variant_index"] = res.variant_index;
  j["scale"] = res.scale;
  j["selected_id"] = res.selected_id;
  j["intended_rank"] = res.intended_rank;
  j["margin"] = res.margin;
  ordered_json rows = ordered_json::array();
  for (const auto& cand : res.rows) {
    ordered_json row;
    row["candidate_id"] = cand.candidate_id;
    row["role"] = to_string(cand.role);
    row["move_type"] = to_string(cand.move_type);
    row["rank"] = cand.rank;
    row["score"] = cand.score;
    row["signature"] = signature_to_json(cand.signature);
    row["psi"] = cand.psi;
    rows.push_back(row);
  }
  j["candidates"] = rows;
  return j;
}

std::vector<TransitionCard> cards_from_texts(const std::vector<std::string>& texts) {
  std::vector<TransitionCard> cards;
  cards.reserve(texts.size());
  for (const auto& text : texts) cards.push_back(deserialize_card(text));
  return cards;
}

std::pair<std::vector<RankingResult>, std::vector<CardLabels>> rank_many(
    const std::vector<TransitionCard>& cards, const ObstructionWeights& w) {
  std::vector<RankingResult> results;
  std::vector<CardLabels> labels;
  for (const auto& card : cards) {
    results.push_back(rank_card(card, w));
    labels.push_back(card_labels(card));
  }
  return {results, labels};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Obstruction-based ranking of theory-shift transition cards";

  py::register_exception<SchemaError>(m, "SchemaError");
  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<PredictionDomainError>(m, "PredictionDomainError");

  m.def("schema_version", [] { return std::string(kSchemaVersion); });

  m.def(
      "generate_benchmark",
      [](std::uint64_t seed, int variants) {
        std::vector<std::string> out;
        for (const auto& card : generate_benchmark(seed, variants)) {
          out.push_back(serialize_card(card));
        }
        return out;
      },
      py::arg("seed") = kDefaultMasterSeed, py::arg("variants") = kDefaultVariantsPerFamily);

  m.def("validate_card", [](const std::string& text) {
    return validate_card(deserialize_card(text));
  });

  m.def(
      "rank_card",
      [](const std::string& text, const std::string& weights) {
        const TransitionCard card = deserialize_card(text);
        const RankingResult res = rank_card(card, weights_from_json(weights));
        return result_to_json(res).dump();
      },
      py::arg("card"), py::arg("weights") = "");

  m.def(
      "rank_benchmark",
      [](const std::vector<std::string>& texts, const std::string& weights) {
        const auto cards = cards_from_texts(texts);
        const auto [results, labels] = rank_many(cards, weights_from_json(weights));
        ordered_json j;
        j["metrics"] = metrics_to_json(benchmark_metrics(results, labels));
        ordered_json out_results = ordered_json::array();
        for (const auto& res : results) out_results.push_back(result_to_json(res));
        j["results"] = out_results;
        return j.dump();
      },
      py::arg("cards"), py::arg("weights") = "");

  m.def(
      "obstruction_score",
      [](const std::string& signature, const std::string& weights) {
        return obstruction_score(signature_from_json(ordered_json::parse(signature)),
                                 weights_from_json(weights));
      },
      py::arg("signature"), py::arg("weights") = "");

  m.def("graph_feature_length", [] { return graph_feature_length(); });

  m.def(
      "write_benchmark_dir",
      [](const std::vector<std::string>& texts, std::uint64_t seed, const std::string& dir) {
        write_benchmark_dir(cards_from_texts(texts), seed, dir);
      },
      py::arg("cards"), py::arg("seed"), py::arg("dir"));

  m.def("read_benchmark_dir", [](const std::string& dir) {
    std::vector<std::string> out;
    for (const auto& card : read_benchmark_dir(dir)) out.push_back(serialize_card(card));
    return out;
  });

  m.def(
      "kernel_leave_family_out",
      [](const std::vector<std::string>& texts, const std::string& weights) {
        const auto cards = cards_from_texts(texts);
        const auto [results, labels] = rank_many(cards, weights_from_json(weights));
        const auto rows = make_candidate_rows(results, labels);
        return metrics_to_json(leave_family_out_eval(rows, KernelConfig{})).dump();
      },
      py::arg("cards"), py::arg("weights") = "");

  m.def(
      "stress_eval",
      [](const std::vector<std::string>& texts, std::uint64_t seed, const std::string& weights,
         int jobs) {
        const auto cards = cards_from_texts(texts);
        StressConfig cfg;
        cfg.seed = seed;
        const StressSummary summary = stress_eval(cards, cfg, weights_from_json(weights), jobs);
        ordered_json j;
        j["metrics"] = metrics_to_json(summary.metrics);
        j["negative_margin_cards"] = summary.negative_margin_cards;
        ordered_json reports = ordered_json::array();
        for (const auto& rep : summary.reports) {
          ordered_json r;
          r["card_id"] = rep.card_id;
          r["family_id"] = rep.family_id;
          r["intended_selected"] = rep.intended_selected;
          r["margin"] = rep.margin;
          r["best_alternative_id"] = rep.best_alternative_id;
          r["matched_cost_outranks_intended"] = rep.matched_cost_outranks_intended;
          reports.push_back(r);
        }
        j["reports"] = reports;
        return j.dump();
      },
      py::arg("cards"), py::arg("seed") = 0, py::arg("weights") = "", py::arg("jobs") = 1);
}
