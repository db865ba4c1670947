#include "cardbench/card_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cardbench {
namespace {

using Json = nlohmann::ordered_json;

Json interval_to_json(const Interval& iv) { return Json::array({iv.lo, iv.hi}); }

Interval interval_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw SchemaError("interval must be a [lo, hi] pair");
  return Interval{j[0].get<double>(), j[1].get<double>()};
}

Json regime_to_json(const Regime& regime) {
  Json out = Json::array();
  for (const auto& iv : regime) out.push_back(interval_to_json(iv));
  return out;
}

Regime regime_from_json(const Json& j) {
  Regime out;
  for (const auto& e : j) out.push_back(interval_from_json(e));
  return out;
}

Json model_ref_to_json(const ModelRef& ref) {
  Json out;
  out["family_id"] = ref.family_id;
  out["spec_id"] = ref.spec_id;
  if (ref.frozen_theta) out["frozen_theta"] = *ref.frozen_theta;
  if (!ref.constant_overrides.empty()) out["constant_overrides"] = ref.constant_overrides;
  return out;
}

ModelRef model_ref_from_json(const Json& j) {
  ModelRef ref;
  ref.family_id = j.at("family_id").get<std::string>();
  ref.spec_id = j.at("spec_id").get<std::string>();
  if (j.contains("frozen_theta")) ref.frozen_theta = j["frozen_theta"].get<std::vector<double>>();
  if (j.contains("constant_overrides")) {
    ref.constant_overrides = j["constant_overrides"].get<std::map<std::string, double>>();
  }
  return ref;
}

Json graph_to_json(const ConstellationGraph& g) {
  Json out;
  Json nodes = Json::array();
  for (const auto& n : g.nodes) nodes.push_back(Json::array({n.id, to_string(n.type)}));
  out["nodes"] = nodes;
  Json edges = Json::array();
  for (const auto& e : g.edges) edges.push_back(Json::array({e.src, to_string(e.type), e.dst}));
  out["edges"] = edges;
  Json flags;
  flags["invariant_speed"] = g.commitments.invariant_speed;
  flags["low_speed_limit"] = g.commitments.low_speed_limit;
  flags["quantization_scale"] = g.commitments.quantization_scale;
  flags["absolute_time"] = g.commitments.absolute_time;
  flags["preferred_frame"] = g.commitments.preferred_frame;
  flags["limit_relation"] = g.commitments.limit_relation;
  flags["removes_old_posit"] = g.commitments.removes_old_posit;
  flags["introduces_constraint"] = g.commitments.introduces_constraint;
  out["commitments"] = flags;
  return out;
}

ConstellationGraph graph_from_json(const Json& j) {
  ConstellationGraph g;
  for (const auto& n : j.at("nodes")) {
    if (!n.is_array() || n.size() != 2) throw SchemaError("graph node must be [id, type]");
    g.nodes.push_back({n[0].get<std::string>(), node_type_from_string(n[1].get<std::string>())});
  }
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 3) throw SchemaError("graph edge must be [src, type, dst]");
    g.edges.push_back({e[0].get<std::string>(), edge_type_from_string(e[1].get<std::string>()),
                       e[2].get<std::string>()});
  }
  const Json& flags = j.at("commitments");
  g.commitments.invariant_speed = flags.at("invariant_speed").get<bool>();
  g.commitments.low_speed_limit = flags.at("low_speed_limit").get<bool>();
  g.commitments.quantization_scale = flags.at("quantization_scale").get<bool>();
  g.commitments.absolute_time = flags.at("absolute_time").get<bool>();
  g.commitments.preferred_frame = flags.at("preferred_frame").get<bool>();
  g.commitments.limit_relation = flags.at("limit_relation").get<bool>();
  g.commitments.removes_old_posit = flags.at("removes_old_posit").get<bool>();
  g.commitments.introduces_constraint = flags.at("introduces_constraint").get<bool>();
  return g;
}

Json dataset_to_json(const ContextDataset& ds) {
  Json out;
  out["context"] = to_string(ds.context);
  out["regime"] = regime_to_json(ds.regime);
  Json records = Json::array();
  for (const auto& r : ds.records) {
    Json rec;
    rec["x"] = r.x;
    rec["y"] = r.y;
    records.push_back(std::move(rec));
  }
  out["records"] = records;
  return out;
}

ContextDataset dataset_from_json(const Json& j) {
  ContextDataset ds;
  ds.context = context_from_string(j.at("context").get<std::string>());
  ds.regime = regime_from_json(j.at("regime"));
  for (const auto& rec : j.at("records")) {
    ObservationRecord r;
    r.x = rec.at("x").get<std::vector<double>>();
    r.y = rec.at("y").get<double>();
    r.context = ds.context;
    ds.records.push_back(std::move(r));
  }
  return ds;
}

Json candidate_to_json(const CandidateMove& cand) {
  Json out;
  out["id"] = cand.id;
  out["role"] = to_string(cand.role);
  out["move_type"] = to_string(cand.move_type);
  out["cost"] = cand.cost;
  out["model"] = model_ref_to_json(cand.model);
  out["graph"] = graph_to_json(cand.graph);
  return out;
}

CandidateMove candidate_from_json(const Json& j) {
  CandidateMove cand;
  cand.id = j.at("id").get<std::string>();
  cand.role = role_from_string(j.at("role").get<std::string>());
  cand.move_type = move_type_from_string(j.at("move_type").get<std::string>());
  cand.cost = j.at("cost").get<double>();
  cand.model = model_ref_from_json(j.at("model"));
  cand.graph = graph_from_json(j.at("graph"));
  return cand;
}

Json constraint_to_json(const ConstraintSpec& cs) {
  Json out;
  out["id"] = cs.id;
  out["kind"] = to_string(cs.kind);
  Json applies = Json::array();
  for (Context c : cs.applies_in) applies.push_back(to_string(c));
  out["applies_in"] = applies;
  out["parameters"] = cs.parameters;
  return out;
}

ConstraintSpec constraint_from_json(const Json& j) {
  ConstraintSpec cs;
  cs.id = j.at("id").get<std::string>();
  cs.kind = constraint_kind_from_string(j.at("kind").get<std::string>());
  for (const auto& c : j.at("applies_in")) {
    cs.applies_in.insert(context_from_string(c.get<std::string>()));
  }
  cs.parameters = j.at("parameters").get<std::map<std::string, double>>();
  return cs;
}

Json card_to_json(const TransitionCard& card) {
  Json out;
  out["schema_version"] = card.schema_version;
  out["card_id"] = card.card_id;
  out["family_id"] = card.family_id;
  out["variant_index"] = card.variant_index;
  out["card_seed"] = card.card_seed;
  out["input_arity"] = card.input_arity;
  out["transition_type"] = to_string(card.transition_type);
  out["intended_candidate_id"] = card.intended_candidate_id;
  Json source;
  source["model"] = model_ref_to_json(card.source_model);
  source["graph"] = graph_to_json(card.source_graph);
  out["source_constellation"] = source;
  Json datasets = Json::array();
  for (const auto& ds : card.datasets) datasets.push_back(dataset_to_json(ds));
  out["datasets"] = datasets;
  Json candidates = Json::array();
  for (const auto& cand : card.candidates) candidates.push_back(candidate_to_json(cand));
  out["candidates"] = candidates;
  Json constraints = Json::array();
  for (const auto& cs : card.constraints) constraints.push_back(constraint_to_json(cs));
  out["constraints"] = constraints;
  Json limit;
  limit["regime"] = regime_to_json(card.limit.limit_regime);
  limit["n_probe"] = card.limit.n_probe;
  limit["reference"] = model_ref_to_json(card.limit.reference);
  out["limit"] = limit;
  return out;
}

TransitionCard card_from_json(const Json& j) {
  TransitionCard card;
  card.schema_version = j.at("schema_version").get<std::string>();
  card.card_id = j.at("card_id").get<std::string>();
  card.family_id = j.at("family_id").get<std::string>();
  card.variant_index = j.at("variant_index").get<int>();
  card.card_seed = j.at("card_seed").get<std::uint64_t>();
  card.input_arity = j.at("input_arity").get<int>();
  card.transition_type = transition_type_from_string(j.at("transition_type").get<std::string>());
  card.intended_candidate_id = j.at("intended_candidate_id").get<std::string>();
  card.source_model = model_ref_from_json(j.at("source_constellation").at("model"));
  card.source_graph = graph_from_json(j.at("source_constellation").at("graph"));
  const Json& datasets = j.at("datasets");
  if (!datasets.is_array() || datasets.size() != kNumContexts) {
    throw SchemaError("card must carry exactly four context datasets");
  }
  for (int c = 0; c < kNumContexts; ++c) {
    card.datasets[c] = dataset_from_json(datasets[c]);
  }
  for (const auto& cand : j.at("candidates")) {
    card.candidates.push_back(candidate_from_json(cand));
  }
  for (const auto& cs : j.at("constraints")) {
    card.constraints.push_back(constraint_from_json(cs));
  }
  const Json& limit = j.at("limit");
  card.limit.limit_regime = regime_from_json(limit.at("regime"));
  card.limit.n_probe = limit.at("n_probe").get<int>();
  card.limit.reference = model_ref_from_json(limit.at("reference"));
  return card;
}

Json parse(const std::string& text, const char* what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("failed to parse ") + what + ": " + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw SchemaError("cannot write file '" + path + "'");
  out << text;
}

}  // namespace

std::string serialize_card(const TransitionCard& card) { return card_to_json(card).dump(2) + "\n"; }

TransitionCard deserialize_card(const std::string& text) {
  try {
    return card_from_json(parse(text, "card"));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed card: ") + e.what());
  }
}

std::string serialize_manifest(const BenchmarkManifest& manifest) {
  Json out;
  out["schema_version"] = manifest.schema_version;
  out["master_seed"] = manifest.master_seed;
  Json cards = Json::array();
  for (const auto& e : manifest.entries) {
    Json entry;
    entry["card_id"] = e.card_id;
    entry["family_id"] = e.family_id;
    entry["variant_index"] = e.variant_index;
    entry["card_seed"] = e.card_seed;
    entry["file"] = e.file;
    cards.push_back(std::move(entry));
  }
  out["cards"] = cards;
  return out.dump(2) + "\n";
}

BenchmarkManifest deserialize_manifest(const std::string& text) {
  try {
    const Json j = parse(text, "manifest");
    BenchmarkManifest m;
    m.schema_version = j.at("schema_version").get<std::string>();
    m.master_seed = j.at("master_seed").get<std::uint64_t>();
    for (const auto& e : j.at("cards")) {
      ManifestEntry entry;
      entry.card_id = e.at("card_id").get<std::string>();
      entry.family_id = e.at("family_id").get<std::string>();
      entry.variant_index = e.at("variant_index").get<int>();
      entry.card_seed = e.at("card_seed").get<std::uint64_t>();
      entry.file = e.at("file").get<std::string>();
      m.entries.push_back(std::move(entry));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed manifest: ") + e.what());
  }
}

void write_card_file(const TransitionCard& card, const std::string& path) {
  write_file(path, serialize_card(card));
}

TransitionCard read_card_file(const std::string& path) {
  return deserialize_card(read_file(path));
}

void write_benchmark_dir(const std::vector<TransitionCard>& cards, std::uint64_t master_seed,
                         const std::string& dir) {
  std::filesystem::create_directories(dir);
  BenchmarkManifest manifest;
  manifest.master_seed = master_seed;
  for (const auto& card : cards) {
    const std::string file = card.card_id + ".card.json";
    write_card_file(card, (std::filesystem::path(dir) / file).string());
    manifest.entries.push_back(
        {card.card_id, card.family_id, card.variant_index, card.card_seed, file});
  }
  write_file((std::filesystem::path(dir) / "manifest.json").string(),
             serialize_manifest(manifest));
}

std::vector<TransitionCard> read_benchmark_dir(const std::string& dir) {
  const BenchmarkManifest manifest =
      deserialize_manifest(read_file((std::filesystem::path(dir) / "manifest.json").string()));
  std::vector<TransitionCard> cards;
  for (const auto& entry : manifest.entries) {
    TransitionCard card = read_card_file((std::filesystem::path(dir) / entry.file).string());
    if (card.card_id != entry.card_id) {
      throw SchemaError("card id mismatch between manifest and '" + entry.file + "'");
    }
    const auto violations = validate_card(card);
    if (!violations.empty()) {
      std::string msg = "invalid card '" + card.card_id + "':";
      for (const auto& v : violations) msg += "\n  - " + v;
      throw SchemaError(msg);
    }
    cards.push_back(std::move(card));
  }
  return cards;
}

}  // namespace cardbench
