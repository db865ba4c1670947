// Card and benchmark (de)serialization: one self-contained JSON card per
// file, plus a manifest tying a directory of cards to a master seed.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cardbench/types.hpp"

namespace cardbench {

struct ManifestEntry {
  std::string card_id;
  std::string family_id;
  int variant_index = 0;
  std::uint64_t card_seed = 0;
  std::string file;  // path relative to the manifest
};

struct BenchmarkManifest {
  std::string schema_version = kSchemaVersion;
  std::uint64_t master_seed = 0;
  std::vector<ManifestEntry> entries;
};

// Canonical serialization: fixed field order, two-space indent, trailing
// newline. serialize(deserialize(text)) is byte-identical for canonical text.
std::string serialize_card(const TransitionCard& card);
TransitionCard deserialize_card(const std::string& text);

std::string serialize_manifest(const BenchmarkManifest& manifest);
BenchmarkManifest deserialize_manifest(const std::string& text);

void write_card_file(const TransitionCard& card, const std::string& path);
TransitionCard read_card_file(const std::string& path);

// Writes every card plus manifest.json into `dir` (created if needed).
void write_benchmark_dir(const std::vector<TransitionCard>& cards, std::uint64_t master_seed,
                         const std::string& dir);

// Loads manifest.json from `dir` and every card it references; validates each
// card and throws SchemaError listing violations if any card is invalid.
std::vector<TransitionCard> read_benchmark_dir(const std::string& dir);

}  // namespace cardbench
