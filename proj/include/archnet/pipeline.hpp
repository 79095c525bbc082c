#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "archnet/io.hpp"
#include "archnet/linkage.hpp"
#include "archnet/network.hpp"

namespace archnet {

inline constexpr const char* kToolVersion = "0.1.0";

// One run in one file: every knob the stages consume.  Relative paths are
// resolved against the config file's directory at load time.
struct PipelineConfig {
  std::string pages_path;
  std::string metadata_path;
  std::string gazetteer_path;        // "" = no gazetteer recognizer
  std::string import_mentions_path;  // "" = no imported mentions
  std::string seeds_path;            // "" = no seed aliases
  std::string kb_cache_path;         // "" = empty in-memory cache

  double latin_threshold = 0.5;
  double linkage_threshold = 85.0;
  long long min_weight = 1;
  LinkageWeights weights;

  std::string anchor_kb_id;
  bool enrich_country = true;
  bool offline = true;
  std::uint64_t seed = 42;

  // Throws ValidationError on out-of-range knobs or missing inputs.
  void validate() const;
};

PipelineConfig load_pipeline_config(const std::string& path);
json config_to_json(const PipelineConfig& config);

struct StageRecord {
  std::string stage;
  std::map<std::string, std::string> inputs;   // path → content digest
  std::map<std::string, std::string> outputs;  // path → content digest
  long long entity_count = -1;                 // -1 = not applicable
};

// Audit trail of a run: what went in, what came out, how many entities
// survived each stage.  Counts never increase across ner → link-records →
// link-entities.
struct RunManifest {
  std::string tool_version;
  std::string config_digest;
  std::vector<StageRecord> stages;
};

json manifest_to_json(const RunManifest& manifest);
void save_manifest(const RunManifest& manifest, const std::string& path);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::string& path);

// Runs ingest → classify → ner → link-records → link-entities →
// build-network → analyze, persisting every intermediate artifact in
// out_dir and the manifest after each stage.  A failing stage raises
// StageError naming it; finished artifacts stay on disk.
RunManifest run_pipeline(const PipelineConfig& config,
                         const std::string& out_dir);

// Stats, top-k centrality profiles, and communities in one document; the
// analyze stage and the analyze subcommand share this shape.
json analyze_graph_json(const WeightedGraph& graph, std::size_t top_k = 10);

enum class ExportFormat { kGraphml, kJson, kDot };
ExportFormat export_format_from_string(std::string_view name);
void export_graph(const WeightedGraph& graph, ExportFormat format,
                  const std::string& path);

}  // namespace archnet
