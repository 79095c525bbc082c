#include "archnet/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <filesystem>
#include <memory>

#include "archnet/analysis.hpp"
#include "archnet/corpus.hpp"
#include "archnet/errors.hpp"
#include "archnet/kblink.hpp"
#include "archnet/ner.hpp"

namespace archnet {

namespace {

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys = {
      "pages",          "metadata",       "gazetteer", "import_mentions",
      "seeds",          "kb_cache",       "latin_threshold",
      "linkage_threshold", "min_weight",  "weights",   "anchor_kb_id",
      "enrich_country", "offline",        "seed"};
  return keys;
}

std::string resolve_against(const std::filesystem::path& base,
                            const std::string& raw) {
  if (raw.empty()) return raw;
  std::filesystem::path p(raw);
  if (p.is_absolute()) return raw;
  return (base / p).lexically_normal().string();
}

json centrality_to_json(const Centrality& c) {
  return json{{"degree", c.degree},
              {"weighted_degree", c.weighted_degree},
              {"betweenness", c.betweenness},
              {"closeness", c.closeness},
              {"eigenvector", c.eigenvector}};
}

}  // namespace

void PipelineConfig::validate() const {
  if (pages_path.empty())
    throw ValidationError("config: \"pages\" is required");
  if (metadata_path.empty())
    throw ValidationError("config: \"metadata\" is required");
  if (gazetteer_path.empty() && import_mentions_path.empty())
    throw ValidationError(
        "config: at least one of \"gazetteer\" and \"import_mentions\" is "
        "required (the recognizer set must not be empty)");
  if (anchor_kb_id.empty())
    throw ValidationError("config: \"anchor_kb_id\" is required");
  if (latin_threshold < 0.0 || latin_threshold > 1.0)
    throw ValidationError("config: latin_threshold must be in [0, 1], got " +
                          std::to_string(latin_threshold));
  if (linkage_threshold < 0.0 || linkage_threshold > 100.0)
    throw ValidationError(
        "config: linkage_threshold must be in [0, 100], got " +
        std::to_string(linkage_threshold));
  if (min_weight < 1)
    throw ValidationError("config: min_weight must be at least 1, got " +
                          std::to_string(min_weight));
  weights.validate();
}

PipelineConfig load_pipeline_config(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ParseError(path, 0, e.what());
  }
  if (!doc.is_object()) throw ParseError(path, 0, "config must be an object");
  const auto& known = known_config_keys();
  for (const auto& [key, value] : doc.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ValidationError("config: unknown key \"" + key + "\"");

  PipelineConfig config;
  const auto base = std::filesystem::path(path).parent_path();
  try {
    config.pages_path =
        resolve_against(base, doc.value("pages", std::string()));
    config.metadata_path =
        resolve_against(base, doc.value("metadata", std::string()));
    config.gazetteer_path =
        resolve_against(base, doc.value("gazetteer", std::string()));
    config.import_mentions_path =
        resolve_against(base, doc.value("import_mentions", std::string()));
    config.seeds_path =
        resolve_against(base, doc.value("seeds", std::string()));
    config.kb_cache_path =
        resolve_against(base, doc.value("kb_cache", std::string()));
    config.latin_threshold = doc.value("latin_threshold", 0.5);
    config.linkage_threshold = doc.value("linkage_threshold", 85.0);
    config.min_weight = doc.value("min_weight", 1LL);
    if (doc.contains("weights")) {
      const auto& w = doc.at("weights");
      config.weights.lastname = w.value("lastname", 0.4);
      config.weights.prefix = w.value("prefix", 0.2);
      config.weights.substring = w.value("substring", 0.4);
    }
    config.anchor_kb_id = doc.value("anchor_kb_id", std::string());
    config.enrich_country = doc.value("enrich_country", true);
    config.offline = doc.value("offline", true);
    config.seed = doc.value("seed", std::uint64_t{42});
  } catch (const json::exception& e) {
    throw ParseError(path, 0, e.what());
  }
  return config;
}

json config_to_json(const PipelineConfig& config) {
  return json{{"pages", config.pages_path},
              {"metadata", config.metadata_path},
              {"gazetteer", config.gazetteer_path},
              {"import_mentions", config.import_mentions_path},
              {"seeds", config.seeds_path},
              {"kb_cache", config.kb_cache_path},
              {"latin_threshold", config.latin_threshold},
              {"linkage_threshold", config.linkage_threshold},
              {"min_weight", config.min_weight},
              {"weights",
               {{"lastname", config.weights.lastname},
                {"prefix", config.weights.prefix},
                {"substring", config.weights.substring}}},
              {"anchor_kb_id", config.anchor_kb_id},
              {"enrich_country", config.enrich_country},
              {"offline", config.offline},
              {"seed", config.seed}};
}

json manifest_to_json(const RunManifest& manifest) {
  json stages = json::array();
  for (const auto& stage : manifest.stages)
    stages.push_back(json{{"stage", stage.stage},
                          {"inputs", stage.inputs},
                          {"outputs", stage.outputs},
                          {"entity_count", stage.entity_count}});
  return json{{"tool_version", manifest.tool_version},
              {"config_digest", manifest.config_digest},
              {"stages", stages}};
}

void save_manifest(const RunManifest& manifest, const std::string& path) {
  write_file(path, manifest_to_json(manifest).dump(2) + "\n");
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(),
                 nullptr) != 1)
    throw IoError("sha256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

std::string sha256_file(const std::string& path) {
  return sha256_hex(read_file(path));
}

RunManifest run_pipeline(const PipelineConfig& config,
                         const std::string& out_dir) {
  config.validate();
  for (const std::string& path :
       {config.pages_path, config.metadata_path, config.gazetteer_path,
        config.import_mentions_path, config.seeds_path})
    if (!path.empty() && !std::filesystem::exists(path))
      throw ValidationError("input not found: " + path);
  if (config.offline && !config.kb_cache_path.empty() &&
      !std::filesystem::exists(config.kb_cache_path))
    throw ValidationError("input not found: " + config.kb_cache_path +
                          " (a recorded KB cache is required offline)");
  std::filesystem::create_directories(out_dir);
  const auto artifact = [&](const std::string& name) {
    return (std::filesystem::path(out_dir) / name).string();
  };

  RunManifest manifest;
  manifest.tool_version = kToolVersion;
  manifest.config_digest = sha256_hex(config_to_json(config).dump());
  const std::string manifest_path = artifact("manifest.json");

  // Runs fn, then records the digests of everything it read and wrote plus
  // the entity count fn returns (-1 = not applicable); the manifest on disk
  // always reflects exactly the finished stages.
  const auto stage = [&](const std::string& name,
                         const std::vector<std::string>& inputs,
                         const std::vector<std::string>& outputs,
                         const std::function<long long()>& fn) {
    StageRecord record;
    record.stage = name;
    try {
      for (const auto& path : inputs)
        if (!path.empty()) record.inputs[path] = sha256_file(path);
      record.entity_count = fn();
      for (const auto& name_only : outputs)
        record.outputs[name_only] = sha256_file(artifact(name_only));
    } catch (const std::exception& e) {
      save_manifest(manifest, manifest_path);
      throw StageError(name, e.what());
    }
    manifest.stages.push_back(std::move(record));
    save_manifest(manifest, manifest_path);
  };

  Corpus corpus;
  stage("ingest", {config.pages_path, config.metadata_path}, {"corpus.jsonl"},
        [&]() -> long long {
          corpus = ingest_pages(config.pages_path, config.metadata_path);
          save_corpus(corpus, artifact("corpus.jsonl"));
          return -1;
        });

  stage("classify", {artifact("corpus.jsonl")}, {"classified.jsonl"},
        [&]() -> long long {
          ModalityOptions options;
          options.latin_threshold = config.latin_threshold;
          classify_corpus(corpus, options);
          save_corpus(corpus, artifact("classified.jsonl"));
          return -1;
        });

  std::vector<Document> documents;
  MentionSet mentions;
  stage("ner",
        {artifact("classified.jsonl"), config.gazetteer_path,
         config.import_mentions_path},
        {"mentions.jsonl"}, [&]() -> long long {
          documents = group_documents(corpus);
          std::vector<std::shared_ptr<Recognizer>> recognizers;
          if (!config.gazetteer_path.empty())
            recognizers.push_back(std::make_shared<GazetteerRecognizer>(
                GazetteerRecognizer::from_file(config.gazetteer_path)));
          if (!config.import_mentions_path.empty())
            recognizers.push_back(std::make_shared<ImportRecognizer>(
                config.import_mentions_path));
          mentions = build_mention_set(documents, recognizers);
          save_mentions(mentions, artifact("mentions.jsonl"));
          return static_cast<long long>(mentions.surface_counts.size());
        });

  AliasDictionary aliases;
  stage("link-records", {artifact("mentions.jsonl"), config.seeds_path},
        {"aliases.json"}, [&]() -> long long {
          std::vector<SeedAlias> seeds;
          if (!config.seeds_path.empty())
            seeds = load_seed_aliases(config.seeds_path);
          const auto table =
              build_similarity_table(mentions, Blocking::kNone, config.weights);
          aliases = link_records(mentions, table, config.linkage_threshold,
                                 seeds);
          save_alias_dictionary(aliases, artifact("aliases.json"));
          return static_cast<long long>(aliases.clusters.size());
        });

  std::vector<LinkedActor> actors;
  stage("link-entities", {artifact("aliases.json"), config.kb_cache_path},
        {"actors.jsonl"}, [&]() -> long long {
          KbCache cache;
          if (!config.kb_cache_path.empty())
            cache = KbCache::open(config.kb_cache_path);
          std::unique_ptr<KbClient> fallback;
          if (!config.offline) fallback = std::make_unique<SparqlKbClient>();
          CachedKbClient client(std::move(cache), std::move(fallback));
          TokenFrequencyProvider provider;
          LinkOptions options;
          options.enrich_country = config.enrich_country;
          actors = link_entities(aliases, config.anchor_kb_id, client,
                                 provider, mentions.surface_counts, options);
          save_linked_actors(actors, artifact("actors.jsonl"));
          return static_cast<long long>(actors.size());
        });

  WeightedGraph network;
  stage("build-network",
        {artifact("classified.jsonl"), artifact("mentions.jsonl"),
         artifact("aliases.json"), artifact("actors.jsonl")},
        {"network.graphml"}, [&]() -> long long {
          network = prune(build_cooccurrence(documents, mentions, aliases,
                                             actors),
                          config.min_weight);
          save_graphml(network, artifact("network.graphml"));
          return static_cast<long long>(network.node_count());
        });

  stage("analyze", {artifact("network.graphml")}, {"stats.json"},
        [&]() -> long long {
          write_file(artifact("stats.json"),
                     analyze_graph_json(network).dump(2) + "\n");
          return -1;
        });

  return manifest;
}

json analyze_graph_json(const WeightedGraph& graph, std::size_t top_k) {
  const auto stats = graph_stats(graph);
  const auto profiles = centrality_profile(graph, top_k);
  const auto partition = communities(graph);
  json top = json::array();
  for (const auto& profile : profiles)
    top.push_back(json{{"node", profile.node},
                       {"raw", centrality_to_json(profile.raw)},
                       {"normalized", centrality_to_json(profile.normalized)},
                       {"composite", profile.composite}});
  return json{{"stats",
               {{"num_components", stats.num_components},
                {"num_nodes", stats.num_nodes},
                {"avg_degree", stats.avg_degree},
                {"avg_weighted_degree", stats.avg_weighted_degree},
                {"density", stats.density},
                {"diameter", stats.diameter},
                {"avg_clustering", stats.avg_clustering},
                {"modularity", stats.modularity}}},
              {"top_profiles", top},
              {"communities", partition.partition},
              {"communities_modularity", partition.modularity}};
}

ExportFormat export_format_from_string(std::string_view name) {
  if (name == "graphml") return ExportFormat::kGraphml;
  if (name == "json") return ExportFormat::kJson;
  if (name == "dot") return ExportFormat::kDot;
  throw ValidationError("unknown export format \"" + std::string(name) +
                        "\" (expected graphml, json, or dot)");
}

void export_graph(const WeightedGraph& graph, ExportFormat format,
                  const std::string& path) {
  switch (format) {
    case ExportFormat::kGraphml: save_graphml(graph, path); return;
    case ExportFormat::kJson: save_node_link_json(graph, path); return;
    case ExportFormat::kDot: save_dot(graph, path); return;
  }
}

}  // namespace archnet
