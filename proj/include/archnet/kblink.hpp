#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "archnet/io.hpp"
#include "archnet/linkage.hpp"

namespace archnet {

struct KbCandidate {
  std::string kb_id;  // non-empty; unique within any candidate list
  std::string label;
  std::string description;               // may be empty
  std::vector<std::string> occupations;  // may be empty
};

struct LinkedActor {
  std::string canonical_name;
  std::vector<std::string> aliases;  // all cluster members, sorted
  std::optional<std::string> kb_id;
  std::optional<double> disambiguation_score;  // in [-1, 1]
  std::optional<std::string> country;
  // kb_id and disambiguation_score are present or absent together.
};

// Token-frequency vector keyed by 64-bit token hashes; an empty cell map is
// the zero vector. Dense fixed-dimension providers use indices as keys.
struct Embedding {
  std::map<std::uint64_t, double> cells;
  bool zero() const { return cells.empty(); }
};

double cosine(const Embedding& a, const Embedding& b);  // 0 when either is zero

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  // Declared dimension; 0 means sparse/unbounded (hash-keyed cells).
  virtual std::size_t dimension() const = 0;
  virtual Embedding embed(const std::string& text) const = 0;
};

// Offline baseline: L2-normalized counts of lowercased word tokens (runs of
// Latin letters or digits), keyed by FNV-1a hashes. Cosine then measures
// token overlap. Deterministic and dependency-free.
class TokenFrequencyProvider : public EmbeddingProvider {
 public:
  std::size_t dimension() const override { return 0; }
  Embedding embed(const std::string& text) const override;
};

struct Anchor {
  std::string kb_id;
  std::string label;
  Embedding description_embedding;
  Embedding occupation_embedding;
};

class KbClient {
 public:
  virtual ~KbClient() = default;
  // People whose label (or alternate label) equals the query string.
  virtual std::vector<KbCandidate> lookup_label(const std::string& label) = 0;
  virtual KbCandidate fetch_entity(const std::string& kb_id) = 0;
  virtual std::optional<std::string> fetch_country(const std::string& kb_id) = 0;
};

// File-backed query→response map. Keys are content-addressed: label queries
// are normalized so spelling-insignificant variants share an entry.
class KbCache {
 public:
  KbCache() = default;
  static KbCache open(const std::string& path);  // missing file → empty cache
  static std::string label_key(const std::string& label);
  static std::string entity_key(const std::string& kb_id);
  static std::string country_key(const std::string& kb_id);

  bool contains(const std::string& key) const;
  const json& get(const std::string& key) const;
  void put(const std::string& key, json value);  // persists immediately
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, json> entries_;
  std::string path_;  // empty for a purely in-memory cache
};

// Replays a recorded cache; optional live fallback fills misses and records
// them. Without a fallback, a miss is an error (offline contract).
class CachedKbClient : public KbClient {
 public:
  CachedKbClient(KbCache cache, std::unique_ptr<KbClient> fallback = nullptr);

  std::vector<KbCandidate> lookup_label(const std::string& label) override;
  KbCandidate fetch_entity(const std::string& kb_id) override;
  std::optional<std::string> fetch_country(const std::string& kb_id) override;

 private:
  const json& fetch(const std::string& key,
                    const std::function<json()>& produce);
  KbCache cache_;
  std::unique_ptr<KbClient> fallback_;
};

// Live SPARQL-endpoint client (label and alternate-label match, restricted
// to humans). Never used by tests; the recorded cache stands in for it.
class SparqlKbClient : public KbClient {
 public:
  struct Options {
    std::string host = "query.wikidata.org";
    std::string path = "/sparql";
    std::vector<std::string> languages = {"en", "nl"};
    std::string instance_of = "Q5";   // human
    int limit = 20;
  };
  SparqlKbClient();
  explicit SparqlKbClient(Options options);

  std::vector<KbCandidate> lookup_label(const std::string& label) override;
  KbCandidate fetch_entity(const std::string& kb_id) override;
  std::optional<std::string> fetch_country(const std::string& kb_id) override;

 private:
  json run_query(const std::string& sparql, const std::string& what);
  Options options_;
};

// Canonical form queried first; on zero candidates the aliases are tried by
// descending corpus count then lexicographically until one answers.
std::vector<KbCandidate> generate_candidates(
    const AliasCluster& cluster, KbClient& client,
    const std::map<std::string, std::size_t>& surface_counts = {});

Anchor make_anchor(const std::string& anchor_id, KbClient& client,
                   const EmbeddingProvider& provider);

// Mean of the available component cosines (description, joined occupations);
// a component is unavailable when either side is empty. No candidates →
// nullopt; ties go to the smallest kb_id.
std::optional<std::pair<std::string, double>> disambiguate(
    const std::vector<KbCandidate>& candidates, const Anchor& anchor,
    const EmbeddingProvider& provider);

struct LinkOptions {
  bool enrich_country = false;
};

// Links every cluster; clusters with no candidates are dropped. The cluster
// whose canonical matches the anchor label is pinned to the anchor id with
// score 1.0. Output sorted by canonical name.
std::vector<LinkedActor> link_entities(
    const AliasDictionary& aliases, const std::string& anchor_id,
    KbClient& client, const EmbeddingProvider& provider,
    const std::map<std::string, std::size_t>& surface_counts = {},
    const LinkOptions& options = {});

void save_linked_actors(const std::vector<LinkedActor>& actors,
                        const std::string& path);
std::vector<LinkedActor> load_linked_actors(const std::string& path);

}  // namespace archnet
