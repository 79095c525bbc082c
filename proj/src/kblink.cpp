#include "archnet/kblink.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "archnet/text.hpp"

#include "httplib.h"

namespace archnet {

namespace {

std::uint64_t fnv1a(const std::string& token) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : token) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::vector<std::string> word_tokens(const std::string& text) {
  std::vector<std::string> tokens;
  std::u32string points = decode_utf8(text);
  std::u32string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      tokens.push_back(encode_utf8(cur));
      cur.clear();
    }
  };
  for (char32_t p : points) {
    p = to_lower(p);
    if (is_latin_letter(p) || (p >= U'0' && p <= U'9'))
      cur.push_back(p);
    else
      flush();
  }
  flush();
  return tokens;
}

std::string join_occupations(const std::vector<std::string>& occupations) {
  std::string joined;
  for (const auto& occ : occupations) {
    if (!joined.empty()) joined += ", ";
    joined += occ;
  }
  return joined;
}

KbCandidate candidate_from_json(const json& entry) {
  KbCandidate c;
  c.kb_id = entry.at("id").get<std::string>();
  c.label = entry.value("label", std::string());
  c.description = entry.value("description", std::string());
  if (entry.contains("occupations"))
    c.occupations = entry.at("occupations").get<std::vector<std::string>>();
  return c;
}

json candidate_to_json(const KbCandidate& c) {
  return json{{"id", c.kb_id},
              {"label", c.label},
              {"description", c.description},
              {"occupations", c.occupations}};
}

}  // namespace

double cosine(const Embedding& a, const Embedding& b) {
  if (a.zero() || b.zero()) return 0.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  auto ia = a.cells.begin();
  auto ib = b.cells.begin();
  while (ia != a.cells.end() && ib != b.cells.end()) {
    if (ia->first == ib->first) {
      dot += ia->second * ib->second;
      ++ia;
      ++ib;
    } else if (ia->first < ib->first) {
      ++ia;
    } else {
      ++ib;
    }
  }
  for (const auto& [k, v] : a.cells) na += v * v;
  for (const auto& [k, v] : b.cells) nb += v * v;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

Embedding TokenFrequencyProvider::embed(const std::string& text) const {
  Embedding e;
  for (const auto& token : word_tokens(text)) e.cells[fnv1a(token)] += 1.0;
  double norm = 0.0;
  for (const auto& [k, v] : e.cells) norm += v * v;
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (auto& [k, v] : e.cells) v /= norm;
  }
  return e;
}

KbCache KbCache::open(const std::string& path) {
  KbCache cache;
  cache.path_ = path;
  try {
    std::string content = read_file(path);
    json doc = json::parse(content);
    for (auto& [key, value] : doc.items()) cache.entries_[key] = value;
  } catch (const IoError&) {
    // Missing file: start empty; first put() creates it.
  } catch (const json::exception& e) {
    throw ParseError(path, 1, std::string("cache is not valid JSON: ") + e.what());
  }
  return cache;
}

std::string KbCache::label_key(const std::string& label) {
  return "label:" + normalize_name(label);
}
std::string KbCache::entity_key(const std::string& kb_id) {
  return "entity:" + kb_id;
}
std::string KbCache::country_key(const std::string& kb_id) {
  return "country:" + kb_id;
}

bool KbCache::contains(const std::string& key) const {
  return entries_.count(key) > 0;
}

const json& KbCache::get(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end())
    throw IoError("KB cache has no entry for \"" + key + "\"");
  return it->second;
}

void KbCache::put(const std::string& key, json value) {
  entries_[key] = std::move(value);
  if (path_.empty()) return;
  json doc(entries_);
  write_file(path_, doc.dump(2) + "\n");
}

CachedKbClient::CachedKbClient(KbCache cache,
                               std::unique_ptr<KbClient> fallback)
    : cache_(std::move(cache)), fallback_(std::move(fallback)) {}

const json& CachedKbClient::fetch(const std::string& key,
                                  const std::function<json()>& produce) {
  if (cache_.contains(key)) return cache_.get(key);
  if (!fallback_)
    throw IoError("KB cache miss for \"" + key +
                  "\" and no live client configured (offline); "
                  "retry with network access to record it");
  cache_.put(key, produce());
  return cache_.get(key);
}

std::vector<KbCandidate> CachedKbClient::lookup_label(
    const std::string& label) {
  const json& payload = fetch(KbCache::label_key(label), [&] {
    json arr = json::array();
    for (const auto& c : fallback_->lookup_label(label))
      arr.push_back(candidate_to_json(c));
    return arr;
  });
  std::vector<KbCandidate> candidates;
  std::vector<std::string> seen;
  for (const auto& entry : payload) {
    KbCandidate c = candidate_from_json(entry);
    if (std::count(seen.begin(), seen.end(), c.kb_id)) continue;
    seen.push_back(c.kb_id);
    candidates.push_back(std::move(c));
  }
  return candidates;
}

KbCandidate CachedKbClient::fetch_entity(const std::string& kb_id) {
  const json& payload = fetch(KbCache::entity_key(kb_id), [&] {
    return candidate_to_json(fallback_->fetch_entity(kb_id));
  });
  return candidate_from_json(payload);
}

std::optional<std::string> CachedKbClient::fetch_country(
    const std::string& kb_id) {
  const json& payload = fetch(KbCache::country_key(kb_id), [&]() -> json {
    auto country = fallback_->fetch_country(kb_id);
    return country ? json(*country) : json(nullptr);
  });
  if (payload.is_null()) return std::nullopt;
  return payload.get<std::string>();
}

SparqlKbClient::SparqlKbClient() : options_() {}
SparqlKbClient::SparqlKbClient(Options options)
    : options_(std::move(options)) {}

json SparqlKbClient::run_query(const std::string& sparql,
                               const std::string& what) {
  httplib::SSLClient client(options_.host);
  client.set_connection_timeout(20);
  client.set_read_timeout(60);
  httplib::Params params{{"query", sparql}, {"format", "json"}};
  httplib::Headers headers{{"Accept", "application/sparql-results+json"},
                           {"User-Agent", "archnet/1.0"}};
  auto res = client.Get(options_.path + "?" +
                            httplib::detail::params_to_query_str(params),
                        headers);
  if (!res || res->status != 200)
    throw IoError("SPARQL query for " + what + " failed (" +
                  (res ? "HTTP " + std::to_string(res->status)
                       : "transport error") +
                  "); retry later");
  try {
    return json::parse(res->body);
  } catch (const json::exception& e) {
    throw IoError("SPARQL response for " + what +
                  " is not valid JSON: " + e.what());
  }
}

std::vector<KbCandidate> SparqlKbClient::lookup_label(
    const std::string& label) {
  std::string escaped;
  for (char c : label) {
    if (c == '"' || c == '\\') escaped += '\\';
    escaped += c;
  }
  std::string values;
  for (const auto& lang : options_.languages) {
    values += " \"" + escaped + "\"@" + lang;
  }
  std::ostringstream q;
  q << "SELECT ?item ?itemLabel ?itemDescription "
       "(GROUP_CONCAT(DISTINCT ?occLabel; separator=\", \") AS ?occs) WHERE {"
    << " VALUES ?name {" << values << "}"
    << " ?item wdt:P31 wd:" << options_.instance_of << "."
    << " { ?item rdfs:label ?name. } UNION { ?item skos:altLabel ?name. }"
    << " OPTIONAL { ?item wdt:P106 ?occ. ?occ rdfs:label ?occLabel."
       " FILTER(LANG(?occLabel) = \"en\") }"
    << " SERVICE wikibase:label { bd:serviceParam wikibase:language \"en\". }"
    << " } GROUP BY ?item ?itemLabel ?itemDescription"
    << " LIMIT " << options_.limit;
  json doc = run_query(q.str(), "label \"" + label + "\"");

  std::vector<KbCandidate> candidates;
  try {
    for (const auto& row : doc.at("results").at("bindings")) {
      KbCandidate c;
      std::string uri = row.at("item").at("value").get<std::string>();
      c.kb_id = uri.substr(uri.find_last_of('/') + 1);
      if (row.contains("itemLabel"))
        c.label = row.at("itemLabel").at("value").get<std::string>();
      if (row.contains("itemDescription"))
        c.description = row.at("itemDescription").at("value").get<std::string>();
      if (row.contains("occs")) {
        std::string occs = row.at("occs").at("value").get<std::string>();
        std::size_t pos = 0;
        while (pos < occs.size()) {
          std::size_t comma = occs.find(", ", pos);
          std::string occ = occs.substr(
              pos, comma == std::string::npos ? std::string::npos : comma - pos);
          if (!occ.empty()) c.occupations.push_back(occ);
          if (comma == std::string::npos) break;
          pos = comma + 2;
        }
      }
      bool dup = std::any_of(candidates.begin(), candidates.end(),
                             [&](const KbCandidate& other) {
                               return other.kb_id == c.kb_id;
                             });
      if (!dup && !c.kb_id.empty()) candidates.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw IoError("unexpected SPARQL result shape for label \"" + label +
                  "\": " + e.what());
  }
  return candidates;
}

KbCandidate SparqlKbClient::fetch_entity(const std::string& kb_id) {
  std::ostringstream q;
  q << "SELECT ?itemLabel ?itemDescription "
       "(GROUP_CONCAT(DISTINCT ?occLabel; separator=\", \") AS ?occs) WHERE {"
    << " BIND(wd:" << kb_id << " AS ?item)"
    << " OPTIONAL { ?item wdt:P106 ?occ. ?occ rdfs:label ?occLabel."
       " FILTER(LANG(?occLabel) = \"en\") }"
    << " SERVICE wikibase:label { bd:serviceParam wikibase:language \"en\". }"
    << " } GROUP BY ?itemLabel ?itemDescription LIMIT 1";
  json doc = run_query(q.str(), "entity " + kb_id);
  KbCandidate c;
  c.kb_id = kb_id;
  try {
    const auto& bindings = doc.at("results").at("bindings");
    if (bindings.empty())
      throw IoError("entity " + kb_id + " not found in the knowledge base");
    const auto& row = bindings.at(0);
    if (row.contains("itemLabel"))
      c.label = row.at("itemLabel").at("value").get<std::string>();
    if (row.contains("itemDescription"))
      c.description = row.at("itemDescription").at("value").get<std::string>();
    if (row.contains("occs")) {
      std::string occs = row.at("occs").at("value").get<std::string>();
      std::size_t pos = 0;
      while (pos < occs.size()) {
        std::size_t comma = occs.find(", ", pos);
        std::string occ = occs.substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!occ.empty()) c.occupations.push_back(occ);
        if (comma == std::string::npos) break;
        pos = comma + 2;
      }
    }
  } catch (const json::exception& e) {
    throw IoError("unexpected SPARQL result shape for entity " + kb_id +
                  ": " + e.what());
  }
  return c;
}

std::optional<std::string> SparqlKbClient::fetch_country(
    const std::string& kb_id) {
  // Citizenship (P27) first, residence country (P551→P17 or direct) second.
  for (const char* prop : {"P27", "P551"}) {
    std::ostringstream q;
    q << "SELECT ?countryLabel WHERE { wd:" << kb_id << " wdt:" << prop
      << " ?country. SERVICE wikibase:label "
         "{ bd:serviceParam wikibase:language \"en\". } } LIMIT 1";
    json doc = run_query(q.str(), "country of " + kb_id);
    try {
      const auto& bindings = doc.at("results").at("bindings");
      if (!bindings.empty())
        return bindings.at(0).at("countryLabel").at("value").get<std::string>();
    } catch (const json::exception&) {
      continue;
    }
  }
  return std::nullopt;
}

std::vector<KbCandidate> generate_candidates(
    const AliasCluster& cluster, KbClient& client,
    const std::map<std::string, std::size_t>& surface_counts) {
  std::vector<std::string> order;
  order.push_back(cluster.canonical);
  std::vector<std::string> rest;
  for (const auto& member : cluster.members)
    if (member != cluster.canonical) rest.push_back(member);
  std::sort(rest.begin(), rest.end(), [&](const std::string& x,
                                          const std::string& y) {
    auto cx = surface_counts.count(x) ? surface_counts.at(x) : 0;
    auto cy = surface_counts.count(y) ? surface_counts.at(y) : 0;
    if (cx != cy) return cx > cy;
    return x < y;
  });
  order.insert(order.end(), rest.begin(), rest.end());

  for (const auto& name : order) {
    auto candidates = client.lookup_label(name);
    if (!candidates.empty()) return candidates;
  }
  return {};
}

Anchor make_anchor(const std::string& anchor_id, KbClient& client,
                   const EmbeddingProvider& provider) {
  KbCandidate entity = client.fetch_entity(anchor_id);
  Anchor anchor;
  anchor.kb_id = anchor_id;
  anchor.label = entity.label;
  anchor.description_embedding = provider.embed(entity.description);
  anchor.occupation_embedding =
      provider.embed(join_occupations(entity.occupations));
  return anchor;
}

std::optional<std::pair<std::string, double>> disambiguate(
    const std::vector<KbCandidate>& candidates, const Anchor& anchor,
    const EmbeddingProvider& provider) {
  if (candidates.empty()) return std::nullopt;
  const KbCandidate* best = nullptr;
  double best_score = 0.0;
  for (const auto& candidate : candidates) {
    double total = 0.0;
    int available = 0;
    if (!candidate.description.empty() && !anchor.description_embedding.zero()) {
      total += cosine(provider.embed(candidate.description),
                      anchor.description_embedding);
      ++available;
    }
    std::string occupations = join_occupations(candidate.occupations);
    if (!occupations.empty() && !anchor.occupation_embedding.zero()) {
      total += cosine(provider.embed(occupations), anchor.occupation_embedding);
      ++available;
    }
    double score = available == 0 ? 0.0 : total / available;
    if (best == nullptr || score > best_score ||
        (score == best_score && candidate.kb_id < best->kb_id)) {
      best = &candidate;
      best_score = score;
    }
  }
  return std::make_pair(best->kb_id, best_score);
}

std::vector<LinkedActor> link_entities(
    const AliasDictionary& aliases, const std::string& anchor_id,
    KbClient& client, const EmbeddingProvider& provider,
    const std::map<std::string, std::size_t>& surface_counts,
    const LinkOptions& options) {
  Anchor anchor = make_anchor(anchor_id, client, provider);
  std::string anchor_label_normalized = normalize_name(anchor.label);

  std::vector<LinkedActor> actors;
  for (const auto& cluster : aliases.clusters) {
    LinkedActor actor;
    actor.canonical_name = cluster.canonical;
    actor.aliases = cluster.members;

    if (!anchor_label_normalized.empty() &&
        normalize_name(cluster.canonical) == anchor_label_normalized) {
      actor.kb_id = anchor_id;  // manual anchoring pre-empts disambiguation
      actor.disambiguation_score = 1.0;
    } else {
      auto candidates = generate_candidates(cluster, client, surface_counts);
      auto choice = disambiguate(candidates, anchor, provider);
      if (!choice) continue;  // no candidates: the actor is discarded
      actor.kb_id = choice->first;
      actor.disambiguation_score = choice->second;
    }
    if (options.enrich_country) actor.country = client.fetch_country(*actor.kb_id);
    actors.push_back(std::move(actor));
  }
  // aliases.clusters is sorted by canonical, so actors already are too.
  return actors;
}

void save_linked_actors(const std::vector<LinkedActor>& actors,
                        const std::string& path) {
  std::ostringstream out;
  for (const LinkedActor& actor : actors) {
    json record{{"canonical", actor.canonical_name},
                {"aliases", actor.aliases},
                {"kb_id", actor.kb_id ? json(*actor.kb_id) : json(nullptr)},
                {"score", actor.disambiguation_score
                              ? json(*actor.disambiguation_score)
                              : json(nullptr)},
                {"country",
                 actor.country ? json(*actor.country) : json(nullptr)}};
    out << record.dump() << "\n";
  }
  write_file(path, out.str());
}

std::vector<LinkedActor> load_linked_actors(const std::string& path) {
  std::vector<LinkedActor> actors;
  for_each_jsonl(path, [&](const json& record, std::size_t lineno) {
    LinkedActor actor;
    try {
      actor.canonical_name = record.at("canonical").get<std::string>();
      actor.aliases = record.at("aliases").get<std::vector<std::string>>();
      if (record.contains("kb_id") && !record.at("kb_id").is_null())
        actor.kb_id = record.at("kb_id").get<std::string>();
      if (record.contains("score") && !record.at("score").is_null())
        actor.disambiguation_score = record.at("score").get<double>();
      if (record.contains("country") && !record.at("country").is_null())
        actor.country = record.at("country").get<std::string>();
    } catch (const json::exception& e) {
      throw ParseError(path, lineno, e.what());
    }
    if (actor.kb_id.has_value() != actor.disambiguation_score.has_value())
      throw ParseError(path, lineno,
                       "kb_id and score must be present or absent together");
    actors.push_back(std::move(actor));
  });
  std::sort(actors.begin(), actors.end(),
            [](const LinkedActor& a, const LinkedActor& b) {
              return a.canonical_name < b.canonical_name;
            });
  return actors;
}

}  // namespace archnet
