#include "archnet/linkage.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "archnet/io.hpp"
#include "archnet/similarity.hpp"
#include "archnet/text.hpp"

namespace archnet {

namespace {

// Plain union-find with path halving.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

struct PreparedName {
  NameParts parts;
  std::u32string normalized, prefix, lastname;
};

PreparedName prepare(const std::string& surface,
                     const std::vector<std::string>& infixes) {
  PreparedName p;
  p.parts = split_name(surface, infixes);
  p.normalized = decode_utf8(p.parts.normalized);
  p.prefix = decode_utf8(p.parts.prefix);
  p.lastname = decode_utf8(p.parts.lastname);
  return p;
}

SimilarityScores score_prepared(const PreparedName& a, const PreparedName& b,
                                const LinkageWeights& w) {
  SimilarityScores s;
  s.lastname_score = ratio(a.lastname, b.lastname);
  s.prefix_score = ratio(a.prefix, b.prefix);
  s.substring_score = partial_ratio(a.normalized, b.normalized);
  s.total_score = w.lastname * s.lastname_score + w.prefix * s.prefix_score +
                  w.substring * s.substring_score;
  return s;
}

}  // namespace

void LinkageWeights::validate() const {
  if (lastname < 0 || prefix < 0 || substring < 0)
    throw ValidationError("similarity weights must be non-negative");
  if (std::abs(lastname + prefix + substring - 1.0) > 1e-9)
    throw ValidationError("similarity weights must sum to 1");
}

Blocking blocking_from_string(std::string_view s) {
  if (s == "none") return Blocking::kNone;
  if (s == "lastname_initial") return Blocking::kLastnameInitial;
  throw ValidationError("unknown blocking mode \"" + std::string(s) + "\"");
}

std::string to_string(Blocking blocking) {
  return blocking == Blocking::kNone ? "none" : "lastname_initial";
}

const std::vector<std::string>& default_infixes() {
  static const std::vector<std::string> infixes = {
      "van", "de", "der", "den", "van der", "van den", "van de",
      "ten", "ter", "te", "op", "in", "'t"};
  return infixes;
}

NameParts split_name(std::string_view surface,
                     const std::vector<std::string>& infixes) {
  NameParts parts;
  parts.raw = std::string(surface);
  parts.normalized = normalize_name(surface);
  if (parts.normalized.empty())
    throw EmptyNameError("name \"" + parts.raw +
                         "\" is empty after normalization");

  std::unordered_set<std::string> infix_tokens;
  for (const auto& infix : infixes)
    for (auto& token : split_tokens(normalize_name(infix)))
      infix_tokens.insert(std::move(token));

  std::vector<std::string> tokens = split_tokens(parts.normalized);
  std::size_t first_last = tokens.size() - 1;  // index of first lastname token
  while (first_last > 0 && infix_tokens.count(tokens[first_last - 1]))
    --first_last;

  std::string prefix, lastname;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::string& out = i < first_last ? prefix : lastname;
    if (!out.empty()) out += ' ';
    out += tokens[i];
  }
  parts.prefix = std::move(prefix);
  parts.lastname = std::move(lastname);
  return parts;
}

SimilarityScores score_pair(const NameParts& a, const NameParts& b,
                            const LinkageWeights& weights) {
  SimilarityScores s;
  s.lastname_score = ratio(a.lastname, b.lastname);
  s.prefix_score = ratio(a.prefix, b.prefix);
  s.substring_score = partial_ratio(a.normalized, b.normalized);
  s.total_score = weights.lastname * s.lastname_score +
                  weights.prefix * s.prefix_score +
                  weights.substring * s.substring_score;
  return s;
}

SimilarityTable build_similarity_table(const MentionSet& mentions,
                                       Blocking blocking,
                                       const LinkageWeights& weights,
                                       unsigned threads) {
  std::vector<std::string> surfaces;
  surfaces.reserve(mentions.surface_counts.size());
  for (const auto& [surface, count] : mentions.surface_counts)
    surfaces.push_back(surface);

  std::vector<PreparedName> prepared;
  prepared.reserve(surfaces.size());
  for (const auto& s : surfaces) prepared.push_back(prepare(s, default_infixes()));

  std::vector<std::pair<std::size_t, std::size_t>> todo;
  for (std::size_t i = 0; i < surfaces.size(); ++i) {
    for (std::size_t j = i + 1; j < surfaces.size(); ++j) {
      if (blocking == Blocking::kLastnameInitial) {
        if (prepared[i].lastname.empty() || prepared[j].lastname.empty())
          continue;
        if (prepared[i].lastname[0] != prepared[j].lastname[0]) continue;
      }
      todo.emplace_back(i, j);
    }
  }

  SimilarityTable table;
  table.pairs.resize(todo.size());
  auto score_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      auto [i, j] = todo[k];
      table.pairs[k].a = surfaces[i];
      table.pairs[k].b = surfaces[j];
      table.pairs[k].scores = score_prepared(prepared[i], prepared[j], weights);
    }
  };

  if (threads == 0) {
    unsigned hw = std::thread::hardware_concurrency();
    threads = hw == 0 ? 1 : hw;
  }
  threads = std::min<unsigned>({threads, 8u,
                                static_cast<unsigned>(todo.size() / 4096 + 1)});
  if (threads <= 1) {
    score_range(0, todo.size());
  } else {
    // Fixed slot per pair: identical output for any thread count.
    std::vector<std::thread> workers;
    std::size_t chunk = (todo.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      std::size_t begin = t * chunk;
      std::size_t end = std::min(todo.size(), begin + chunk);
      if (begin < end) workers.emplace_back(score_range, begin, end);
    }
    for (auto& w : workers) w.join();
  }
  return table;
}

std::string canonical_form(const std::vector<std::string>& members,
                           const std::map<std::string, std::size_t>& counts,
                           const std::set<std::string>& seed_targets) {
  if (members.empty())
    throw ValidationError("canonical_form on an empty cluster");
  std::vector<std::string> pool;
  for (const auto& m : members)
    if (seed_targets.count(m)) pool.push_back(m);
  if (pool.empty()) pool = members;

  const std::string* best = nullptr;
  std::size_t best_count = 0, best_len = 0;
  for (const auto& m : pool) {
    auto it = counts.find(m);
    std::size_t count = it == counts.end() ? 0 : it->second;
    std::size_t len = length_points(m);
    if (best == nullptr || count > best_count ||
        (count == best_count &&
         (len > best_len || (len == best_len && m < *best)))) {
      best = &m;
      best_count = count;
      best_len = len;
    }
  }
  return *best;
}

AliasDictionary link_records(const MentionSet& mentions,
                             const SimilarityTable& table, double threshold,
                             const std::vector<SeedAlias>& seeds) {
  if (threshold < 0.0 || threshold > 100.0)
    throw ValidationError("linkage threshold must lie in [0, 100]");

  std::map<std::string, std::size_t> counts = mentions.surface_counts;
  std::set<std::string> seed_targets;
  for (const auto& seed : seeds) {
    counts.emplace(seed.alias, 0);
    counts.emplace(seed.canonical, 0);
    seed_targets.insert(seed.canonical);
  }

  std::vector<std::string> surfaces;
  std::map<std::string, std::size_t> position;
  for (const auto& [surface, count] : counts) {
    position.emplace(surface, surfaces.size());
    surfaces.push_back(surface);
  }

  UnionFind uf(surfaces.size());
  for (const auto& seed : seeds)
    uf.unite(position.at(seed.alias), position.at(seed.canonical));

  // Best match per surface: highest total, ties to the lexicographically
  // smaller partner (the table is sorted, so first-seen wins ties).
  struct Best {
    double score = -1.0;
    std::size_t partner = 0;
  };
  std::vector<Best> best(surfaces.size());
  auto offer = [&](std::size_t s, std::size_t partner, double score) {
    if (score > best[s].score) best[s] = {score, partner};
  };
  for (const auto& pair : table.pairs) {
    auto ia = position.find(pair.a);
    auto ib = position.find(pair.b);
    if (ia == position.end() || ib == position.end()) continue;
    offer(ia->second, ib->second, pair.scores.total_score);
    offer(ib->second, ia->second, pair.scores.total_score);
  }
  for (std::size_t s = 0; s < surfaces.size(); ++s)
    if (best[s].score >= threshold) uf.unite(s, best[s].partner);

  std::map<std::size_t, std::vector<std::string>> groups;
  for (std::size_t s = 0; s < surfaces.size(); ++s)
    groups[uf.find(s)].push_back(surfaces[s]);

  AliasDictionary dict;
  for (auto& [root, members] : groups) {
    AliasCluster cluster;
    cluster.members = std::move(members);  // sorted: surfaces were sorted
    cluster.canonical = canonical_form(cluster.members, counts, seed_targets);
    dict.clusters.push_back(std::move(cluster));
  }
  std::sort(dict.clusters.begin(), dict.clusters.end(),
            [](const AliasCluster& x, const AliasCluster& y) {
              return x.canonical < y.canonical;
            });
  dict.rebuild_index();
  return dict;
}

std::string AliasDictionary::resolve(const std::string& surface) const {
  auto it = index_.find(surface);
  return it == index_.end() ? surface : clusters[it->second].canonical;
}

std::size_t AliasDictionary::surface_count() const { return index_.size(); }

void AliasDictionary::rebuild_index() {
  index_.clear();
  for (std::size_t c = 0; c < clusters.size(); ++c)
    for (const auto& member : clusters[c].members) index_.emplace(member, c);
}

std::vector<SeedAlias> load_seed_aliases(const std::string& path) {
  std::vector<SeedAlias> seeds;
  for_each_csv_row(path, {"alias", "canonical"},
                   [&](const std::vector<std::string>& fields, std::size_t) {
                     SeedAlias seed{trim(fields[0]), trim(fields[1])};
                     if (!seed.alias.empty() && !seed.canonical.empty())
                       seeds.push_back(std::move(seed));
                   });
  return seeds;
}

void save_alias_dictionary(const AliasDictionary& dict,
                           const std::string& path) {
  json clusters = json::array();
  for (const auto& cluster : dict.clusters) {
    clusters.push_back(
        json{{"canonical", cluster.canonical}, {"aliases", cluster.members}});
  }
  write_file(path, json{{"clusters", clusters}}.dump(2) + "\n");
}

AliasDictionary load_alias_dictionary(const std::string& path) {
  AliasDictionary dict;
  json doc = json::parse(read_file(path));
  for (const auto& entry : doc.at("clusters")) {
    AliasCluster cluster;
    cluster.canonical = entry.at("canonical").get<std::string>();
    cluster.members = entry.at("aliases").get<std::vector<std::string>>();
    std::sort(cluster.members.begin(), cluster.members.end());
    if (!std::binary_search(cluster.members.begin(), cluster.members.end(),
                            cluster.canonical))
      throw ValidationError("canonical \"" + cluster.canonical +
                            "\" is not a member of its cluster");
    dict.clusters.push_back(std::move(cluster));
  }
  std::sort(dict.clusters.begin(), dict.clusters.end(),
            [](const AliasCluster& x, const AliasCluster& y) {
              return x.canonical < y.canonical;
            });
  dict.rebuild_index();
  return dict;
}

}  // namespace archnet
