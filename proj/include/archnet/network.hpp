#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "archnet/kblink.hpp"
#include "archnet/linkage.hpp"
#include "archnet/ner.hpp"

namespace archnet {

struct NodeInfo {
  std::string id;  // canonical actor name
  std::optional<std::string> kb_id;
  std::optional<std::string> country;
};

struct Edge {
  std::string u, v;  // u < v
  long long weight = 0;
};

// Simple undirected graph with positive integer edge weights.  Storage is
// ordered maps throughout so every traversal is deterministic.
class WeightedGraph {
 public:
  // Upserts: attributes overwrite only when the incoming ones are present.
  void add_node(const std::string& id);
  void add_node(NodeInfo info);
  // Accumulates onto any existing edge and creates missing endpoints.
  // Invariants enforced here: no self-loops, weight ≥ 1.
  void add_edge(const std::string& u, const std::string& v,
                long long weight = 1);

  bool has_node(const std::string& id) const;
  bool has_edge(const std::string& u, const std::string& v) const;
  long long weight(const std::string& u, const std::string& v) const;

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const;
  long long total_weight() const;  // sum over distinct edges

  std::vector<std::string> node_ids() const;
  const NodeInfo& node(const std::string& id) const;
  const std::map<std::string, long long>& neighbors(
      const std::string& id) const;
  std::vector<Edge> edges() const;  // sorted by (u, v)

  std::size_t degree(const std::string& id) const;
  long long weighted_degree(const std::string& id) const;

  bool operator==(const WeightedGraph& other) const;

 private:
  std::map<std::string, NodeInfo> nodes_;
  std::map<std::string, std::map<std::string, long long>> adj_;
  static const std::map<std::string, long long> kNoNeighbors;
};

// Document-level co-occurrence: every unordered pair of distinct linked
// actors mentioned in the same document gains +1.  Mentions resolve through
// the alias dictionary; actors without a knowledge-base link are excluded.
WeightedGraph build_cooccurrence(const std::vector<Document>& documents,
                                 const MentionSet& mentions,
                                 const AliasDictionary& aliases,
                                 const std::vector<LinkedActor>& actors);

// Drops edges below min_weight, then (by default) nodes left isolated.
WeightedGraph prune(const WeightedGraph& graph, long long min_weight,
                    bool keep_isolates = false);

// Sender/receiver CSV (header sender,receiver,doc_id); one letter = +1 on
// the undirected pair.  Names resolve through the dictionary when given;
// unknown names stand for themselves.  Self-addressed rows are skipped.
WeightedGraph load_manual_network(const std::string& path,
                                  const AliasDictionary* aliases = nullptr);

// Serialization.  GraphML carries node attributes canonical/kb_id/country
// and the edge weight; load_graphml reads exactly what save_graphml writes.
void save_graphml(const WeightedGraph& graph, const std::string& path);
WeightedGraph load_graphml(const std::string& path);
void save_node_link_json(const WeightedGraph& graph, const std::string& path);
void save_dot(const WeightedGraph& graph, const std::string& path);

}  // namespace archnet
