#include "archnet/network.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <thread>

#include "archnet/errors.hpp"
#include "archnet/io.hpp"
#include "archnet/text.hpp"

namespace archnet {

const std::map<std::string, long long> WeightedGraph::kNoNeighbors{};

void WeightedGraph::add_node(const std::string& id) {
  NodeInfo info;
  info.id = id;
  add_node(std::move(info));
}

void WeightedGraph::add_node(NodeInfo info) {
  if (info.id.empty()) throw ValidationError("node id must not be empty");
  auto [it, inserted] = nodes_.emplace(info.id, info);
  if (!inserted) {
    if (info.kb_id) it->second.kb_id = info.kb_id;
    if (info.country) it->second.country = info.country;
  }
  adj_[info.id];  // ensure an adjacency row exists
}

void WeightedGraph::add_edge(const std::string& u, const std::string& v,
                             long long weight) {
  if (u == v)
    throw ValidationError("self-loop on \"" + u + "\" is not allowed");
  if (weight < 1)
    throw ValidationError("edge weight must be positive, got " +
                          std::to_string(weight));
  add_node(u);
  add_node(v);
  adj_[u][v] += weight;
  adj_[v][u] += weight;
}

bool WeightedGraph::has_node(const std::string& id) const {
  return nodes_.count(id) > 0;
}

bool WeightedGraph::has_edge(const std::string& u,
                             const std::string& v) const {
  auto it = adj_.find(u);
  return it != adj_.end() && it->second.count(v) > 0;
}

long long WeightedGraph::weight(const std::string& u,
                                const std::string& v) const {
  auto it = adj_.find(u);
  if (it == adj_.end()) return 0;
  auto jt = it->second.find(v);
  return jt == it->second.end() ? 0 : jt->second;
}

std::size_t WeightedGraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& [id, row] : adj_) twice += row.size();
  return twice / 2;
}

long long WeightedGraph::total_weight() const {
  long long twice = 0;
  for (const auto& [id, row] : adj_)
    for (const auto& [other, w] : row) twice += w;
  return twice / 2;
}

std::vector<std::string> WeightedGraph::node_ids() const {
  std::vector<std::string> ids;
  ids.reserve(nodes_.size());
  for (const auto& [id, info] : nodes_) ids.push_back(id);
  return ids;
}

const NodeInfo& WeightedGraph::node(const std::string& id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end())
    throw ValidationError("unknown node \"" + id + "\"");
  return it->second;
}

const std::map<std::string, long long>& WeightedGraph::neighbors(
    const std::string& id) const {
  auto it = adj_.find(id);
  return it == adj_.end() ? kNoNeighbors : it->second;
}

std::vector<Edge> WeightedGraph::edges() const {
  std::vector<Edge> out;
  for (const auto& [u, row] : adj_)
    for (const auto& [v, w] : row)
      if (u < v) out.push_back(Edge{u, v, w});
  return out;
}

std::size_t WeightedGraph::degree(const std::string& id) const {
  return neighbors(id).size();
}

long long WeightedGraph::weighted_degree(const std::string& id) const {
  long long sum = 0;
  for (const auto& [other, w] : neighbors(id)) sum += w;
  return sum;
}

bool WeightedGraph::operator==(const WeightedGraph& other) const {
  if (adj_ != other.adj_) return false;
  if (nodes_.size() != other.nodes_.size()) return false;
  auto it = nodes_.begin();
  auto jt = other.nodes_.begin();
  for (; it != nodes_.end(); ++it, ++jt) {
    if (it->first != jt->first || it->second.kb_id != jt->second.kb_id ||
        it->second.country != jt->second.country)
      return false;
  }
  return true;
}

WeightedGraph build_cooccurrence(const std::vector<Document>& documents,
                                 const MentionSet& mentions,
                                 const AliasDictionary& aliases,
                                 const std::vector<LinkedActor>& actors) {
  std::map<std::string, const LinkedActor*> linkable;
  for (const LinkedActor& actor : actors)
    if (actor.kb_id) linkable[actor.canonical_name] = &actor;

  std::set<std::string> known_docs;
  for (const Document& doc : documents) known_docs.insert(doc.doc_id);

  // Distinct linked actors per document; resolution happens once up front.
  std::map<std::string, std::set<std::string>> doc_actors;
  for (const Mention& mention : mentions.mentions) {
    if (!known_docs.count(mention.doc_id)) continue;
    std::string canonical = aliases.resolve(mention.surface);
    if (linkable.count(canonical)) doc_actors[mention.doc_id].insert(canonical);
  }

  std::vector<const std::set<std::string>*> groups;
  groups.reserve(doc_actors.size());
  for (const auto& [doc_id, group] : doc_actors) groups.push_back(&group);

  using PairWeights = std::map<std::pair<std::string, std::string>, long long>;
  auto count_range = [&](std::size_t begin, std::size_t end) {
    PairWeights local;
    for (std::size_t g = begin; g < end; ++g) {
      const auto& group = *groups[g];
      for (auto it = group.begin(); it != group.end(); ++it)
        for (auto jt = std::next(it); jt != group.end(); ++jt)
          ++local[{*it, *jt}];
    }
    return local;
  };

  PairWeights weights;
  std::size_t workers = std::min<std::size_t>(
      {std::size_t{8}, std::max(1u, std::thread::hardware_concurrency()),
       groups.size()});
  if (groups.size() < 64 || workers < 2) {
    weights = count_range(0, groups.size());
  } else {
    // Weight merging is additive, so the split points never affect totals.
    std::vector<PairWeights> partial(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      std::size_t begin = groups.size() * w / workers;
      std::size_t end = groups.size() * (w + 1) / workers;
      pool.emplace_back(
          [&, w, begin, end] { partial[w] = count_range(begin, end); });
    }
    for (auto& t : pool) t.join();
    for (const auto& local : partial)
      for (const auto& [pair, w] : local) weights[pair] += w;
  }

  WeightedGraph graph;
  for (const auto& [doc_id, group] : doc_actors) {
    for (const std::string& canonical : group) {
      const LinkedActor* actor = linkable.at(canonical);
      NodeInfo info;
      info.id = canonical;
      info.kb_id = actor->kb_id;
      info.country = actor->country;
      graph.add_node(std::move(info));
    }
  }
  for (const auto& [pair, w] : weights)
    graph.add_edge(pair.first, pair.second, w);
  return graph;
}

WeightedGraph prune(const WeightedGraph& graph, long long min_weight,
                    bool keep_isolates) {
  if (min_weight < 1)
    throw ValidationError("min_weight must be at least 1, got " +
                          std::to_string(min_weight));
  WeightedGraph pruned;
  std::set<std::string> connected;
  for (const Edge& edge : graph.edges()) {
    if (edge.weight < min_weight) continue;
    connected.insert(edge.u);
    connected.insert(edge.v);
  }
  for (const std::string& id : graph.node_ids()) {
    if (keep_isolates || connected.count(id)) pruned.add_node(graph.node(id));
  }
  for (const Edge& edge : graph.edges())
    if (edge.weight >= min_weight) pruned.add_edge(edge.u, edge.v, edge.weight);
  return pruned;
}

WeightedGraph load_manual_network(const std::string& path,
                                  const AliasDictionary* aliases) {
  WeightedGraph graph;
  for_each_csv_row(
      path, {"sender", "receiver", "doc_id"},
      [&](const std::vector<std::string>& fields, std::size_t rowno) {
        std::string sender = trim(fields[0]);
        std::string receiver = trim(fields[1]);
        if (sender.empty() || receiver.empty())
          throw ParseError(path, rowno, "sender and receiver are required");
        if (aliases) {
          sender = aliases->resolve(sender);
          receiver = aliases->resolve(receiver);
        }
        if (sender == receiver) {
          log_warning(path + " row " + std::to_string(rowno) +
                      ": self-addressed letter skipped (" + sender + ")");
          return;
        }
        graph.add_edge(sender, receiver, 1);
      });
  return graph;
}

namespace {

std::string xml_escape(const std::string& raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string xml_unescape(const std::string& raw) {
  std::string out;
  out.reserve(raw.size());
  std::size_t i = 0;
  while (i < raw.size()) {
    if (raw[i] != '&') {
      out += raw[i++];
      continue;
    }
    std::size_t semi = raw.find(';', i);
    std::string entity =
        semi == std::string::npos ? "" : raw.substr(i, semi - i + 1);
    if (entity == "&amp;") out += '&';
    else if (entity == "&lt;") out += '<';
    else if (entity == "&gt;") out += '>';
    else if (entity == "&quot;") out += '"';
    else if (entity == "&apos;") out += '\'';
    else {
      out += raw[i++];
      continue;
    }
    i = semi + 1;
  }
  return out;
}

}  // namespace

void save_graphml(const WeightedGraph& graph, const std::string& path) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      << "  <key id=\"d0\" for=\"node\" attr.name=\"canonical\""
         " attr.type=\"string\"/>\n"
      << "  <key id=\"d1\" for=\"node\" attr.name=\"kb_id\""
         " attr.type=\"string\"/>\n"
      << "  <key id=\"d2\" for=\"node\" attr.name=\"country\""
         " attr.type=\"string\"/>\n"
      << "  <key id=\"d3\" for=\"edge\" attr.name=\"weight\""
         " attr.type=\"long\"/>\n"
      << "  <graph edgedefault=\"undirected\">\n";
  for (const std::string& id : graph.node_ids()) {
    const NodeInfo& info = graph.node(id);
    out << "    <node id=\"" << xml_escape(id) << "\">\n"
        << "      <data key=\"d0\">" << xml_escape(id) << "</data>\n";
    if (info.kb_id)
      out << "      <data key=\"d1\">" << xml_escape(*info.kb_id)
          << "</data>\n";
    if (info.country)
      out << "      <data key=\"d2\">" << xml_escape(*info.country)
          << "</data>\n";
    out << "    </node>\n";
  }
  for (const Edge& edge : graph.edges()) {
    out << "    <edge source=\"" << xml_escape(edge.u) << "\" target=\""
        << xml_escape(edge.v) << "\">\n"
        << "      <data key=\"d3\">" << edge.weight << "</data>\n"
        << "    </edge>\n";
  }
  out << "  </graph>\n</graphml>\n";
  write_file(path, out.str());
}

namespace {

// Minimal scanner for the GraphML subset emitted above.  Tags of interest
// appear whole on a line of their own, so the reader is line-oriented.
std::string attr_value(const std::string& line, const std::string& name,
                       const std::string& path) {
  std::string needle = name + "=\"";
  std::size_t start = line.find(needle);
  if (start == std::string::npos)
    throw ParseError(path, 0, "missing attribute " + name + " in: " + line);
  start += needle.size();
  std::size_t end = line.find('"', start);
  if (end == std::string::npos)
    throw ParseError(path, 0, "unterminated attribute in: " + line);
  return xml_unescape(line.substr(start, end - start));
}

std::string data_value(const std::string& line) {
  std::size_t open = line.find('>');
  std::size_t close = line.rfind("</data>");
  if (open == std::string::npos || close == std::string::npos ||
      close <= open)
    return "";
  return xml_unescape(line.substr(open + 1, close - open - 1));
}

}  // namespace

WeightedGraph load_graphml(const std::string& path) {
  std::string content = read_file(path);
  if (content.find("<graphml") == std::string::npos)
    throw ParseError(path, 0, "not a GraphML document");
  std::istringstream in(content);
  WeightedGraph graph;
  std::string line;
  std::optional<NodeInfo> node;
  std::optional<Edge> edge;
  while (std::getline(in, line)) {
    std::string body = trim(line);
    if (body.rfind("<node ", 0) == 0) {
      node = NodeInfo{};
      node->id = attr_value(body, "id", path);
      if (body.back() == '/' || body.find("/>") != std::string::npos) {
        graph.add_node(*node);
        node.reset();
      }
    } else if (body == "</node>") {
      if (node) graph.add_node(*node);
      node.reset();
    } else if (body.rfind("<edge ", 0) == 0) {
      edge = Edge{};
      edge->u = attr_value(body, "source", path);
      edge->v = attr_value(body, "target", path);
      edge->weight = 1;
    } else if (body == "</edge>") {
      if (edge) graph.add_edge(edge->u, edge->v, edge->weight);
      edge.reset();
    } else if (body.rfind("<data ", 0) == 0) {
      std::string key = attr_value(body, "key", path);
      std::string value = data_value(body);
      if (edge && key == "d3") {
        try {
          edge->weight = std::stoll(value);
        } catch (const std::exception&) {
          throw ParseError(path, 0, "bad edge weight \"" + value + "\"");
        }
      } else if (node && key == "d1") {
        node->kb_id = value;
      } else if (node && key == "d2") {
        node->country = value;
      }
      // d0 repeats the node id; nothing to record.
    }
  }
  return graph;
}

void save_node_link_json(const WeightedGraph& graph, const std::string& path) {
  json nodes = json::array();
  for (const std::string& id : graph.node_ids()) {
    const NodeInfo& info = graph.node(id);
    nodes.push_back(json{
        {"id", id},
        {"kb_id", info.kb_id ? json(*info.kb_id) : json(nullptr)},
        {"country", info.country ? json(*info.country) : json(nullptr)}});
  }
  json links = json::array();
  for (const Edge& edge : graph.edges())
    links.push_back(json{
        {"source", edge.u}, {"target", edge.v}, {"weight", edge.weight}});
  json doc{{"directed", false}, {"nodes", nodes}, {"links", links}};
  write_file(path, doc.dump(2) + "\n");
}

void save_dot(const WeightedGraph& graph, const std::string& path) {
  auto quote = [](const std::string& raw) {
    std::string out = "\"";
    for (char c : raw) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    return out + "\"";
  };
  std::ostringstream out;
  out << "graph archnet {\n";
  for (const std::string& id : graph.node_ids())
    out << "  " << quote(id) << ";\n";
  for (const Edge& edge : graph.edges())
    out << "  " << quote(edge.u) << " -- " << quote(edge.v) << " [weight="
        << edge.weight << ", label=" << edge.weight << "];\n";
  out << "}\n";
  write_file(path, out.str());
}

}  // namespace archnet
