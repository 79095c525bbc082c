#include "archnet/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "archnet/errors.hpp"

namespace archnet {

namespace {

// Index view of the graph: node i is node_ids()[i], so index order equals
// lexicographic id order and every loop below is deterministic.
struct IndexedGraph {
  std::vector<std::string> ids;
  std::vector<std::vector<std::pair<int, double>>> adj;
  std::size_t n = 0;
};

IndexedGraph index_graph(const WeightedGraph& graph) {
  IndexedGraph ig;
  ig.ids = graph.node_ids();
  ig.n = ig.ids.size();
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < ig.n; ++i) index[ig.ids[i]] = static_cast<int>(i);
  ig.adj.resize(ig.n);
  for (std::size_t i = 0; i < ig.n; ++i) {
    for (const auto& [other, w] : graph.neighbors(ig.ids[i]))
      ig.adj[i].emplace_back(index.at(other), static_cast<double>(w));
  }
  return ig;
}

std::vector<int> component_labels(const IndexedGraph& ig) {
  std::vector<int> comp(ig.n, -1);
  int next = 0;
  std::vector<int> stack;
  for (std::size_t s = 0; s < ig.n; ++s) {
    if (comp[s] != -1) continue;
    comp[s] = next;
    stack.push_back(static_cast<int>(s));
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (const auto& [v, w] : ig.adj[u]) {
        if (comp[v] == -1) {
          comp[v] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  return comp;
}

// Everything a single-source BFS yields: Brandes dependencies, the distance
// sum for closeness, and the eccentricity for the diameter.
struct SourceBundle {
  std::vector<double> delta;
  double dist_sum = 0.0;
  long long ecc = 0;
};

SourceBundle bfs_bundle(const IndexedGraph& ig, int s) {
  const std::size_t n = ig.n;
  SourceBundle out;
  out.delta.assign(n, 0.0);
  std::vector<long long> dist(n, -1);
  std::vector<double> sigma(n, 0.0);
  std::vector<int> order;
  order.reserve(n);

  dist[s] = 0;
  sigma[s] = 1.0;
  std::size_t head = 0;
  order.push_back(s);
  while (head < order.size()) {
    int u = order[head++];
    for (const auto& [v, w] : ig.adj[u]) {
      if (dist[v] == -1) {
        dist[v] = dist[u] + 1;
        order.push_back(v);
      }
      if (dist[v] == dist[u] + 1) sigma[v] += sigma[u];
    }
  }

  for (std::size_t i = order.size(); i-- > 0;) {
    int w = order[i];
    for (const auto& [v, weight] : ig.adj[w]) {
      if (dist[v] == dist[w] - 1)
        out.delta[v] += sigma[v] / sigma[w] * (1.0 + out.delta[w]);
    }
    if (w != s) {
      out.dist_sum += static_cast<double>(dist[w]);
      out.ecc = std::max(out.ecc, dist[w]);
    }
  }
  return out;
}

// One slot per source keeps the reduction order independent of scheduling.
std::vector<SourceBundle> all_source_bundles(const IndexedGraph& ig) {
  std::vector<SourceBundle> bundles(ig.n);
  std::size_t workers = std::min<std::size_t>(
      {std::size_t{8}, std::max(1u, std::thread::hardware_concurrency()),
       ig.n});
  if (ig.n < 64 || workers < 2) {
    for (std::size_t s = 0; s < ig.n; ++s)
      bundles[s] = bfs_bundle(ig, static_cast<int>(s));
    return bundles;
  }
  std::vector<std::thread> pool;
  std::atomic<std::size_t> cursor{0};
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        std::size_t s = cursor.fetch_add(1);
        if (s >= ig.n) return;
        bundles[s] = bfs_bundle(ig, static_cast<int>(s));
      }
    });
  }
  for (auto& t : pool) t.join();
  return bundles;
}

std::vector<double> eigenvector_values(const IndexedGraph& ig,
                                       const AnalysisOptions& options) {
  const std::size_t n = ig.n;
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> u(n);
  for (std::size_t iter = 1; iter <= options.eigenvector_max_iterations;
       ++iter) {
    // One step of (A + I)v: the +I shift keeps the dominant eigenvector of
    // A dominant for the iteration even on bipartite graphs, where bare-A
    // iteration oscillates forever.
    for (std::size_t i = 0; i < n; ++i) {
      u[i] = v[i];
      for (const auto& [j, w] : ig.adj[i])
        u[i] += (options.weighted_eigenvector ? w : 1.0) * v[j];
    }
    double norm = 0.0;
    for (double x : u) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : u) x /= norm;
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      diff += (u[i] - v[i]) * (u[i] - v[i]);
    v = u;
    if (std::sqrt(diff) <= options.eigenvector_tolerance) return v;
  }
  throw ConvergenceError(
      "eigenvector power iteration did not converge",
      options.eigenvector_max_iterations);
}

std::vector<std::vector<std::string>> sorted_partition(
    const IndexedGraph& ig, const std::map<int, std::vector<int>>& groups) {
  std::vector<std::vector<std::string>> partition;
  for (const auto& [id, members] : groups) {
    std::vector<std::string> names;
    names.reserve(members.size());
    for (int m : members) names.push_back(ig.ids[m]);
    std::sort(names.begin(), names.end());
    partition.push_back(std::move(names));
  }
  std::sort(partition.begin(), partition.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return partition;
}

void require_non_empty(const WeightedGraph& graph) {
  if (graph.node_count() == 0) throw EmptyGraphError("graph is empty");
}

}  // namespace

std::vector<std::vector<std::string>> connected_components(
    const WeightedGraph& graph) {
  IndexedGraph ig = index_graph(graph);
  std::vector<int> comp = component_labels(ig);
  std::map<int, std::vector<int>> groups;
  for (std::size_t i = 0; i < ig.n; ++i)
    groups[comp[i]].push_back(static_cast<int>(i));
  return sorted_partition(ig, groups);
}

std::map<std::string, Centrality> centralities(const WeightedGraph& graph,
                                               const AnalysisOptions& options) {
  require_non_empty(graph);
  IndexedGraph ig = index_graph(graph);
  const std::size_t n = ig.n;
  std::vector<int> comp = component_labels(ig);
  std::vector<std::size_t> comp_size;
  for (int c : comp) {
    if (static_cast<std::size_t>(c) >= comp_size.size())
      comp_size.resize(c + 1, 0);
    ++comp_size[c];
  }

  std::vector<SourceBundle> bundles = all_source_bundles(ig);
  std::vector<double> bc(n, 0.0);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t v = 0; v < n; ++v)
      if (v != s) bc[v] += bundles[s].delta[v];  // sources earn no dependency

  std::vector<double> eigen = eigenvector_values(ig, options);

  std::map<std::string, Centrality> out;
  for (std::size_t i = 0; i < n; ++i) {
    Centrality c;
    c.degree = n > 1 ? static_cast<double>(ig.adj[i].size()) /
                           static_cast<double>(n - 1)
                     : 0.0;
    for (const auto& [j, w] : ig.adj[i]) c.weighted_degree += w;
    // Brandes sums ordered-pair dependencies, i.e. each unordered pair
    // twice, so bc/((n-1)(n-2)) equals (bc/2) * 2/((n-1)(n-2)).
    c.betweenness =
        n > 2 ? bc[i] / (static_cast<double>(n - 1) * static_cast<double>(n - 2))
              : 0.0;
    std::size_t k = comp_size[comp[i]];
    if (k > 1 && n > 1) {
      double kk = static_cast<double>(k - 1);
      c.closeness = (kk / static_cast<double>(n - 1)) *
                    (kk / bundles[i].dist_sum);
    }
    c.eigenvector = eigen[i];
    out[ig.ids[i]] = c;
  }
  return out;
}

std::vector<CentralityProfile> centrality_profile(
    const WeightedGraph& graph, std::size_t k,
    const AnalysisOptions& options) {
  if (k < 1) throw ValidationError("k must be at least 1");
  auto cents = centralities(graph, options);

  Centrality maxima;
  for (const auto& [node, c] : cents) {
    maxima.degree = std::max(maxima.degree, c.degree);
    maxima.weighted_degree = std::max(maxima.weighted_degree, c.weighted_degree);
    maxima.betweenness = std::max(maxima.betweenness, c.betweenness);
    maxima.closeness = std::max(maxima.closeness, c.closeness);
    maxima.eigenvector = std::max(maxima.eigenvector, c.eigenvector);
  }
  auto norm = [](double value, double max) {
    return max > 0.0 ? value / max : 0.0;  // an all-zero measure stays zero
  };

  std::vector<CentralityProfile> profiles;
  for (const auto& [node, c] : cents) {
    CentralityProfile p;
    p.node = node;
    p.raw = c;
    p.normalized.degree = norm(c.degree, maxima.degree);
    p.normalized.weighted_degree = norm(c.weighted_degree, maxima.weighted_degree);
    p.normalized.betweenness = norm(c.betweenness, maxima.betweenness);
    p.normalized.closeness = norm(c.closeness, maxima.closeness);
    p.normalized.eigenvector = norm(c.eigenvector, maxima.eigenvector);
    p.composite = p.normalized.degree + p.normalized.weighted_degree +
                  p.normalized.betweenness + p.normalized.closeness +
                  p.normalized.eigenvector;
    profiles.push_back(std::move(p));
  }
  std::sort(profiles.begin(), profiles.end(),
            [](const CentralityProfile& a, const CentralityProfile& b) {
              if (a.composite != b.composite) return a.composite > b.composite;
              return a.node < b.node;
            });
  if (profiles.size() > k) profiles.resize(k);
  return profiles;
}

double modularity(const WeightedGraph& graph,
                  const std::vector<std::vector<std::string>>& partition) {
  std::map<std::string, std::size_t> community_of;
  for (std::size_t c = 0; c < partition.size(); ++c) {
    for (const std::string& node : partition[c]) {
      if (!graph.has_node(node))
        throw ValidationError("partition names unknown node \"" + node + "\"");
      if (!community_of.emplace(node, c).second)
        throw ValidationError("node \"" + node +
                              "\" appears twice in the partition");
    }
  }
  if (community_of.size() != graph.node_count())
    throw ValidationError("partition does not cover every node");

  double W = static_cast<double>(graph.total_weight());
  if (W == 0.0) return 0.0;

  std::vector<double> internal(partition.size(), 0.0);
  std::vector<double> strength(partition.size(), 0.0);
  for (const Edge& e : graph.edges()) {
    std::size_t cu = community_of.at(e.u);
    if (cu == community_of.at(e.v)) internal[cu] += static_cast<double>(e.weight);
  }
  for (const auto& [node, c] : community_of)
    strength[c] += static_cast<double>(graph.weighted_degree(node));

  double q = 0.0;
  for (std::size_t c = 0; c < partition.size(); ++c) {
    double frac = strength[c] / (2.0 * W);
    q += internal[c] / W - frac * frac;
  }
  return q;
}

CommunityResult communities(const WeightedGraph& graph) {
  require_non_empty(graph);
  IndexedGraph ig = index_graph(graph);
  const std::size_t n = ig.n;
  double W = static_cast<double>(graph.total_weight());

  std::map<int, std::vector<int>> members;
  for (std::size_t i = 0; i < n; ++i) members[static_cast<int>(i)] = {
      static_cast<int>(i)};

  CommunityResult result;
  if (W == 0.0) {  // no edges: modularity is 0 for any split, keep singletons
    result.partition = sorted_partition(ig, members);
    result.modularity = 0.0;
    return result;
  }

  std::map<int, double> strength;
  std::map<int, double> internal;
  std::map<int, std::map<int, double>> between;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (const auto& [j, w] : ig.adj[i]) {
      s += w;
      if (static_cast<int>(i) < j) {
        between[static_cast<int>(i)][j] += w;
        between[j][static_cast<int>(i)] += w;
      }
    }
    strength[static_cast<int>(i)] = s;
    internal[static_cast<int>(i)] = 0.0;
  }

  double q = 0.0;
  for (const auto& [c, s] : strength) q -= (s / (2.0 * W)) * (s / (2.0 * W));
  double best_q = q;
  std::map<int, std::vector<int>> best_members = members;

  while (members.size() > 1) {
    int best_c = -1, best_d = -1;
    double best_gain = 0.0;
    bool found = false;
    for (const auto& [c, row] : between) {
      for (const auto& [d, w_cd] : row) {
        if (c >= d) continue;
        double gain =
            w_cd / W - strength[c] * strength[d] / (2.0 * W * W);
        if (!found || gain > best_gain ||
            (gain == best_gain &&
             std::make_pair(c, d) < std::make_pair(best_c, best_d))) {
          found = true;
          best_gain = gain;
          best_c = c;
          best_d = d;
        }
      }
    }
    if (!found) break;  // remaining communities are mutually disconnected

    int c = best_c, d = best_d;
    double w_cd = between[c][d];
    internal[c] += internal[d] + w_cd;
    strength[c] += strength[d];
    auto& into = members[c];
    into.insert(into.end(), members[d].begin(), members[d].end());
    members.erase(d);
    internal.erase(d);
    strength.erase(d);
    between[c].erase(d);
    for (const auto& [x, w] : between[d]) {
      if (x == c) continue;
      between[c][x] += w;
      between[x][c] += w;
      between[x].erase(d);
    }
    between.erase(d);
    if (between[c].empty()) between.erase(c);

    q += best_gain;
    if (q > best_q) {
      best_q = q;
      best_members = members;
    }
  }

  result.partition = sorted_partition(ig, best_members);
  // Recompute exactly on the chosen partition; the incremental q above only
  // steers the greedy walk.
  result.modularity = modularity(graph, result.partition);
  return result;
}

GraphStats graph_stats(const WeightedGraph& graph) {
  require_non_empty(graph);
  IndexedGraph ig = index_graph(graph);
  const std::size_t n = ig.n;
  std::vector<int> comp = component_labels(ig);
  std::vector<std::size_t> comp_size;
  for (int c : comp) {
    if (static_cast<std::size_t>(c) >= comp_size.size())
      comp_size.resize(c + 1, 0);
    ++comp_size[c];
  }

  GraphStats stats;
  stats.num_nodes = n;
  stats.num_components = comp_size.size();
  double m = static_cast<double>(graph.edge_count());
  double W = static_cast<double>(graph.total_weight());
  stats.avg_degree = 2.0 * m / static_cast<double>(n);
  stats.avg_weighted_degree = 2.0 * W / static_cast<double>(n);
  stats.density =
      n > 1 ? 2.0 * m / (static_cast<double>(n) * static_cast<double>(n - 1))
            : 0.0;

  // Diameter: max eccentricity over all components of maximum size (several
  // components can tie for largest).
  std::size_t largest = *std::max_element(comp_size.begin(), comp_size.end());
  std::vector<SourceBundle> bundles = all_source_bundles(ig);
  for (std::size_t i = 0; i < n; ++i)
    if (comp_size[comp[i]] == largest)
      stats.diameter = std::max(stats.diameter, bundles[i].ecc);

  double clustering_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t deg = ig.adj[i].size();
    if (deg < 2) continue;
    std::size_t triangles = 0;
    for (std::size_t a = 0; a < deg; ++a)
      for (std::size_t b = a + 1; b < deg; ++b)
        if (graph.has_edge(ig.ids[ig.adj[i][a].first],
                           ig.ids[ig.adj[i][b].first]))
          ++triangles;
    clustering_sum += 2.0 * static_cast<double>(triangles) /
                      (static_cast<double>(deg) * static_cast<double>(deg - 1));
  }
  stats.avg_clustering = clustering_sum / static_cast<double>(n);
  stats.modularity = communities(graph).modularity;
  return stats;
}

}  // namespace archnet
