#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "archnet/network.hpp"

namespace archnet {

struct GraphStats {
  std::size_t num_components = 0;
  std::size_t num_nodes = 0;
  double avg_degree = 0.0;
  double avg_weighted_degree = 0.0;
  double density = 0.0;          // 2m / (n(n-1)), 0 for n < 2
  long long diameter = 0;        // hop-count, largest component
  double avg_clustering = 0.0;   // degree-<2 nodes contribute 0
  double modularity = 0.0;       // of the communities() partition
};

struct Centrality {
  double degree = 0.0;           // degree / (n-1)
  double weighted_degree = 0.0;  // sum of incident weights
  double betweenness = 0.0;      // Brandes, x 2/((n-1)(n-2))
  double closeness = 0.0;        // per-component, x (k-1)/(n-1)
  double eigenvector = 0.0;      // L2-normalized dominant eigenvector
};

struct CentralityProfile {
  std::string node;
  Centrality raw;
  Centrality normalized;  // each measure divided by its max; all-zero stays 0
  double composite = 0.0;  // sum of the five normalized values, in [0, 5]
};

struct CommunityResult {
  // Members sorted within each community; communities by first member.
  std::vector<std::vector<std::string>> partition;
  double modularity = 0.0;
};

struct AnalysisOptions {
  double eigenvector_tolerance = 1e-8;
  std::size_t eigenvector_max_iterations = 1000;
  bool weighted_eigenvector = true;
};

// Components in the same shape as CommunityResult::partition.
std::vector<std::vector<std::string>> connected_components(
    const WeightedGraph& graph);

std::map<std::string, Centrality> centralities(
    const WeightedGraph& graph, const AnalysisOptions& options = {});

// Top-k profiles ranked by composite descending, ties by node name.
std::vector<CentralityProfile> centrality_profile(
    const WeightedGraph& graph, std::size_t k,
    const AnalysisOptions& options = {});

// Weighted modularity of an arbitrary full partition of the node set.
double modularity(const WeightedGraph& graph,
                  const std::vector<std::vector<std::string>>& partition);

// Deterministic greedy agglomeration: always merge the connected community
// pair with the largest modularity gain (ties by smallest indices), track
// the best partition along the dendrogram, return it with its exact Q.
CommunityResult communities(const WeightedGraph& graph);

GraphStats graph_stats(const WeightedGraph& graph);

}  // namespace archnet
