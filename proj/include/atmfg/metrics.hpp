#pragma once

#include "atmfg/edge_list.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace atmfg {

// Node -> cluster assignment with ids contiguous from 0.
class Partition {
public:
  // ParameterError if the ids used are not exactly {0, ..., K-1}.
  explicit Partition(std::vector<std::uint32_t> labels);

  std::size_t n_nodes() const { return labels_.size(); }
  std::size_t n_clusters() const { return sizes_.size(); }
  std::uint32_t label(NodeId v) const { return labels_[v]; }
  const std::vector<std::uint32_t>& labels() const { return labels_; }
  const std::vector<std::size_t>& sizes() const { return sizes_; }
  std::vector<NodeId> members(std::uint32_t cluster) const;

private:
  std::vector<std::uint32_t> labels_;
  std::vector<std::size_t> sizes_;
};

// |E1 n E2| / |E1 u E2| over unweighted edges; 1 when both are empty.
double jaccard(const EdgeList& a, const EdgeList& b);

struct PathOptions {
  // Clusters with more ordered pairs than this are estimated from a seeded sample.
  std::size_t max_pairs_per_cluster = 10000;
  std::uint64_t seed = 0;
  // Measure distances inside the cluster-induced subgraph instead of the full graph.
  bool induced = false;
};

struct ClusterPath {
  std::uint32_t cluster = 0;
  std::size_t size = 0;
  double mean_path = 0.0; // L(C_k)
  double weight = 0.0;    // w_k
  std::size_t pairs = 0;  // ordered pairs measured
  bool sampled = false;
  bool skipped = false;
};

struct PathResult {
  double l_weighted = 0.0;
  std::vector<ClusterPath> per_cluster;
  std::vector<std::string> warnings;
};

// Mean hop distance between ordered intra-cluster pairs, per cluster, and the
// size-weighted sum over clusters. Singleton clusters are skipped (with a
// warning) and the weights renormalized over the rest. StructureError when a
// pair is unreachable; InputMismatchError if the partition and graph disagree
// on the node count.
PathResult weighted_intra_cluster_path(const EdgeList& e, const Partition& p,
                                       const PathOptions& options = {});

struct AuditReport {
  std::size_t n_nodes = 0;
  std::size_t edges = 0;
  std::size_t expected_edges = 0; // 3N - 6
  std::size_t components = 0;
  std::size_t min_degree = 0;
  std::size_t max_degree = 0;
  std::map<std::size_t, std::size_t> degree_histogram;
};

AuditReport graph_audit(const EdgeList& e);

std::size_t count_components(const EdgeList& e);

nlohmann::json to_json(const AuditReport& a);
nlohmann::json to_json(const PathResult& r);

} // namespace atmfg
