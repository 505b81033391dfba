#pragma once

#include "atmfg/dataset.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace atmfg {

enum class IndexMode { approximate, exact };

struct IndexParams {
  // Links per node on upper layers; layer 0 keeps twice as many.
  std::size_t max_degree = 16;
  std::size_t ef_construction = 200;
  // 0 selects max(64, 2k) per query. Any explicit value is raised to k.
  std::size_t ef_search = 0;
  // Indices over at most this many rows use exact brute-force scans.
  std::size_t exact_fallback_threshold = 2048;
  // Approximate-mode queries switch to a scan over the live rows once at most
  // this many remain; graph traversal through a mostly deleted graph costs more.
  std::size_t live_scan_threshold = 1024;
  std::uint64_t seed = 0;
};

struct Neighbor {
  NodeId id = 0;
  double similarity = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// Static kNN graph in compressed sparse row layout. Each list is sorted by
// similarity descending, ties by ascending id, and never contains the node itself.
class SparseKnnGraph {
public:
  SparseKnnGraph() = default;
  SparseKnnGraph(std::size_t k, std::vector<std::size_t> offsets, std::vector<Neighbor> entries);

  std::size_t k() const { return k_; }
  std::size_t n_nodes() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t n_entries() const { return entries_.size(); }

  std::span<const Neighbor> neighbors(NodeId i) const {
    return {entries_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }

private:
  std::size_t k_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> entries_;
};

// Inner-product nearest-neighbor index over the rows of a normalized matrix,
// with soft deletion. Similarity is dot(query, row) / D, which is the Pearson
// correlation when the query is itself a normalized row.
//
// Small inputs get an exact scan; larger ones a hierarchical small-world graph.
// Deleted rows stay in the graph as waypoints but never appear in results.
// The matrix must outlive the index.
class AnnIndex {
public:
  // Throws SizeError on an empty matrix, ParameterError if it is not normalized.
  AnnIndex(const DataMatrix& data, IndexParams params);

  AnnIndex(const AnnIndex&) = delete;
  AnnIndex& operator=(const AnnIndex&) = delete;
  AnnIndex(AnnIndex&&) noexcept = default;
  AnnIndex& operator=(AnnIndex&&) noexcept = default;

  IndexMode mode() const { return mode_; }
  const IndexParams& params() const { return params_; }
  std::size_t size() const { return n_; }
  std::size_t dim() const { return dim_; }
  std::size_t live_count() const { return live_.size(); }
  bool is_deleted(NodeId id) const { return deleted_[id] != 0; }
  std::size_t effective_ef(std::size_t k) const;

  // Up to k live rows, best first (ties by ascending id). DimensionError if
  // vector.size() != D; ParameterError if k == 0.
  std::vector<Neighbor> query(std::span<const double> vector, std::size_t k) const;

  std::vector<std::vector<Neighbor>> batch_query(std::span<const std::span<const double>> vectors,
                                                 std::size_t k) const;

  // Idempotent. BoundsError if id >= N.
  void mark_deleted(NodeId id);

  // Top-k neighbors of every row, excluding the row itself. Must run before any
  // deletion. ParameterError if k == 0 or k >= N.
  SparseKnnGraph export_knn_graph(std::size_t k) const;

  // Layer-0 adjacency, for structural tests. Empty in exact mode.
  std::span<const NodeId> base_links(NodeId id) const;

private:
  struct Scored {
    double sim;
    NodeId id;
  };

  const float* nav_row(NodeId id) const { return nav_.data() + static_cast<std::size_t>(id) * dim_; }
  double nav_dot(const float* q, NodeId id) const;
  void build_graph();
  void insert(NodeId id);
  std::vector<Scored> search_layer(const float* q, NodeId entry, std::size_t ef,
                                   int level, bool skip_deleted) const;
  void select_neighbors(std::vector<Scored>& candidates, std::size_t m) const;
  std::vector<NodeId>& links(NodeId id, int level);
  const std::vector<NodeId>& links(NodeId id, int level) const;
  std::vector<Neighbor> scan_live(std::span<const double> q, std::size_t k) const;
  std::vector<Neighbor> search_graph(std::span<const double> q, std::size_t k) const;

  const DataMatrix* data_ = nullptr;
  IndexParams params_;
  IndexMode mode_ = IndexMode::exact;
  std::size_t n_ = 0;
  std::size_t dim_ = 0;

  std::vector<std::uint8_t> deleted_;
  std::vector<NodeId> live_;
  std::vector<std::uint32_t> live_pos_;

  // Graph state (approximate mode only). Traversal scores rows in float32;
  // returned similarities are recomputed from the double rows.
  std::vector<float> nav_;
  std::vector<int> level_;
  std::vector<std::vector<std::vector<NodeId>>> links_; // [node][level]
  NodeId entry_point_ = 0;
  int max_level_ = -1;
};

} // namespace atmfg
