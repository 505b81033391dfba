#pragma once

#include "atmfg/dataset.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace atmfg {

struct Edge {
  NodeId u = 0; // u < v
  NodeId v = 0;
  double w = 0.0;
};

// Undirected weighted edge set over nodes [0, n_nodes).
class EdgeList {
public:
  EdgeList() = default;
  explicit EdgeList(std::size_t n_nodes) : n_nodes_(n_nodes) {}

  // Stores the edge as (min, max). Throws StructureError on a self-loop and
  // BoundsError on an id >= n_nodes. Duplicates are not detected here.
  void add(NodeId a, NodeId b, double w);

  std::size_t n_nodes() const { return n_nodes_; }
  std::size_t size() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }
  const std::vector<Edge>& edges() const { return edges_; }

  // Removes the edge (a, b) if present. Returns whether it was found.
  bool remove(NodeId a, NodeId b);

  // Lexicographic by (u, v).
  void sort();
  EdgeList sorted() const;

  bool has_duplicates() const;

private:
  std::size_t n_nodes_ = 0;
  std::vector<Edge> edges_;
};

inline std::uint64_t edge_key(NodeId u, NodeId v) {
  return u < v ? (std::uint64_t{u} << 32) | v : (std::uint64_t{v} << 32) | u;
}

// "u<TAB>v<TAB>w" lines, sorted by (u, v), weights with 6 decimals.
std::string format_edgelist_tsv(const EdgeList& e);
void write_edgelist_tsv(const EdgeList& e, const std::filesystem::path& path);

// n_nodes = 0 infers max id + 1. Throws ParseError on malformed lines and
// StructureError on self-loops or duplicate edges.
EdgeList read_edgelist_tsv(const std::filesystem::path& path, std::size_t n_nodes = 0);

// Newline-delimited cluster ids, one per node.
std::vector<std::uint32_t> read_labels(const std::filesystem::path& path);
void write_labels(const std::vector<std::uint32_t>& labels, const std::filesystem::path& path);

} // namespace atmfg
