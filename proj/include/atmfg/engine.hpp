#pragma once

#include "atmfg/ann_index.hpp"
#include "atmfg/dataset.hpp"
#include "atmfg/edge_list.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <vector>

namespace atmfg {

using FaceId = std::uint32_t;

// Universe limit sentinels.
inline constexpr std::size_t kAutoUniverse = 0;
inline constexpr std::size_t kUnboundedUniverse = std::numeric_limits<std::size_t>::max();

// max(1000, ceil(0.3 N)).
std::size_t default_universe_limit(std::size_t n);

struct AtmfgConfig {
  // kNN neighborhood; clamped to N - 1 on small inputs.
  std::size_t k = 50;
  // kAutoUniverse, kUnboundedUniverse, or an explicit bound >= 4.
  std::size_t universe_limit = kAutoUniverse;
  // Only tetrahedral seeding exists.
  std::size_t clique_size = 4;
  // Neighbors requested per live-face centroid during a rescue.
  std::size_t rescue_k = 8;
  std::uint64_t seed = 0;
  IndexParams index;
  // Bypass seed_clique(); used to align with other builders in tests.
  std::optional<std::array<NodeId, 4>> seed_clique;
  // Record every (face, node) choice in AtmfgResult::steps.
  bool record_steps = false;
};

// Throws ParameterError for k < 3, clique_size != 4, rescue_k < 1 or a
// finite universe limit below 4.
void validate(const AtmfgConfig& cfg);

// A 3-clique with its cached centroid (sum of the three vertex rows).
struct Face {
  FaceId id = 0; // birth order
  std::array<NodeId, 3> vertices{};
  std::vector<double> centroid;
  bool alive = true;
};

// Computes the centroid once.
Face make_face(const DataMatrix& m, FaceId id, std::array<NodeId, 3> vertices);

// dot(row_v, centroid) / D, i.e. the summed correlation of v to the face's
// vertices. ParameterError if v is one of the vertices.
double score(const DataMatrix& m, const Face& f, NodeId v);

// The node whose c - 1 strongest kNN weights sum highest (ties: lower id),
// followed by those neighbors. Nodes with fewer than c - 1 neighbors are
// skipped; if none qualifies, the highest-degree node and its neighbors are
// returned (possibly fewer than c ids). SizeError if N < c.
std::vector<NodeId> seed_clique(const SparseKnnGraph& g, std::size_t c);

struct EngineStats {
  std::size_t n = 0;
  std::size_t edges = 0;
  std::size_t rescues = 0;
  std::size_t lazy_discards = 0;
  std::size_t faces_pruned = 0;
  std::size_t peak_universe = 0;
  double wall_seconds = 0.0;

  // Instrumentation beyond the serialized fields.
  std::size_t k_effective = 0;
  std::size_t universe_limit = 0;
  std::size_t faces_created = 0;
  std::size_t centroid_computations = 0;
  std::size_t rescue_candidates = 0;
  std::size_t exhausted_faces = 0;
  double index_seconds = 0.0;
};

// {"n":, "edges":, "rescues":, "lazy_discards":, "faces_pruned":, "peak_universe":, "wall_seconds":}
std::string to_json(const EngineStats& stats);

struct EngineStep {
  FaceId face = 0;
  std::array<NodeId, 3> vertices{};
  NodeId node = 0;
  double score = 0.0;
};

struct Candidate {
  double score = 0.0;
  NodeId node = 0;
  FaceId face = 0;
};

// State of one a-TMFG construction. build_atmfg() drives it end to end; the
// individual phases are public so tests can step through them.
//
// One build is single-threaded. Each live face keeps its candidate pool sorted
// best-first and owns at most one heap entry (its current best). Stale entries
// are dropped at pop time; when the node went stale but the face is still
// alive, the face's next pool entry is pushed in its place.
class AtmfgEngine {
public:
  // Builds the index and the kNN graph. m must be normalized and outlive the engine.
  AtmfgEngine(const DataMatrix& m, AtmfgConfig cfg);

  // Seeds the tetrahedron, its four faces and their candidates.
  void initialize();

  // One iteration of the main loop: a local expansion, or a rescue when the
  // heap holds nothing valid. Returns false once every node is integrated.
  bool step();

  void run();

  // Next valid heap entry, discarding stale ones.
  std::optional<Candidate> pop_valid();

  // Attach v to face f: 3 edges, kill f, create its 3 subdivisions, prune.
  // InternalError if f is dead or v already integrated.
  void local_expand(FaceId f, NodeId v);

  // Batch-query the index with every live face centroid and push each face's
  // best returned node. Returns the number of candidates pushed.
  std::size_t global_rescue();

  bool complete() const { return remaining_ == 0; }
  std::size_t remaining() const { return remaining_; }
  bool is_integrated(NodeId v) const { return integrated_[v] != 0; }
  std::size_t live_faces() const { return live_count_; }
  std::size_t heap_size() const { return heap_.size(); }
  std::size_t universe_limit() const { return universe_limit_; }
  const Face& face(FaceId id) const { return faces_[id].face; }
  std::size_t face_count() const { return faces_.size(); }
  std::vector<FaceId> live_face_ids() const;

  const EdgeList& edges() const { return edges_; }
  const EngineStats& stats() const { return stats_; }
  const std::vector<EngineStep>& steps() const { return steps_; }
  const std::array<NodeId, 4>& seed() const { return seed_; }
  const AnnIndex& index() const { return index_; }
  const SparseKnnGraph& knn_graph() const { return graph_; }

private:
  struct PoolEntry {
    double score;
    NodeId node;
  };
  struct FaceState {
    Face face;
    std::vector<PoolEntry> pool;
    std::size_t cursor = 0;
  };
  struct HeapOrder {
    bool operator()(const Candidate& a, const Candidate& b) const;
  };

  FaceId create_face(std::array<NodeId, 3> vertices);
  void kill_face(FaceId id);
  void push_next(FaceId id);
  void prune();
  void integrate(NodeId v);
  double edge_weight(NodeId a, NodeId b) const;

  const DataMatrix* m_;
  AtmfgConfig cfg_;
  std::size_t n_;
  std::size_t universe_limit_;
  AnnIndex index_;
  SparseKnnGraph graph_;

  EdgeList edges_;
  std::vector<std::uint8_t> integrated_;
  std::size_t remaining_;
  std::vector<FaceState> faces_;
  std::deque<FaceId> birth_order_; // may hold dead ids; skipped lazily
  std::size_t live_count_ = 0;
  std::priority_queue<Candidate, std::vector<Candidate>, HeapOrder> heap_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
  std::array<NodeId, 4> seed_{};
  bool initialized_ = false;

  EngineStats stats_;
  std::vector<EngineStep> steps_;
};

struct AtmfgResult {
  EdgeList edges;
  EngineStats stats;
  std::array<NodeId, 4> seed{};
  std::vector<EngineStep> steps;
};

// SizeError if N < 4; ParameterError on an invalid config.
AtmfgResult build_atmfg(const DataMatrix& m, const AtmfgConfig& cfg);

} // namespace atmfg
