#include "atmfg/engine.hpp"

#include "atmfg/error.hpp"
#include "atmfg/seeding.hpp"
#include "atmfg/simd/kernels.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

namespace atmfg {

namespace {

const DataMatrix& checked_input(const DataMatrix& m, const AtmfgConfig& cfg) {
  validate(cfg);
  if (m.n_rows() < 4) throw SizeError("a-TMFG needs at least 4 nodes, got " + std::to_string(m.n_rows()));
  if (!m.normalized()) throw ParameterError("a-TMFG requires a normalized matrix");
  return m;
}

IndexParams index_params(const AtmfgConfig& cfg) {
  IndexParams p = cfg.index;
  p.seed = derive_seed(cfg.seed, "ann_index", p.seed);
  return p;
}

std::size_t resolve_universe(std::size_t requested, std::size_t n) {
  return requested == kAutoUniverse ? default_universe_limit(n) : requested;
}

} // namespace

std::size_t default_universe_limit(std::size_t n) {
  const auto scaled = static_cast<std::size_t>(std::ceil(0.3 * static_cast<double>(n)));
  return std::max<std::size_t>(1000, scaled);
}

void validate(const AtmfgConfig& cfg) {
  if (cfg.k < 3) throw ParameterError("k must be at least 3, got " + std::to_string(cfg.k));
  if (cfg.clique_size != 4)
    throw ParameterError("only clique size 4 is supported, got " + std::to_string(cfg.clique_size));
  if (cfg.rescue_k < 1) throw ParameterError("rescue_k must be at least 1");
  if (cfg.universe_limit != kAutoUniverse && cfg.universe_limit != kUnboundedUniverse &&
      cfg.universe_limit < 4)
    throw ParameterError("universe limit must be at least 4, got " + std::to_string(cfg.universe_limit));
}

Face make_face(const DataMatrix& m, FaceId id, std::array<NodeId, 3> vertices) {
  Face f;
  f.id = id;
  f.vertices = vertices;
  f.centroid.resize(m.n_cols());
  simd::active().sum3(m.row(vertices[0]).data(), m.row(vertices[1]).data(),
                      m.row(vertices[2]).data(), f.centroid.data(), m.n_cols());
  return f;
}

double score(const DataMatrix& m, const Face& f, NodeId v) {
  if (v >= m.n_rows()) throw BoundsError("node id " + std::to_string(v) + " out of range");
  if (std::find(f.vertices.begin(), f.vertices.end(), v) != f.vertices.end())
    throw ParameterError("invalid candidate: node " + std::to_string(v) + " is a vertex of face " +
                         std::to_string(f.id));
  return simd::active().dot(m.row(v).data(), f.centroid.data(), m.n_cols()) /
         static_cast<double>(m.n_cols());
}

std::vector<NodeId> seed_clique(const SparseKnnGraph& g, std::size_t c) {
  const std::size_t n = g.n_nodes();
  if (c < 2) throw ParameterError("clique size must be at least 2");
  if (n < c) throw SizeError("need at least " + std::to_string(c) + " nodes for a seed clique");
  const std::size_t want = c - 1;
  bool found = false;
  NodeId best = 0;
  double best_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto nb = g.neighbors(static_cast<NodeId>(i));
    if (nb.size() < want) continue;
    double s = 0.0;
    for (std::size_t t = 0; t < want; ++t) s += nb[t].similarity;
    if (!found || s > best_sum) {
      found = true;
      best = static_cast<NodeId>(i);
      best_sum = s;
    }
  }
  if (!found) {
    std::size_t best_deg = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t deg = g.neighbors(static_cast<NodeId>(i)).size();
      if (i == 0 || deg > best_deg) {
        best_deg = deg;
        best = static_cast<NodeId>(i);
      }
    }
  }
  std::vector<NodeId> out{best};
  for (const Neighbor& nb : g.neighbors(best)) {
    if (out.size() == c) break;
    out.push_back(nb.id);
  }
  return out;
}

std::string to_json(const EngineStats& s) {
  char buf[320];
  std::snprintf(buf, sizeof buf,
                "{\"n\": %zu, \"edges\": %zu, \"rescues\": %zu, \"lazy_discards\": %zu, "
                "\"faces_pruned\": %zu, \"peak_universe\": %zu, \"wall_seconds\": %.6f}",
                s.n, s.edges, s.rescues, s.lazy_discards, s.faces_pruned, s.peak_universe,
                s.wall_seconds);
  return buf;
}

bool AtmfgEngine::HeapOrder::operator()(const Candidate& a, const Candidate& b) const {
  // true when a ranks below b: score desc, node asc, face asc.
  if (a.score != b.score) return a.score < b.score;
  if (a.node != b.node) return a.node > b.node;
  return a.face > b.face;
}

AtmfgEngine::AtmfgEngine(const DataMatrix& m, AtmfgConfig cfg)
    : m_(&checked_input(m, cfg)),
      cfg_(std::move(cfg)),
      n_(m.n_rows()),
      universe_limit_(resolve_universe(cfg_.universe_limit, n_)),
      index_(m, index_params(cfg_)),
      edges_(n_),
      integrated_(n_, 0),
      remaining_(n_),
      stamp_(n_, 0) {
  const auto t0 = std::chrono::steady_clock::now();
  stats_.k_effective = std::min(cfg_.k, n_ - 1);
  graph_ = index_.export_knn_graph(stats_.k_effective);
  stats_.index_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  stats_.n = n_;
  stats_.universe_limit = universe_limit_;
}

double AtmfgEngine::edge_weight(NodeId a, NodeId b) const { return correlation(*m_, a, b); }

void AtmfgEngine::integrate(NodeId v) {
  integrated_[v] = 1;
  index_.mark_deleted(v);
  --remaining_;
}

void AtmfgEngine::initialize() {
  if (initialized_) throw InternalError("engine already initialized");
  initialized_ = true;

  std::vector<NodeId> clique;
  if (cfg_.seed_clique) {
    clique.assign(cfg_.seed_clique->begin(), cfg_.seed_clique->end());
    for (std::size_t a = 0; a < 4; ++a) {
      if (clique[a] >= n_) throw BoundsError("seed clique node out of range");
      for (std::size_t b = a + 1; b < 4; ++b)
        if (clique[a] == clique[b]) throw ParameterError("seed clique nodes must be distinct");
    }
  } else {
    clique = seed_clique(graph_, cfg_.clique_size);
    if (clique.size() < 4) {
      // Degenerate kNN graph: complete the seed from the index.
      for (const Neighbor& nb : index_.query(m_->row(clique.front()), 8)) {
        if (clique.size() == 4) break;
        if (std::find(clique.begin(), clique.end(), nb.id) == clique.end()) clique.push_back(nb.id);
      }
      for (NodeId v = 0; clique.size() < 4; ++v)
        if (std::find(clique.begin(), clique.end(), v) == clique.end()) clique.push_back(v);
    }
  }
  std::copy(clique.begin(), clique.end(), seed_.begin());

  // Seed weights come from the kNN graph where it holds the pair.
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = a + 1; b < 4; ++b) {
      double w = edge_weight(seed_[a], seed_[b]);
      for (const Neighbor& nb : graph_.neighbors(seed_[a]))
        if (nb.id == seed_[b]) w = std::clamp(nb.similarity, -1.0, 1.0);
      edges_.add(seed_[a], seed_[b], w);
    }
  }
  for (NodeId s : seed_) integrate(s);

  create_face({seed_[0], seed_[1], seed_[2]});
  create_face({seed_[0], seed_[1], seed_[3]});
  create_face({seed_[0], seed_[2], seed_[3]});
  create_face({seed_[1], seed_[2], seed_[3]});
  prune();
  stats_.peak_universe = std::max(stats_.peak_universe, live_count_);
  stats_.edges = edges_.size();
}

FaceId AtmfgEngine::create_face(std::array<NodeId, 3> vertices) {
  const auto id = static_cast<FaceId>(faces_.size());
  FaceState state;
  state.face = make_face(*m_, id, vertices);
  ++stats_.centroid_computations;
  ++stats_.faces_created;

  // Local pool: union of the vertices' kNN lists, minus integrated nodes.
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
  std::vector<NodeId> ids;
  ids.reserve(3 * stats_.k_effective);
  for (NodeId u : vertices) {
    for (const Neighbor& nb : graph_.neighbors(u)) {
      if (integrated_[nb.id] || stamp_[nb.id] == epoch_) continue;
      stamp_[nb.id] = epoch_;
      ids.push_back(nb.id);
    }
  }
  std::vector<double> scores(ids.size());
  simd::active().dot_rows(state.face.centroid.data(), m_->values().data(), m_->n_cols(), ids.data(),
                          ids.size(), m_->n_cols(), scores.data());
  const double inv_d = 1.0 / static_cast<double>(m_->n_cols());
  state.pool.resize(ids.size());
  for (std::size_t r = 0; r < ids.size(); ++r) state.pool[r] = {scores[r] * inv_d, ids[r]};
  std::sort(state.pool.begin(), state.pool.end(), [](const PoolEntry& a, const PoolEntry& b) {
    return a.score > b.score || (a.score == b.score && a.node < b.node);
  });

  faces_.push_back(std::move(state));
  birth_order_.push_back(id);
  ++live_count_;
  push_next(id);
  return id;
}

void AtmfgEngine::push_next(FaceId id) {
  FaceState& s = faces_[id];
  while (s.cursor < s.pool.size() && integrated_[s.pool[s.cursor].node]) ++s.cursor;
  if (s.cursor < s.pool.size()) {
    heap_.push({s.pool[s.cursor].score, s.pool[s.cursor].node, id});
  } else {
    ++stats_.exhausted_faces;
  }
}

void AtmfgEngine::kill_face(FaceId id) {
  FaceState& s = faces_[id];
  s.face.alive = false;
  std::vector<double>().swap(s.face.centroid);
  std::vector<PoolEntry>().swap(s.pool);
  s.cursor = 0;
  --live_count_;
}

void AtmfgEngine::prune() {
  if (universe_limit_ == kUnboundedUniverse) return;
  while (live_count_ > universe_limit_) {
    const FaceId oldest = birth_order_.front();
    birth_order_.pop_front();
    if (!faces_[oldest].face.alive) continue;
    kill_face(oldest);
    ++stats_.faces_pruned;
  }
  while (!birth_order_.empty() && !faces_[birth_order_.front()].face.alive) birth_order_.pop_front();
}

std::vector<FaceId> AtmfgEngine::live_face_ids() const {
  std::vector<FaceId> out;
  out.reserve(live_count_);
  for (FaceId id : birth_order_)
    if (faces_[id].face.alive) out.push_back(id);
  return out;
}

std::optional<Candidate> AtmfgEngine::pop_valid() {
  while (!heap_.empty()) {
    const Candidate c = heap_.top();
    heap_.pop();
    if (!faces_[c.face].face.alive) {
      ++stats_.lazy_discards;
      continue;
    }
    if (integrated_[c.node]) {
      ++stats_.lazy_discards;
      push_next(c.face);
      continue;
    }
    return c;
  }
  return std::nullopt;
}

void AtmfgEngine::local_expand(FaceId f, NodeId v) {
  if (f >= faces_.size() || !faces_[f].face.alive)
    throw InternalError("local_expand on dead face " + std::to_string(f));
  if (v >= n_ || integrated_[v])
    throw InternalError("local_expand with integrated node " + std::to_string(v));
  const std::array<NodeId, 3> fv = faces_[f].face.vertices;

  if (cfg_.record_steps) {
    double s = 0.0;
    const auto& pool = faces_[f].pool;
    const auto it = std::find_if(pool.begin(), pool.end(), [v](const PoolEntry& e) { return e.node == v; });
    s = it != pool.end() ? it->score : score(*m_, faces_[f].face, v);
    steps_.push_back({f, fv, v, s});
  }

  for (NodeId u : fv) edges_.add(v, u, edge_weight(v, u));
  integrate(v);
  kill_face(f);
  create_face({v, fv[1], fv[2]});
  create_face({fv[0], v, fv[2]});
  create_face({fv[0], fv[1], v});
  prune();
  stats_.peak_universe = std::max(stats_.peak_universe, live_count_);
  stats_.edges = edges_.size();
}

std::size_t AtmfgEngine::global_rescue() {
  if (complete()) return 0;
  const std::vector<FaceId> live = live_face_ids();
  std::vector<std::span<const double>> queries;
  queries.reserve(live.size());
  for (FaceId id : live) queries.emplace_back(faces_[id].face.centroid);

  const auto results = index_.batch_query(queries, cfg_.rescue_k);
  std::size_t pushed = 0;
  for (std::size_t q = 0; q < live.size(); ++q) {
    FaceState& s = faces_[live[q]];
    std::vector<PoolEntry> pool;
    pool.reserve(results[q].size());
    for (const Neighbor& nb : results[q]) {
      if (integrated_[nb.id]) throw InternalError("index returned integrated node " + std::to_string(nb.id));
      // nb.similarity is dot(centroid, row) / D, the face score itself.
      pool.push_back({nb.similarity, nb.id});
    }
    // Merge with whatever the local pool still holds.
    for (std::size_t c = s.cursor; c < s.pool.size(); ++c) {
      const PoolEntry& e = s.pool[c];
      if (integrated_[e.node]) continue;
      if (std::none_of(pool.begin(), pool.end(), [&](const PoolEntry& p) { return p.node == e.node; }))
        pool.push_back(e);
    }
    std::sort(pool.begin(), pool.end(), [](const PoolEntry& a, const PoolEntry& b) {
      return a.score > b.score || (a.score == b.score && a.node < b.node);
    });
    s.pool = std::move(pool);
    s.cursor = 0;
    if (!s.pool.empty()) {
      heap_.push({s.pool.front().score, s.pool.front().node, live[q]});
      ++pushed;
    }
  }
  ++stats_.rescues;
  stats_.rescue_candidates += pushed;
  if (pushed == 0)
    throw InternalError("frontier exhausted: rescue found no candidate while " +
                        std::to_string(remaining_) + " nodes remain");
  return pushed;
}

bool AtmfgEngine::step() {
  if (!initialized_) initialize();
  if (complete()) return false;
  if (const auto c = pop_valid()) {
    local_expand(c->face, c->node);
  } else {
    global_rescue();
  }
  return !complete();
}

void AtmfgEngine::run() {
  if (!initialized_) initialize();
  while (step()) {
  }
}

AtmfgResult build_atmfg(const DataMatrix& m, const AtmfgConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  AtmfgEngine engine(m, cfg);
  engine.run();
  AtmfgResult result;
  result.stats = engine.stats();
  result.stats.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  result.edges = engine.edges();
  result.seed = engine.seed();
  result.steps = engine.steps();
  if (result.edges.size() != 3 * m.n_rows() - 6)
    throw InternalError("a-TMFG finished with " + std::to_string(result.edges.size()) + " edges");
  return result;
}

} // namespace atmfg
