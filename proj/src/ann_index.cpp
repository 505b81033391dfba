#include "atmfg/ann_index.hpp"

#include "atmfg/error.hpp"
#include "atmfg/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <string>

namespace atmfg {

namespace {

// Visit stamps, reused across searches on the same thread.
struct VisitedSet {
  std::vector<std::uint32_t> stamp;
  std::uint32_t epoch = 0;

  void reset(std::size_t n) {
    if (stamp.size() < n) stamp.resize(n, 0);
    if (++epoch == 0) {
      std::fill(stamp.begin(), stamp.end(), 0);
      epoch = 1;
    }
  }
  bool visit(NodeId id) {
    if (stamp[id] == epoch) return false;
    stamp[id] = epoch;
    return true;
  }
};

VisitedSet& visited_for_thread() {
  thread_local VisitedSet set;
  return set;
}

bool better(double sa, NodeId ia, double sb, NodeId ib) {
  return sa > sb || (sa == sb && ia < ib);
}

} // namespace

SparseKnnGraph::SparseKnnGraph(std::size_t k, std::vector<std::size_t> offsets,
                               std::vector<Neighbor> entries)
    : k_(k), offsets_(std::move(offsets)), entries_(std::move(entries)) {}

AnnIndex::AnnIndex(const DataMatrix& data, IndexParams params)
    : data_(&data), params_(params), n_(data.n_rows()), dim_(data.n_cols()) {
  if (data.empty()) throw SizeError("cannot index an empty matrix");
  if (!data.normalized()) throw ParameterError("index requires a normalized matrix");
  if (params_.max_degree < 2) throw ParameterError("max_degree must be at least 2");
  if (params_.ef_construction < 1) throw ParameterError("ef_construction must be at least 1");

  deleted_.assign(n_, 0);
  live_.resize(n_);
  live_pos_.resize(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    live_[i] = static_cast<NodeId>(i);
    live_pos_[i] = static_cast<std::uint32_t>(i);
  }

  mode_ = n_ <= params_.exact_fallback_threshold ? IndexMode::exact : IndexMode::approximate;
  if (mode_ == IndexMode::approximate) build_graph();
}

std::size_t AnnIndex::effective_ef(std::size_t k) const {
  if (params_.ef_search == 0) return std::max<std::size_t>(64, 2 * k);
  return std::max(params_.ef_search, k);
}

double AnnIndex::nav_dot(const float* q, NodeId id) const {
  return simd::active().dot_f32(q, nav_row(id), dim_);
}

std::vector<NodeId>& AnnIndex::links(NodeId id, int level) {
  return links_[id][static_cast<std::size_t>(level)];
}

const std::vector<NodeId>& AnnIndex::links(NodeId id, int level) const {
  return links_[id][static_cast<std::size_t>(level)];
}

std::span<const NodeId> AnnIndex::base_links(NodeId id) const {
  if (mode_ == IndexMode::exact) return {};
  return links(id, 0);
}

void AnnIndex::build_graph() {
  nav_.assign(data_->values().begin(), data_->values().end());
  std::mt19937_64 rng(params_.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double ml = 1.0 / std::log(static_cast<double>(params_.max_degree));
  level_.resize(n_);
  links_.resize(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    const double u = 1.0 - unit(rng); // (0, 1]
    level_[i] = static_cast<int>(-std::log(u) * ml);
    links_[i].resize(static_cast<std::size_t>(level_[i]) + 1);
  }
  for (std::size_t i = 0; i < n_; ++i) insert(static_cast<NodeId>(i));
}

void AnnIndex::select_neighbors(std::vector<Scored>& candidates, std::size_t m) const {
  // Keep a candidate only if it is closer to the query than to every neighbor
  // already kept; spreads links across directions.
  std::sort(candidates.begin(), candidates.end(),
            [](const Scored& a, const Scored& b) { return better(a.sim, a.id, b.sim, b.id); });
  if (candidates.size() <= m) return;
  std::vector<Scored> kept;
  kept.reserve(m);
  for (const Scored& c : candidates) {
    if (kept.size() >= m) break;
    const float* row_c = nav_row(c.id);
    bool good = true;
    for (const Scored& s : kept) {
      if (nav_dot(row_c, s.id) > c.sim) {
        good = false;
        break;
      }
    }
    if (good) kept.push_back(c);
  }
  candidates = std::move(kept);
}

void AnnIndex::insert(NodeId id) {
  const int level = level_[id];
  if (max_level_ < 0) {
    entry_point_ = id;
    max_level_ = level;
    return;
  }
  const float* q = nav_row(id);
  NodeId cur = entry_point_;
  for (int l = max_level_; l > level; --l) {
    const auto nearest = search_layer(q, cur, 1, l, false);
    if (!nearest.empty()) cur = nearest.front().id;
  }
  for (int l = std::min(level, max_level_); l >= 0; --l) {
    auto candidates = search_layer(q, cur, params_.ef_construction, l, false);
    if (candidates.empty()) continue;
    const NodeId next_entry = candidates.front().id;
    const std::size_t m_max = l == 0 ? 2 * params_.max_degree : params_.max_degree;
    select_neighbors(candidates, params_.max_degree);
    auto& own = links(id, l);
    for (const Scored& c : candidates) {
      own.push_back(c.id);
      auto& theirs = links(c.id, l);
      if (theirs.size() < m_max) {
        theirs.push_back(id);
        continue;
      }
      const float* row_c = nav_row(c.id);
      std::vector<Scored> pool;
      pool.reserve(theirs.size() + 1);
      pool.push_back({c.sim, id});
      for (NodeId t : theirs) pool.push_back({nav_dot(row_c, t), t});
      select_neighbors(pool, m_max);
      theirs.clear();
      for (const Scored& s : pool) theirs.push_back(s.id);
    }
    cur = next_entry;
  }
  if (level > max_level_) {
    max_level_ = level;
    entry_point_ = id;
  }
}

std::vector<AnnIndex::Scored> AnnIndex::search_layer(const float* q, NodeId entry,
                                                     std::size_t ef, int level,
                                                     bool skip_deleted) const {
  struct WorstOnTop {
    bool operator()(const Scored& a, const Scored& b) const { return better(a.sim, a.id, b.sim, b.id); }
  };
  struct BestOnTop {
    bool operator()(const Scored& a, const Scored& b) const { return better(b.sim, b.id, a.sim, a.id); }
  };
  std::priority_queue<Scored, std::vector<Scored>, WorstOnTop> results;
  std::priority_queue<Scored, std::vector<Scored>, BestOnTop> frontier;

  VisitedSet& visited = visited_for_thread();
  visited.reset(n_);
  visited.visit(entry);
  const Scored start{nav_dot(q, entry), entry};
  frontier.push(start);
  if (!skip_deleted || !deleted_[entry]) results.push(start);
  const bool has_deleted = skip_deleted && live_.size() < n_;

  std::vector<NodeId> batch;
  std::vector<double> sims;
  while (!frontier.empty()) {
    const Scored cur = frontier.top();
    // With deletions pending, keep walking until ef live results are held.
    if (!results.empty() && better(results.top().sim, results.top().id, cur.sim, cur.id) &&
        (results.size() >= ef || !has_deleted))
      break;
    frontier.pop();

    batch.clear();
    for (NodeId nb : links(cur.id, level))
      if (visited.visit(nb)) batch.push_back(nb);
    sims.resize(batch.size());
    simd::active().dot_rows_f32(q, nav_.data(), dim_, batch.data(), batch.size(), dim_,
                                sims.data());
    for (std::size_t b = 0; b < batch.size(); ++b) {
      const Scored s{sims[b], batch[b]};
      if (results.size() < ef || better(s.sim, s.id, results.top().sim, results.top().id)) {
        frontier.push(s);
        if (!skip_deleted || !deleted_[s.id]) {
          results.push(s);
          if (results.size() > ef) results.pop();
        }
      }
    }
  }

  std::vector<Scored> out;
  out.reserve(results.size());
  while (!results.empty()) {
    out.push_back(results.top());
    results.pop();
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<Neighbor> AnnIndex::scan_live(std::span<const double> q, std::size_t k) const {
  std::vector<double> sims(live_.size());
  simd::active().dot_rows(q.data(), data_->values().data(), dim_, live_.data(), live_.size(), dim_,
                          sims.data());
  std::vector<Scored> all(live_.size());
  for (std::size_t r = 0; r < live_.size(); ++r) all[r] = {sims[r], live_[r]};
  const auto cmp = [](const Scored& a, const Scored& b) { return better(a.sim, a.id, b.sim, b.id); };
  const std::size_t take = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take), all.end(), cmp);
  std::vector<Neighbor> out(take);
  const double inv_d = 1.0 / static_cast<double>(dim_);
  for (std::size_t r = 0; r < take; ++r) out[r] = {all[r].id, all[r].sim * inv_d};
  return out;
}

std::vector<Neighbor> AnnIndex::search_graph(std::span<const double> q, std::size_t k) const {
  const std::vector<float> qf(q.begin(), q.end());
  NodeId cur = entry_point_;
  for (int l = max_level_; l > 0; --l) {
    const auto nearest = search_layer(qf.data(), cur, 1, l, false);
    if (!nearest.empty()) cur = nearest.front().id;
  }
  auto found = search_layer(qf.data(), cur, effective_ef(k), 0, true);
  // The walk drained every reachable node; the live rows left are cut off
  // from the entry point.
  if (found.size() < std::min(k, live_.size())) return scan_live(q, k);
  const double* rows = data_->values().data();
  for (Scored& s : found) s.sim = simd::active().dot(q.data(), rows + static_cast<std::size_t>(s.id) * dim_, dim_);
  const auto cmp = [](const Scored& a, const Scored& b) { return better(a.sim, a.id, b.sim, b.id); };
  const std::size_t take = std::min(k, found.size());
  std::partial_sort(found.begin(), found.begin() + static_cast<std::ptrdiff_t>(take), found.end(), cmp);
  std::vector<Neighbor> out(take);
  const double inv_d = 1.0 / static_cast<double>(dim_);
  for (std::size_t r = 0; r < take; ++r) out[r] = {found[r].id, found[r].sim * inv_d};
  return out;
}

std::vector<Neighbor> AnnIndex::query(std::span<const double> vector, std::size_t k) const {
  if (vector.size() != dim_)
    throw DimensionError("query has " + std::to_string(vector.size()) + " components, index has " +
                         std::to_string(dim_));
  if (k == 0) throw ParameterError("query needs k >= 1");
  if (live_.empty()) return {};
  if (mode_ == IndexMode::exact || live_.size() <= params_.live_scan_threshold)
    return scan_live(vector, k);
  return search_graph(vector, k);
}

std::vector<std::vector<Neighbor>> AnnIndex::batch_query(
    std::span<const std::span<const double>> vectors, std::size_t k) const {
  std::vector<std::vector<Neighbor>> out;
  out.reserve(vectors.size());
  for (const auto& v : vectors) out.push_back(query(v, k));
  return out;
}

void AnnIndex::mark_deleted(NodeId id) {
  if (id >= n_)
    throw BoundsError("node id " + std::to_string(id) + " out of range for index of size " +
                      std::to_string(n_));
  if (deleted_[id]) return;
  deleted_[id] = 1;
  const std::uint32_t pos = live_pos_[id];
  const NodeId moved = live_.back();
  live_[pos] = moved;
  live_pos_[moved] = pos;
  live_.pop_back();
}

SparseKnnGraph AnnIndex::export_knn_graph(std::size_t k) const {
  if (k == 0) throw ParameterError("kNN graph needs k >= 1");
  if (k >= n_)
    throw ParameterError("kNN neighborhood k = " + std::to_string(k) + " must be below N = " +
                         std::to_string(n_));
  if (live_.size() != n_) throw ParameterError("kNN graph must be exported before any deletion");

  std::vector<std::size_t> offsets(n_ + 1, 0);
  std::vector<Neighbor> entries;
  entries.reserve(n_ * k);
  for (std::size_t i = 0; i < n_; ++i) {
    const auto self = static_cast<NodeId>(i);
    const auto found = query(data_->row(i), k + 1);
    for (const Neighbor& nb : found) {
      if (nb.id == self) continue;
      if (entries.size() - offsets[i] == k) break;
      entries.push_back(nb);
    }
    offsets[i + 1] = entries.size();
  }
  return SparseKnnGraph(k, std::move(offsets), std::move(entries));
}

} // namespace atmfg
