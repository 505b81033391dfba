#pragma once

// Generators and brute-force oracles shared by the test binaries. Nothing here
// calls into the library's scoring code; each oracle recomputes from raw rows.

#include "atmfg/dataset.hpp"
#include "atmfg/edge_list.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <random>
#include <set>
#include <span>
#include <utility>
#include <vector>

namespace testing_support {

using atmfg::DataMatrix;
using atmfg::EdgeList;
using atmfg::NodeId;

inline std::vector<double> gaussian_values(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(count);
  for (double& x : v) x = normal(rng);
  return v;
}

inline DataMatrix random_matrix(std::size_t n, std::size_t d, std::uint64_t seed) {
  return DataMatrix(n, d, gaussian_values(n * d, seed));
}

// Rows mixing a few shared latent paths, so correlations are far from zero.
inline DataMatrix latent_matrix(std::size_t n, std::size_t d, std::size_t factors, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> latent(factors * d);
  for (double& x : latent) x = normal(rng);
  std::vector<double> v(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> load(factors);
    for (double& l : load) l = normal(rng);
    for (std::size_t t = 0; t < d; ++t) {
      double x = normal(rng);
      for (std::size_t f = 0; f < factors; ++f) x += load[f] * latent[f * d + t];
      v[i * d + t] = x;
    }
  }
  return DataMatrix(n, d, std::move(v));
}

// Textbook Pearson correlation of two raw rows, in long double.
inline double pearson(std::span<const double> x, std::span<const double> y) {
  long double mx = 0, my = 0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    mx += x[t];
    my += y[t];
  }
  mx /= x.size();
  my /= y.size();
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    sxy += (x[t] - mx) * (y[t] - my);
    sxx += (x[t] - mx) * (x[t] - mx);
    syy += (y[t] - my) * (y[t] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

inline std::vector<double> pearson_matrix(const DataMatrix& raw) {
  const std::size_t n = raw.n_rows();
  std::vector<double> c(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) c[i * n + j] = c[j * n + i] = i == j ? 1.0 : pearson(raw.row(i), raw.row(j));
  return c;
}

struct Ranked {
  NodeId id;
  double sim;
};

// Full-scan top-k by dot(q, row) / D over rows not in `skip`, ties by ascending id.
inline std::vector<Ranked> brute_top_k(const DataMatrix& m, std::span<const double> q, std::size_t k,
                                       const std::vector<bool>& skip = {}) {
  std::vector<Ranked> all;
  for (std::size_t i = 0; i < m.n_rows(); ++i) {
    if (!skip.empty() && skip[i]) continue;
    long double s = 0;
    const auto r = m.row(i);
    for (std::size_t t = 0; t < q.size(); ++t) s += static_cast<long double>(q[t]) * r[t];
    all.push_back({static_cast<NodeId>(i), static_cast<double>(s / q.size())});
  }
  std::sort(all.begin(), all.end(), [](const Ranked& a, const Ranked& b) {
    return a.sim > b.sim || (a.sim == b.sim && a.id < b.id);
  });
  if (all.size() > k) all.resize(k);
  return all;
}

struct GreedyStep {
  std::array<NodeId, 3> face;
  NodeId node;
  double gain;
  std::size_t rank; // 1-based birth-order rank of the face among live faces
  std::size_t live; // live faces before the insertion
};

// Greedy TMFG from a correlation matrix, scoring every (live face, remaining
// node) pair at every step. Faces are subdivided as (v,b,c), (a,v,c), (a,b,v).
// Ties: higher gain, lower node, older face.
inline std::pair<std::set<std::pair<NodeId, NodeId>>, std::vector<GreedyStep>>
exhaustive_greedy(const std::vector<double>& corr, std::size_t n, std::array<NodeId, 4> seed) {
  std::set<std::pair<NodeId, NodeId>> edges;
  const auto link = [&](NodeId a, NodeId b) { edges.insert({std::min(a, b), std::max(a, b)}); };
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) link(seed[a], seed[b]);
  std::vector<std::array<NodeId, 3>> faces = {{seed[0], seed[1], seed[2]},
                                              {seed[0], seed[1], seed[3]},
                                              {seed[0], seed[2], seed[3]},
                                              {seed[1], seed[2], seed[3]}};
  std::vector<bool> alive(4, true), used(n, false);
  for (NodeId s : seed) used[s] = true;
  std::vector<GreedyStep> steps;
  for (std::size_t step = 4; step < n; ++step) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_face = 0;
    NodeId best_node = 0;
    for (NodeId v = 0; v < n; ++v) {
      if (used[v]) continue;
      for (std::size_t f = 0; f < faces.size(); ++f) {
        if (!alive[f]) continue;
        const double g = corr[v * n + faces[f][0]] + corr[v * n + faces[f][1]] + corr[v * n + faces[f][2]];
        // Nodes and faces are visited in ascending order, so only a strictly
        // larger gain may replace the incumbent.
        if (g > best) {
          best = g;
          best_face = f;
          best_node = v;
        }
      }
    }
    const auto fv = faces[best_face];
    std::size_t rank = 0, live = 0;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (!alive[f]) continue;
      ++live;
      if (f <= best_face) ++rank;
    }
    steps.push_back({fv, best_node, best, rank, live});
    for (NodeId u : fv) link(best_node, u);
    used[best_node] = true;
    alive[best_face] = false;
    faces.push_back({best_node, fv[1], fv[2]});
    faces.push_back({fv[0], best_node, fv[2]});
    faces.push_back({fv[0], fv[1], best_node});
    alive.insert(alive.end(), 3, true);
  }
  return {edges, steps};
}

inline std::set<std::pair<NodeId, NodeId>> edge_set(const EdgeList& e) {
  std::set<std::pair<NodeId, NodeId>> s;
  for (const auto& x : e.edges()) s.insert({x.u, x.v});
  return s;
}

// Hop distances by Floyd-Warshall; unreachable pairs stay at `infinity`.
inline constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max() / 4;

inline std::vector<std::size_t> all_pairs_hops(const EdgeList& e) {
  const std::size_t n = e.n_nodes();
  std::vector<std::size_t> d(n * n, kUnreachable);
  for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 0;
  for (const auto& x : e.edges()) d[x.u * n + x.v] = d[x.v * n + x.u] = 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        d[i * n + j] = std::min(d[i * n + j], d[i * n + k] + d[k * n + j]);
  return d;
}

inline std::size_t components(const EdgeList& e) {
  const std::size_t n = e.n_nodes();
  std::vector<std::vector<NodeId>> adj(n);
  for (const auto& x : e.edges()) {
    adj[x.u].push_back(x.v);
    adj[x.v].push_back(x.u);
  }
  std::vector<bool> seen(n, false);
  std::size_t count = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    ++count;
    std::queue<std::size_t> q;
    q.push(s);
    seen[s] = true;
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop();
      for (NodeId v : adj[u])
        if (!seen[v]) {
          seen[v] = true;
          q.push(v);
        }
    }
  }
  return count;
}

} // namespace testing_support
