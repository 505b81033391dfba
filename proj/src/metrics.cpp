#include "atmfg/metrics.hpp"

#include "atmfg/error.hpp"
#include "atmfg/seeding.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <unordered_set>

namespace atmfg {

namespace {

struct Csr {
  std::vector<std::size_t> offsets;
  std::vector<NodeId> targets;
};

Csr to_csr(const EdgeList& e) {
  Csr g;
  const std::size_t n = e.n_nodes();
  g.offsets.assign(n + 1, 0);
  for (const Edge& edge : e.edges()) {
    ++g.offsets[edge.u + 1];
    ++g.offsets[edge.v + 1];
  }
  std::partial_sum(g.offsets.begin(), g.offsets.end(), g.offsets.begin());
  g.targets.resize(g.offsets.back());
  std::vector<std::size_t> fill(g.offsets.begin(), g.offsets.end() - 1);
  for (const Edge& edge : e.edges()) {
    g.targets[fill[edge.u]++] = edge.v;
    g.targets[fill[edge.v]++] = edge.u;
  }
  return g;
}

constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();

// Hop distances from src; with a cluster filter, only nodes of that cluster are traversed.
void bfs(const Csr& g, NodeId src, const std::vector<std::uint32_t>* labels, std::uint32_t cluster,
         std::vector<std::uint32_t>& dist, std::vector<NodeId>& queue) {
  std::fill(dist.begin(), dist.end(), kUnreached);
  queue.clear();
  dist[src] = 0;
  queue.push_back(src);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const NodeId u = queue[head];
    for (std::size_t p = g.offsets[u]; p < g.offsets[u + 1]; ++p) {
      const NodeId v = g.targets[p];
      if (dist[v] != kUnreached) continue;
      if (labels && (*labels)[v] != cluster) continue;
      dist[v] = dist[u] + 1;
      queue.push_back(v);
    }
  }
}

} // namespace

Partition::Partition(std::vector<std::uint32_t> labels) : labels_(std::move(labels)) {
  std::uint32_t max_id = 0;
  for (std::uint32_t l : labels_) max_id = std::max(max_id, l);
  sizes_.assign(labels_.empty() ? 0 : static_cast<std::size_t>(max_id) + 1, 0);
  for (std::uint32_t l : labels_) ++sizes_[l];
  for (std::size_t k = 0; k < sizes_.size(); ++k)
    if (sizes_[k] == 0)
      throw ParameterError("cluster ids must be contiguous from 0; id " + std::to_string(k) + " is unused");
}

std::vector<NodeId> Partition::members(std::uint32_t cluster) const {
  std::vector<NodeId> out;
  out.reserve(cluster < sizes_.size() ? sizes_[cluster] : 0);
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == cluster) out.push_back(static_cast<NodeId>(i));
  return out;
}

double jaccard(const EdgeList& a, const EdgeList& b) {
  std::unordered_set<std::uint64_t> sa;
  sa.reserve(a.size());
  for (const Edge& e : a.edges()) sa.insert(edge_key(e.u, e.v));
  std::unordered_set<std::uint64_t> sb;
  sb.reserve(b.size());
  for (const Edge& e : b.edges()) sb.insert(edge_key(e.u, e.v));
  if (sa.empty() && sb.empty()) return 1.0;
  std::size_t inter = 0;
  for (std::uint64_t key : sb) inter += sa.count(key);
  const std::size_t uni = sa.size() + sb.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

PathResult weighted_intra_cluster_path(const EdgeList& e, const Partition& p,
                                       const PathOptions& options) {
  if (p.n_nodes() != e.n_nodes())
    throw InputMismatchError("partition covers " + std::to_string(p.n_nodes()) +
                             " nodes, graph has " + std::to_string(e.n_nodes()));
  const Csr g = to_csr(e);
  const std::size_t n = e.n_nodes();
  std::vector<std::uint32_t> dist(n);
  std::vector<NodeId> queue;
  queue.reserve(n);

  PathResult result;
  std::size_t total = 0;
  for (std::uint32_t k = 0; k < p.n_clusters(); ++k) {
    ClusterPath cp;
    cp.cluster = k;
    cp.size = p.sizes()[k];
    if (cp.size < 2) {
      cp.skipped = true;
      result.warnings.push_back("cluster " + std::to_string(k) + " has a single node; skipped");
      result.per_cluster.push_back(cp);
      continue;
    }
    total += cp.size;
    const auto members = p.members(k);
    const std::vector<std::uint32_t>* filter = options.induced ? &p.labels() : nullptr;
    const std::size_t ordered_pairs = cp.size * (cp.size - 1);

    const auto unreachable = [&](NodeId a, NodeId b) {
      return StructureError("no path between nodes " + std::to_string(a) + " and " + std::to_string(b) +
                            (options.induced ? " inside cluster " + std::to_string(k) : std::string{}));
    };

    double sum = 0.0;
    if (ordered_pairs <= options.max_pairs_per_cluster) {
      for (NodeId src : members) {
        bfs(g, src, filter, k, dist, queue);
        for (NodeId dst : members) {
          if (dst == src) continue;
          if (dist[dst] == kUnreached) throw unreachable(src, dst);
          sum += dist[dst];
        }
      }
      cp.pairs = ordered_pairs;
    } else {
      std::mt19937_64 rng(derive_seed(options.seed, "intra_cluster_pairs", k));
      std::uniform_int_distribution<std::size_t> pick_src(0, cp.size - 1);
      std::uniform_int_distribution<std::size_t> pick_dst(0, cp.size - 2);
      std::vector<std::pair<NodeId, NodeId>> pairs(options.max_pairs_per_cluster);
      for (auto& pr : pairs) {
        const std::size_t s = pick_src(rng);
        std::size_t t = pick_dst(rng);
        if (t >= s) ++t;
        pr = {members[s], members[t]};
      }
      std::sort(pairs.begin(), pairs.end());
      for (std::size_t i = 0; i < pairs.size();) {
        const NodeId src = pairs[i].first;
        bfs(g, src, filter, k, dist, queue);
        for (; i < pairs.size() && pairs[i].first == src; ++i) {
          const NodeId dst = pairs[i].second;
          if (dist[dst] == kUnreached) throw unreachable(src, dst);
          sum += dist[dst];
        }
      }
      cp.pairs = pairs.size();
      cp.sampled = true;
    }
    cp.mean_path = sum / static_cast<double>(cp.pairs);
    result.per_cluster.push_back(cp);
  }
  for (ClusterPath& cp : result.per_cluster) {
    if (cp.skipped) continue;
    cp.weight = static_cast<double>(cp.size) / static_cast<double>(total);
    result.l_weighted += cp.weight * cp.mean_path;
  }
  return result;
}

std::size_t count_components(const EdgeList& e) {
  const std::size_t n = e.n_nodes();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = n;
  for (const Edge& edge : e.edges()) {
    const std::size_t a = find(edge.u);
    const std::size_t b = find(edge.v);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components;
}

AuditReport graph_audit(const EdgeList& e) {
  AuditReport a;
  a.n_nodes = e.n_nodes();
  a.edges = e.size();
  a.expected_edges = a.n_nodes >= 3 ? 3 * a.n_nodes - 6 : 0;
  a.components = count_components(e);
  std::vector<std::size_t> degree(a.n_nodes, 0);
  for (const Edge& edge : e.edges()) {
    ++degree[edge.u];
    ++degree[edge.v];
  }
  if (!degree.empty()) {
    a.min_degree = *std::min_element(degree.begin(), degree.end());
    a.max_degree = *std::max_element(degree.begin(), degree.end());
  }
  for (std::size_t d : degree) ++a.degree_histogram[d];
  return a;
}

nlohmann::json to_json(const AuditReport& a) {
  nlohmann::json hist = nlohmann::json::object();
  for (const auto& [deg, count] : a.degree_histogram) hist[std::to_string(deg)] = count;
  return {{"n_nodes", a.n_nodes},       {"edges", a.edges},           {"expected_edges", a.expected_edges},
          {"components", a.components}, {"min_deg", a.min_degree},    {"max_deg", a.max_degree},
          {"degree_histogram", hist}};
}

nlohmann::json to_json(const PathResult& r) {
  nlohmann::json per = nlohmann::json::array();
  for (const ClusterPath& cp : r.per_cluster)
    per.push_back({{"cluster", cp.cluster},
                   {"size", cp.size},
                   {"mean_path", cp.mean_path},
                   {"weight", cp.weight},
                   {"pairs", cp.pairs},
                   {"sampled", cp.sampled},
                   {"skipped", cp.skipped}});
  return {{"l_weighted", r.l_weighted}, {"per_cluster", per}, {"warnings", r.warnings}};
}

} // namespace atmfg
