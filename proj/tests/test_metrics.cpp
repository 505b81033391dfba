#include "atmfg/error.hpp"
#include "atmfg/metrics.hpp"
#include "atmfg/synthgen.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace atmfg;

namespace {

EdgeList from_pairs(std::size_t n, std::initializer_list<std::pair<NodeId, NodeId>> pairs) {
  EdgeList e(n);
  for (auto [u, v] : pairs) e.add(u, v, 1.0);
  return e;
}

EdgeList random_subset(const EdgeList& base, double keep, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(keep);
  EdgeList e(base.n_nodes());
  for (const auto& x : base.edges())
    if (coin(rng)) e.add(x.u, x.v, x.w);
  return e;
}

EdgeList set_union(const EdgeList& a, const EdgeList& b) {
  EdgeList u(a.n_nodes());
  for (const auto& [x, y] : testing_support::edge_set(a)) u.add(x, y, 1);
  const auto sa = testing_support::edge_set(a);
  for (const auto& [x, y] : testing_support::edge_set(b))
    if (!sa.count({x, y})) u.add(x, y, 1);
  return u;
}

// Mean intra-cluster hop distance from Floyd-Warshall, weighted by cluster size.
double oracle_l_weighted(const EdgeList& e, const std::vector<std::uint32_t>& labels) {
  const std::size_t n = e.n_nodes();
  const auto d = testing_support::all_pairs_hops(e);
  std::uint32_t k = 0;
  for (auto l : labels) k = std::max(k, l + 1);
  std::vector<long double> sum(k, 0);
  std::vector<std::size_t> size(k, 0), pairs(k, 0);
  for (NodeId i = 0; i < n; ++i) {
    ++size[labels[i]];
    for (NodeId j = 0; j < n; ++j)
      if (i != j && labels[i] == labels[j]) {
        sum[labels[i]] += d[i * n + j];
        ++pairs[labels[i]];
      }
  }
  std::size_t total = 0;
  for (std::uint32_t c = 0; c < k; ++c)
    if (size[c] >= 2) total += size[c];
  long double l = 0;
  for (std::uint32_t c = 0; c < k; ++c)
    if (size[c] >= 2) l += (static_cast<long double>(size[c]) / total) * (sum[c] / pairs[c]);
  return static_cast<double>(l);
}

} // namespace

TEST(Jaccard, Examples) {
  const EdgeList a = from_pairs(5, {{1, 2}, {2, 3}});
  const EdgeList b = from_pairs(5, {{2, 3}, {3, 4}});
  EXPECT_DOUBLE_EQ(jaccard(a, b), 1.0 / 3.0);
  EXPECT_EQ(jaccard(a, a), 1.0);
  EXPECT_EQ(jaccard(a, from_pairs(5, {{0, 4}})), 0.0);
  EXPECT_EQ(jaccard(EdgeList(5), EdgeList(5)), 1.0);
  // Weights and orientation are ignored.
  EXPECT_EQ(jaccard(from_pairs(5, {{2, 1}}), from_pairs(5, {{1, 2}})), 1.0);
}

TEST(Jaccard, PropertySymmetryAndMonotonicity) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const EdgeList base = gen_planar_ground_truth(4 + rng() % 60, rng());
    const EdgeList a = random_subset(base, 0.6, rng), b = random_subset(base, 0.6, rng);
    const double ab = jaccard(a, b);
    ASSERT_EQ(ab, jaccard(b, a));
    ASSERT_GE(ab, 0.0);
    ASSERT_LE(ab, 1.0);
    ASSERT_EQ(ab == 1.0, testing_support::edge_set(a) == testing_support::edge_set(b));
    ASSERT_GE(jaccard(a, set_union(a, b)), ab);
  }
}

TEST(Partition, SizesAndErrors) {
  const Partition p({0, 1, 1, 2, 0});
  EXPECT_EQ(p.n_clusters(), 3u);
  EXPECT_EQ(p.sizes(), (std::vector<std::size_t>{2, 2, 1}));
  EXPECT_EQ(p.members(1), (std::vector<NodeId>{1, 2}));
  EXPECT_THROW(Partition({0, 2, 2}), ParameterError);
  EXPECT_THROW(Partition({1, 1}), ParameterError);
}

TEST(IntraClusterPath, CompleteGraph) {
  const EdgeList k4 = from_pairs(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  const PathResult r = weighted_intra_cluster_path(k4, Partition({0, 0, 0, 0}));
  EXPECT_EQ(r.l_weighted, 1.0);
  ASSERT_EQ(r.per_cluster.size(), 1u);
  EXPECT_EQ(r.per_cluster[0].pairs, 12u);
}

TEST(IntraClusterPath, ThreeNodePath) {
  const EdgeList path = from_pairs(3, {{0, 1}, {1, 2}});
  const PathResult r = weighted_intra_cluster_path(path, Partition({0, 0, 0}));
  EXPECT_DOUBLE_EQ(r.l_weighted, 4.0 / 3.0);
}

TEST(IntraClusterPath, SingletonSkippedAndRenormalized) {
  const EdgeList path = from_pairs(4, {{0, 1}, {1, 2}, {2, 3}});
  const PathResult r = weighted_intra_cluster_path(path, Partition({0, 0, 0, 1}));
  EXPECT_DOUBLE_EQ(r.l_weighted, 4.0 / 3.0);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_TRUE(r.per_cluster[1].skipped);
  EXPECT_DOUBLE_EQ(r.per_cluster[0].weight, 1.0);
}

TEST(IntraClusterPath, FullGraphVersusInduced) {
  // Cluster {0, 2} is joined only through node 1 of the other cluster.
  const EdgeList path = from_pairs(4, {{0, 1}, {1, 2}, {2, 3}});
  const Partition p({0, 1, 0, 1});
  EXPECT_DOUBLE_EQ(weighted_intra_cluster_path(path, p).l_weighted, 2.0);
  PathOptions induced;
  induced.induced = true;
  EXPECT_THROW(weighted_intra_cluster_path(path, p, induced), StructureError);
}

TEST(IntraClusterPath, Errors) {
  const EdgeList split = from_pairs(4, {{0, 1}, {2, 3}});
  EXPECT_THROW(weighted_intra_cluster_path(split, Partition({0, 0, 0, 0})), StructureError);
  EXPECT_THROW(weighted_intra_cluster_path(split, Partition({0, 0, 0})), InputMismatchError);
}

TEST(IntraClusterPath, PropertyMatchesFloydWarshall) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 4 + rng() % 50;
    const EdgeList g = gen_planar_ground_truth(n, rng());
    const std::uint32_t k = 1 + rng() % 4;
    std::vector<std::uint32_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = i < k ? static_cast<std::uint32_t>(i) : rng() % k;
    const PathResult r = weighted_intra_cluster_path(g, Partition(labels));
    ASSERT_NEAR(r.l_weighted, oracle_l_weighted(g, labels), 1e-12) << "trial " << trial;
    double weight = 0;
    for (const auto& c : r.per_cluster) {
      ASSERT_FALSE(c.sampled);
      if (!c.skipped) weight += c.weight;
    }
    ASSERT_NEAR(weight, 1.0, 1e-12);
  }
}

TEST(IntraClusterPath, SamplingIsSeededAndClose) {
  const EdgeList g = gen_planar_ground_truth(400, 5);
  const std::vector<std::uint32_t> labels(400, 0);
  const double exact = weighted_intra_cluster_path(g, Partition(labels)).l_weighted;
  PathOptions o;
  o.max_pairs_per_cluster = 5000;
  o.seed = 9;
  const PathResult a = weighted_intra_cluster_path(g, Partition(labels), o);
  const PathResult b = weighted_intra_cluster_path(g, Partition(labels), o);
  EXPECT_TRUE(a.per_cluster[0].sampled);
  EXPECT_EQ(a.per_cluster[0].pairs, 5000u);
  EXPECT_EQ(a.l_weighted, b.l_weighted);
  EXPECT_NEAR(a.l_weighted, exact, 0.05 * exact);
}

TEST(GraphAudit, CompleteGraphAndEmptyGraph) {
  const AuditReport k4 = graph_audit(from_pairs(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}));
  EXPECT_EQ(k4.edges, 6u);
  EXPECT_EQ(k4.expected_edges, 6u);
  EXPECT_EQ(k4.components, 1u);
  EXPECT_EQ(k4.min_degree, 3u);
  EXPECT_EQ(k4.max_degree, 3u);
  EXPECT_EQ(k4.degree_histogram.at(3), 4u);

  const AuditReport empty = graph_audit(EdgeList(5));
  EXPECT_EQ(empty.components, 5u);
  EXPECT_EQ(empty.min_degree, 0u);
  EXPECT_EQ(count_components(EdgeList(5)), 5u);
}

TEST(GraphAudit, JsonKeys) {
  const nlohmann::json j = to_json(graph_audit(gen_planar_ground_truth(10, 1)));
  for (const char* key : {"n_nodes", "edges", "expected_edges", "components", "min_deg", "max_deg", "degree_histogram"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["edges"], 24);
}
