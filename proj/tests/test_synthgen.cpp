#include "atmfg/error.hpp"
#include "atmfg/synthgen.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>

using namespace atmfg;

namespace {

// (I + (a/2) A)(I + (a/2) A)^T, formed densely without using A^2.
std::vector<double> factored_covariance(const EdgeList& adj, double alpha) {
  const std::size_t n = adj.n_nodes();
  std::vector<double> l(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) l[i * n + i] = 1.0;
  for (const auto& e : adj.edges()) {
    l[e.u * n + e.v] += alpha / 2;
    l[e.v * n + e.u] += alpha / 2;
  }
  std::vector<double> c(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t t = 0; t < n; ++t) c[i * n + j] += l[i * n + t] * l[j * n + t];
  return c;
}

EdgeList random_graph(std::size_t n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  EdgeList e(n);
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (coin(rng)) e.add(u, v, 1.0);
  return e;
}

double mean_correlation(const DataMatrix& raw, const std::vector<std::uint32_t>& labels, bool same) {
  long double sum = 0;
  std::size_t count = 0;
  for (NodeId i = 0; i < raw.n_rows(); ++i)
    for (NodeId j = i + 1; j < raw.n_rows(); ++j) {
      if ((labels[i] == labels[j]) != same) continue;
      sum += testing_support::pearson(raw.row(i), raw.row(j));
      ++count;
    }
  return static_cast<double>(sum / count);
}

} // namespace

TEST(FactorModel, LabelsAreContiguousBlocks) {
  FactorModelParams p;
  p.n = 23;
  p.n_clusters = 5;
  p.n_samples = 10;
  const FactorModelData d = gen_factor_model(p);
  EXPECT_EQ(d.data.n_rows(), 23u);
  EXPECT_EQ(d.data.n_cols(), 10u);
  // Blocks of ceil(23 / 5) = 5.
  const std::vector<std::uint32_t> want = {0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 3, 3, 3, 3, 3, 4, 4, 4};
  EXPECT_EQ(d.labels, want);
}

TEST(FactorModel, CorrelationMatchesLoadingSquared) {
  FactorModelParams p;
  p.n = 1000;
  p.n_clusters = 5;
  p.loadings = {0.5};
  p.n_samples = 10000;
  p.seed = 17;
  const FactorModelData d = gen_factor_model(p);
  // A subsample keeps the brute-force Pearson pass short.
  std::vector<std::vector<double>> rows;
  std::vector<std::uint32_t> labels;
  for (NodeId i = 0; i < 1000; i += 10) {
    rows.emplace_back(d.data.row(i).begin(), d.data.row(i).end());
    labels.push_back(d.labels[i]);
  }
  const DataMatrix sub = DataMatrix::from_rows(rows);
  EXPECT_NEAR(mean_correlation(sub, labels, true), 0.25, 0.02);
  EXPECT_NEAR(mean_correlation(sub, labels, false), 0.0, 0.02);
}

TEST(FactorModel, PerClusterLoadings) {
  FactorModelParams p;
  p.n = 40;
  p.n_clusters = 2;
  p.loadings = {0.9, 0.1};
  p.n_samples = 20000;
  p.seed = 3;
  const FactorModelData d = gen_factor_model(p);
  EXPECT_NEAR(testing_support::pearson(d.data.row(0), d.data.row(1)), 0.81, 0.03);
  EXPECT_NEAR(testing_support::pearson(d.data.row(30), d.data.row(31)), 0.01, 0.03);
}

TEST(FactorModel, Errors) {
  FactorModelParams p;
  p.n = 4;
  p.n_clusters = 5;
  EXPECT_THROW(gen_factor_model(p), ParameterError);
  p = {};
  p.n_clusters = 0;
  EXPECT_THROW(gen_factor_model(p), ParameterError);
  p = {};
  p.loadings = {1.0};
  EXPECT_THROW(gen_factor_model(p), ParameterError);
  p = {};
  p.loadings = {0.0};
  EXPECT_THROW(gen_factor_model(p), ParameterError);
  p = {};
  p.loadings = {0.5, 0.5};
  EXPECT_THROW(gen_factor_model(p), ParameterError);
  p = {};
  p.n_samples = 1;
  EXPECT_THROW(gen_factor_model(p), ParameterError);
}

TEST(FactorModel, Reproducible) {
  FactorModelParams p;
  p.n = 50;
  p.n_samples = 30;
  p.seed = 99;
  const auto a = gen_factor_model(p), b = gen_factor_model(p);
  EXPECT_EQ(a.data.values(), b.data.values());
  p.seed = 100;
  EXPECT_NE(gen_factor_model(p).data.values(), a.data.values());
}

TEST(PlanarGroundTruth, SmallCases) {
  EXPECT_EQ(gen_planar_ground_truth(4, 1).size(), 6u);
  const EdgeList e = gen_planar_ground_truth(100, 1);
  EXPECT_EQ(e.size(), 294u);
  EXPECT_EQ(testing_support::components(e), 1u);
  EXPECT_THROW(gen_planar_ground_truth(3, 1), SizeError);
}

TEST(PlanarGroundTruth, PropertyApollonianStructure) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 4 + rng() % 400;
    const EdgeList e = gen_planar_ground_truth(n, rng());
    ASSERT_EQ(e.size(), 3 * n - 6);
    ASSERT_FALSE(e.has_duplicates());
    ASSERT_EQ(testing_support::components(e), 1u);
    // Node t attaches to three earlier nodes: replaying in id order, every
    // node past the seed has exactly three lower-id neighbors, all mutually
    // adjacent.
    const auto s = testing_support::edge_set(e);
    std::vector<std::vector<NodeId>> lower(n);
    for (const auto& [u, v] : s) lower[v].push_back(u);
    std::size_t entered_with_three = 0;
    for (NodeId v = 4; v < n; ++v) {
      ASSERT_EQ(lower[v].size(), 3u) << "node " << v;
      const auto& f = lower[v];
      ASSERT_TRUE(s.count({f[0], f[1]}) && s.count({f[0], f[2]}) && s.count({f[1], f[2]}));
      ++entered_with_three;
    }
    EXPECT_EQ(entered_with_three, n - 4);
  }
}

TEST(PlanarGroundTruth, Reproducible) {
  EXPECT_EQ(format_edgelist_tsv(gen_planar_ground_truth(300, 8)), format_edgelist_tsv(gen_planar_ground_truth(300, 8)));
  EXPECT_NE(format_edgelist_tsv(gen_planar_ground_truth(300, 8)), format_edgelist_tsv(gen_planar_ground_truth(300, 9)));
}

TEST(Gmrf, AlphaZeroIsIdentity) {
  GmrfParams p;
  p.adjacency = gen_planar_ground_truth(10, 1);
  p.alpha = 0.0;
  p.n_samples = 20;
  p.seed = 4;
  const DataMatrix y = gen_gmrf(p);
  p.adjacency = EdgeList(10);
  EXPECT_EQ(gen_gmrf(p).values(), y.values());
}

TEST(Gmrf, SparseTransformMatchesDefinition) {
  EdgeList path(3);
  path.add(0, 1, 1);
  path.add(1, 2, 1);
  GmrfParams p;
  p.adjacency = path;
  p.alpha = 0.5;
  p.n_samples = 40;
  p.seed = 12;
  const DataMatrix y = gen_gmrf(p);
  p.adjacency = EdgeList(3);
  const DataMatrix x = gen_gmrf(p);
  for (std::size_t t = 0; t < 40; ++t) {
    const double x0 = x.row(0)[t], x1 = x.row(1)[t], x2 = x.row(2)[t];
    // Outputs are stored at float32 precision.
    EXPECT_NEAR(y.row(0)[t], x0 + 0.25 * x1, 1e-5);
    EXPECT_NEAR(y.row(1)[t], x1 + 0.25 * (x0 + x2), 1e-5);
    EXPECT_NEAR(y.row(2)[t], x2 + 0.25 * x1, 1e-5);
  }
}

TEST(Gmrf, TwoNodeCovariance) {
  EdgeList a(2);
  a.add(0, 1, 1);
  const auto c = gmrf_covariance(a, 1.0);
  EXPECT_EQ(c, (std::vector<double>{1.25, 1.0, 1.0, 1.25}));
}

TEST(Gmrf, PropertyCovarianceIdentity) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 8;
    const EdgeList a = random_graph(n, 0.5, rng);
    const double alpha = std::uniform_real_distribution<double>(0.0, 3.0)(rng);
    const auto analytic = gmrf_covariance(a, alpha);
    const auto factored = factored_covariance(a, alpha);
    ASSERT_EQ(analytic.size(), n * n);
    for (std::size_t i = 0; i < n * n; ++i) ASSERT_NEAR(analytic[i], factored[i], 1e-12);
  }
}

TEST(Gmrf, EmpiricalCovarianceOnPath) {
  EdgeList path(5);
  for (NodeId i = 0; i + 1 < 5; ++i) path.add(i, i + 1, 1);
  GmrfParams p;
  p.adjacency = path;
  p.alpha = 0.5;
  p.n_samples = 50000;
  p.seed = 2;
  const DataMatrix y = gen_gmrf(p);
  const auto c = gmrf_covariance(path, 0.5);
  for (NodeId i = 0; i < 5; ++i)
    for (NodeId j = 0; j < 5; ++j) {
      long double s = 0;
      for (std::size_t t = 0; t < p.n_samples; ++t) s += y.row(i)[t] * y.row(j)[t];
      EXPECT_NEAR(static_cast<double>(s / p.n_samples), c[i * 5 + j], 0.04) << i << "," << j;
    }
}

TEST(Gmrf, TwoHopCoefficient) {
  EXPECT_EQ(two_hop_coefficient(0.5), 0.0625);
  EXPECT_EQ(two_hop_coefficient(kTwoHopSuppressionLimit), 1.0);
  for (double a = 0.0; a <= kTwoHopSuppressionLimit; a += 0.125) EXPECT_LE(two_hop_coefficient(a), 1.0);
  // On a 3-node path the (0, 2) entry is exactly the two-hop weight.
  EdgeList path(3);
  path.add(0, 1, 1);
  path.add(1, 2, 1);
  EXPECT_DOUBLE_EQ(gmrf_covariance(path, 0.8)[2], two_hop_coefficient(0.8));
}

TEST(Gmrf, ReproducibleBitwise) {
  GmrfParams p;
  p.adjacency = gen_planar_ground_truth(50, 3);
  p.n_samples = 100;
  p.seed = 77;
  const DataMatrix a = gen_gmrf(p), b = gen_gmrf(p);
  ASSERT_EQ(a.values().size(), b.values().size());
  EXPECT_EQ(std::memcmp(a.values().data(), b.values().data(), a.values().size() * sizeof(double)), 0);
}

TEST(Gmrf, Errors) {
  GmrfParams p;
  p.adjacency = gen_planar_ground_truth(6, 1);
  p.alpha = -0.1;
  EXPECT_THROW(gen_gmrf(p), ParameterError);
  p.alpha = 0.25;
  p.n_samples = 1;
  EXPECT_THROW(gen_gmrf(p), ParameterError);
  p.n_samples = 10;
  p.adjacency.add(1, 0, 1);
  p.adjacency.add(0, 1, 1);
  EXPECT_THROW(gen_gmrf(p), StructureError);
}
