#include "atmfg/synthgen.hpp"

#include "atmfg/error.hpp"
#include "atmfg/seeding.hpp"

#include <array>
#include <cmath>
#include <random>

namespace atmfg {

FactorModelData gen_factor_model(const FactorModelParams& p) {
  if (p.n_clusters == 0) throw ParameterError("need at least one cluster");
  if (p.n_clusters > p.n)
    throw ParameterError("K = " + std::to_string(p.n_clusters) + " exceeds n = " + std::to_string(p.n));
  if (p.n_samples < 2) throw ParameterError("need at least 2 samples per row");
  if (p.loadings.size() != 1 && p.loadings.size() != p.n_clusters)
    throw ParameterError("give one loading or one per cluster");
  for (double g : p.loadings)
    if (!(g > 0.0 && g < 1.0)) throw ParameterError("loadings must lie in (0, 1)");

  const std::size_t t_len = p.n_samples;
  std::mt19937_64 rng(derive_seed(p.seed, "factor_model"));
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<double> factors(p.n_clusters * t_len);
  for (double& v : factors) v = normal(rng);

  const std::size_t block = (p.n + p.n_clusters - 1) / p.n_clusters;
  FactorModelData out;
  out.labels.resize(p.n);
  std::vector<double> values(p.n * t_len);
  for (std::size_t i = 0; i < p.n; ++i) {
    const std::size_t s = i / block;
    out.labels[i] = static_cast<std::uint32_t>(s);
    const double g = p.loadings.size() == 1 ? p.loadings[0] : p.loadings[s];
    const double idio = std::sqrt(1.0 - g * g);
    const double* eta = factors.data() + s * t_len;
    double* row = values.data() + i * t_len;
    for (std::size_t t = 0; t < t_len; ++t) row[t] = g * eta[t] + idio * normal(rng);
  }
  out.data = DataMatrix(p.n, t_len, std::move(values));
  out.data.round_to_float32();
  return out;
}

EdgeList gen_planar_ground_truth(std::size_t n, std::uint64_t seed) {
  if (n < 4) throw SizeError("planar ground truth needs n >= 4, got " + std::to_string(n));
  std::mt19937_64 rng(derive_seed(seed, "planar_ground_truth"));
  EdgeList e(n);
  for (NodeId a = 0; a < 4; ++a)
    for (NodeId b = a + 1; b < 4; ++b) e.add(a, b, 1.0);
  std::vector<std::array<NodeId, 3>> faces{{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  faces.reserve(2 * n);
  for (std::size_t t = 4; t < n; ++t) {
    const auto v = static_cast<NodeId>(t);
    std::uniform_int_distribution<std::size_t> pick(0, faces.size() - 1);
    const std::size_t idx = pick(rng);
    const auto f = faces[idx];
    for (NodeId u : f) e.add(v, u, 1.0);
    faces[idx] = {v, f[1], f[2]};
    faces.push_back({f[0], v, f[2]});
    faces.push_back({f[0], f[1], v});
  }
  return e;
}

namespace {

std::vector<std::vector<NodeId>> adjacency_lists(const EdgeList& a) {
  if (a.has_duplicates()) throw StructureError("adjacency has repeated edges");
  std::vector<std::vector<NodeId>> adj(a.n_nodes());
  for (const Edge& e : a.edges()) {
    if (e.u == e.v) throw StructureError("adjacency has a nonzero diagonal");
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  return adj;
}

} // namespace

DataMatrix gen_gmrf(const GmrfParams& p) {
  const std::size_t n = p.adjacency.n_nodes();
  if (n == 0) throw ParameterError("adjacency has no nodes");
  if (!(p.alpha >= 0.0) || !std::isfinite(p.alpha)) throw ParameterError("alpha must be >= 0");
  if (p.n_samples < 2) throw ParameterError("need at least 2 samples per row");
  const auto adj = adjacency_lists(p.adjacency);

  const std::size_t t_len = p.n_samples;
  std::mt19937_64 rng(derive_seed(p.seed, "gmrf"));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x(n * t_len);
  for (double& v : x) v = normal(rng);

  const double half = p.alpha / 2.0;
  std::vector<double> y(x);
  if (half != 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      double* yi = y.data() + i * t_len;
      for (NodeId j : adj[i]) {
        const double* xj = x.data() + static_cast<std::size_t>(j) * t_len;
        for (std::size_t t = 0; t < t_len; ++t) yi[t] += half * xj[t];
      }
    }
  }
  DataMatrix out(n, t_len, std::move(y));
  out.round_to_float32();
  return out;
}

std::vector<double> gmrf_covariance(const EdgeList& adjacency, double alpha) {
  const std::size_t n = adjacency.n_nodes();
  const auto adj = adjacency_lists(adjacency);
  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (NodeId j : adj[i]) a[i * n + j] = 1.0;
  std::vector<double> c(n * n, 0.0);
  const double q = two_hop_coefficient(alpha);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double a2 = 0.0;
      for (std::size_t k = 0; k < n; ++k) a2 += a[i * n + k] * a[k * n + j];
      c[i * n + j] = (i == j ? 1.0 : 0.0) + alpha * a[i * n + j] + q * a2;
    }
  }
  return c;
}

} // namespace atmfg
