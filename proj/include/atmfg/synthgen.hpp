#pragma once

#include "atmfg/dataset.hpp"
#include "atmfg/edge_list.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace atmfg {

// One-factor Gaussian mixture: row i in cluster s is
// g * eta_s + sqrt(1 - g^2) * eps_i, with eta_s and eps_i standard normal paths
// of length T. Clusters are contiguous blocks of ceil(n / K) rows.
struct FactorModelParams {
  std::size_t n = 1000;
  std::size_t n_clusters = 5;
  // Either one loading for all clusters or one per cluster.
  std::vector<double> loadings{0.5};
  std::size_t n_samples = 2000;
  std::uint64_t seed = 0;
};

struct FactorModelData {
  DataMatrix data; // raw (not normalized), values rounded to float32
  std::vector<std::uint32_t> labels;
};

// ParameterError if K > n, K == 0, any loading outside (0, 1), or T < 2.
FactorModelData gen_factor_model(const FactorModelParams& p);

// Random Apollonian network: K4 on nodes 0..3, then node t attaches to a
// uniformly chosen live face, which is replaced by its three subdivisions.
// Weights are 1. SizeError if n < 4.
EdgeList gen_planar_ground_truth(std::size_t n, std::uint64_t seed);

struct GmrfParams {
  EdgeList adjacency;
  double alpha = 0.25;
  std::size_t n_samples = 2000;
  std::uint64_t seed = 0;
};

// Y = (I + (alpha / 2) A) X with X an n x T standard normal draw, evaluated
// sparsely. Column covariance is I + alpha A + (alpha^2 / 4) A^2.
// StructureError on repeated edges; ParameterError if alpha < 0 or T < 2.
// alpha = 0 returns X itself. Output values are rounded to float32.
DataMatrix gen_gmrf(const GmrfParams& p);

// Dense I + alpha A + (alpha^2 / 4) A^2.
std::vector<double> gmrf_covariance(const EdgeList& adjacency, double alpha);

// alpha^2 / 4, the weight of two-hop paths in the covariance.
inline double two_hop_coefficient(double alpha) { return alpha * alpha / 4.0; }

// Above this alpha two-hop terms outweigh direct ones.
inline constexpr double kTwoHopSuppressionLimit = 2.0;

} // namespace atmfg
