#pragma once

#include "atmfg/dataset.hpp"
#include "atmfg/edge_list.hpp"

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace atmfg {

struct TraceStep {
  // 1-based birth-order rank of the selected face among the live faces.
  std::size_t j = 0;
  // Live faces before the insertion.
  std::size_t universe_size = 0;
  NodeId node = 0;
  double gain = 0.0;
};

struct ConstructionTrace {
  std::array<NodeId, 4> seed{};
  std::vector<TraceStep> steps;
};

struct ExactOptions {
  // Builds above max_nodes are refused unless force is set.
  bool force = false;
  std::size_t max_nodes = 30000;
  // Replace the greedy seed tetrahedron (used to line up with other builders).
  std::optional<std::array<NodeId, 4>> seed;
};

struct ExactResult {
  EdgeList edges;
  ConstructionTrace trace;
};

// Greedy TMFG over the full correlation matrix. Each step attaches the
// remaining node with the largest summed correlation to one live face, then
// replaces that face by its three subdivisions. Ties go to the lower node id,
// then the older face. Throws SizeError for N < 4 or N above the cap.
ExactResult build_exact_tmfg(const DataMatrix& m, const ExactOptions& options = {});

// L_j = (j - |F|) / |F| per step: 0 for the newest face, towards -1 for the oldest.
std::vector<double> face_location_stats(const ConstructionTrace& trace);

struct LocationBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};

// Equal-width bins over [-1, 0]; the last bin is closed on the right.
std::vector<LocationBin> location_histogram(const std::vector<double>& locations, std::size_t bins);

struct ValidationCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  bool ok() const;
  const ValidationCheck* find(const std::string& name) const;
};

// Checks: "edge_count" (3N - 6), "connected", "degree3_at_insertion",
// "universe_growth" (|F| = 4 + 2t).
ValidationReport validate_tmfg(const EdgeList& e, const ConstructionTrace& trace);

// CSV with header step,j,universe_size,node,gain.
void write_trace_csv(const ConstructionTrace& trace, const std::filesystem::path& path);

} // namespace atmfg
