#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace atmfg::bench {

enum class Preset { alpha_heatmap, k_sweep, universe_sweep, runtime };

// ParameterError on an unknown name.
Preset parse_preset(std::string_view name);
std::string preset_name(Preset p);

// A universe limit as written on the command line: "auto", "inf", an absolute
// count ("500") or a fraction of N ("0.3N").
struct UniverseSpec {
  enum class Kind { automatic, unbounded, absolute, fraction };
  Kind kind = Kind::automatic;
  double value = 0.0;

  // Value for AtmfgConfig::universe_limit.
  std::size_t resolve(std::size_t n) const;
  std::string text() const;
};

// ParameterError on anything else.
UniverseSpec parse_universe(std::string_view text);

struct BenchGrid {
  Preset preset = Preset::alpha_heatmap;
  std::vector<std::size_t> sizes;
  std::vector<double> alphas;
  std::vector<std::size_t> ks;
  std::vector<UniverseSpec> universes;
  std::size_t repeats = 5;
  std::size_t samples = 2000;
  std::uint64_t seed = 0;
  // Also time the exact builder (runtime preset), for N up to exact_cap.
  bool with_exact = false;
  std::size_t exact_cap = 30000;
  // Worker slots for independent cells.
  std::size_t threads = 1;
};

// Grid axes for each preset; CLI flags override individual axes.
BenchGrid default_grid(Preset p);

// ParameterError on an empty axis, N < 4, alpha < 0, k < 3 or repeats == 0.
void validate(const BenchGrid& g);

// Number of rows run_bench() will produce.
std::size_t row_count(const BenchGrid& g);

struct BenchRow {
  std::string builder; // "atmfg" or "exact"
  std::size_t n = 0;
  std::size_t k = 0;
  std::string universe; // resolved count or "inf"
  double alpha = 0.0;
  std::size_t repeat = 0;
  double jaccard = 0.0; // against the planar ground truth
  double wall_seconds = 0.0;
  std::size_t peak_universe = 0;
  std::size_t rescues = 0;
};

// Called after each finished row, from worker threads.
using Progress = std::function<void(const BenchRow&)>;

// Every cell builds on GMRF data over a random planar ground truth. Data are
// shared by all (k, U) cells of one (N, alpha, repeat) triple, and the noise
// draw is shared across alpha. Rows come back in grid order regardless of
// the number of threads.
std::vector<BenchRow> run_bench(const BenchGrid& g, const Progress& progress = {});

// Columns builder,N,k,U,alpha,jaccard,wall_seconds,peak_universe.
std::string format_csv(const std::vector<BenchRow>& rows);

nlohmann::json to_json(const BenchGrid& g);

// Worker slots: ATMFG_THREADS if set and positive, otherwise the hardware
// concurrency, never below 1.
std::size_t worker_threads();

} // namespace atmfg::bench
