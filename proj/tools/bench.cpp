#include "bench.hpp"

#include "atmfg/engine.hpp"
#include "atmfg/error.hpp"
#include "atmfg/exact_tmfg.hpp"
#include "atmfg/metrics.hpp"
#include "atmfg/seeding.hpp"
#include "atmfg/synthgen.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <thread>

namespace atmfg::bench {

namespace {

struct Group {
  std::size_t n;
  double alpha;
  std::size_t repeat;
  std::size_t first_row;
};

struct Cell {
  std::string builder;
  std::size_t k;
  UniverseSpec universe;
};

std::vector<Cell> cells_for(const BenchGrid& g, std::size_t n) {
  std::vector<Cell> cells;
  for (std::size_t k : g.ks)
    for (const UniverseSpec& u : g.universes) cells.push_back({"atmfg", k, u});
  if (g.with_exact && n <= g.exact_cap) cells.push_back({"exact", n - 1, {UniverseSpec::Kind::unbounded, 0}});
  return cells;
}

std::string universe_label(std::size_t limit) {
  return limit == kUnboundedUniverse ? "inf" : std::to_string(limit);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

Preset parse_preset(std::string_view name) {
  if (name == "alpha-heatmap") return Preset::alpha_heatmap;
  if (name == "k-sweep") return Preset::k_sweep;
  if (name == "universe-sweep") return Preset::universe_sweep;
  if (name == "runtime") return Preset::runtime;
  throw ParameterError("unknown bench preset '" + std::string(name) +
                       "' (expected alpha-heatmap, k-sweep, universe-sweep or runtime)");
}

std::string preset_name(Preset p) {
  switch (p) {
  case Preset::alpha_heatmap: return "alpha-heatmap";
  case Preset::k_sweep: return "k-sweep";
  case Preset::universe_sweep: return "universe-sweep";
  case Preset::runtime: return "runtime";
  }
  return "?";
}

std::size_t UniverseSpec::resolve(std::size_t n) const {
  switch (kind) {
  case Kind::automatic: return default_universe_limit(n);
  case Kind::unbounded: return kUnboundedUniverse;
  case Kind::absolute: return static_cast<std::size_t>(value);
  case Kind::fraction: return std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(value * static_cast<double>(n))));
  }
  return kAutoUniverse;
}

std::string UniverseSpec::text() const {
  char buf[64];
  switch (kind) {
  case Kind::automatic: return "auto";
  case Kind::unbounded: return "inf";
  case Kind::absolute: return std::to_string(static_cast<std::size_t>(value));
  case Kind::fraction: std::snprintf(buf, sizeof buf, "%gN", value); return buf;
  }
  return "?";
}

UniverseSpec parse_universe(std::string_view text) {
  if (text == "auto") return {UniverseSpec::Kind::automatic, 0};
  if (text == "inf" || text == "unbounded") return {UniverseSpec::Kind::unbounded, 0};
  const bool fraction = !text.empty() && (text.back() == 'N' || text.back() == 'n');
  const std::string_view digits = fraction ? text.substr(0, text.size() - 1) : text;
  double value = 0.0;
  const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (digits.empty() || ec != std::errc() || end != digits.data() + digits.size() || !(value > 0.0))
    throw ParameterError("bad universe limit '" + std::string(text) + "' (expected auto, inf, a count or a fraction like 0.3N)");
  if (fraction) return {UniverseSpec::Kind::fraction, value};
  if (value < 4 || value != std::floor(value))
    throw ParameterError("universe limit must be an integer >= 4, got '" + std::string(text) + "'");
  return {UniverseSpec::Kind::absolute, value};
}

BenchGrid default_grid(Preset p) {
  BenchGrid g;
  g.preset = p;
  g.ks = {50};
  g.universes = {{UniverseSpec::Kind::automatic, 0}};
  switch (p) {
  case Preset::alpha_heatmap:
    g.sizes = {1000, 2000, 5000};
    g.alphas = {0.1, 0.2, 0.25, 0.3, 0.5, 0.75, 1.0};
    break;
  case Preset::k_sweep:
    g.sizes = {5000};
    g.alphas = {0.25};
    g.ks = {3, 15, 25, 50, 100, 150, 200};
    break;
  case Preset::universe_sweep:
    g.sizes = {10000};
    g.alphas = {0.25};
    g.universes = {{UniverseSpec::Kind::absolute, 500},   {UniverseSpec::Kind::fraction, 0.1},
                   {UniverseSpec::Kind::fraction, 0.2},   {UniverseSpec::Kind::fraction, 0.3},
                   {UniverseSpec::Kind::fraction, 0.5},   {UniverseSpec::Kind::unbounded, 0}};
    g.repeats = 1;
    break;
  case Preset::runtime:
    g.sizes = {5000, 10000, 20000};
    g.alphas = {0.25};
    g.universes = {{UniverseSpec::Kind::fraction, 0.3}};
    g.repeats = 1;
    break;
  }
  return g;
}

void validate(const BenchGrid& g) {
  if (g.sizes.empty() || g.alphas.empty() || g.ks.empty() || g.universes.empty())
    throw ParameterError("bench grid has an empty axis");
  if (g.repeats == 0) throw ParameterError("--repeats must be >= 1");
  if (g.samples < 2) throw ParameterError("--samples must be >= 2");
  for (std::size_t n : g.sizes)
    if (n < 4) throw ParameterError("bench sizes must be >= 4");
  for (double a : g.alphas)
    if (!(a >= 0.0)) throw ParameterError("bench alphas must be >= 0");
  for (std::size_t k : g.ks)
    if (k < 3) throw ParameterError("bench k values must be >= 3");
}

std::size_t row_count(const BenchGrid& g) {
  std::size_t rows = 0;
  for (std::size_t n : g.sizes) rows += cells_for(g, n).size();
  return rows * g.alphas.size() * g.repeats;
}

std::vector<BenchRow> run_bench(const BenchGrid& g, const Progress& progress) {
  validate(g);
  std::vector<Group> groups;
  std::size_t next_row = 0;
  for (std::size_t n : g.sizes)
    for (double alpha : g.alphas)
      for (std::size_t r = 0; r < g.repeats; ++r) {
        groups.push_back({n, alpha, r, next_row});
        next_row += cells_for(g, n).size();
      }
  std::vector<BenchRow> rows(next_row);

  std::atomic<std::size_t> cursor{0};
  std::mutex report;
  std::exception_ptr failure;
  const auto worker = [&] {
    for (;;) {
      const std::size_t gi = cursor.fetch_add(1);
      if (gi >= groups.size()) return;
      {
        std::lock_guard lock(report);
        if (failure) return;
      }
      try {
        const Group& grp = groups[gi];
        const std::uint64_t cell_seed = derive_seed(g.seed, "bench", grp.n * 1000003 + grp.repeat);
        const EdgeList truth = gen_planar_ground_truth(grp.n, derive_seed(cell_seed, "planar"));
        GmrfParams gp;
        gp.adjacency = truth;
        gp.alpha = grp.alpha;
        gp.n_samples = g.samples;
        gp.seed = derive_seed(cell_seed, "gmrf");
        const DataMatrix data = znormalize(gen_gmrf(gp));

        const auto cells = cells_for(g, grp.n);
        for (std::size_t c = 0; c < cells.size(); ++c) {
          BenchRow row;
          row.builder = cells[c].builder;
          row.n = grp.n;
          row.alpha = grp.alpha;
          row.repeat = grp.repeat;
          if (cells[c].builder == "exact") {
            const auto t0 = std::chrono::steady_clock::now();
            ExactOptions eo;
            eo.max_nodes = g.exact_cap;
            const ExactResult r = build_exact_tmfg(data, eo);
            row.wall_seconds = seconds_since(t0);
            row.k = grp.n - 1;
            row.universe = "inf";
            row.jaccard = jaccard(r.edges, truth);
            row.peak_universe = 2 * grp.n - 4;
          } else {
            AtmfgConfig cfg;
            cfg.k = cells[c].k;
            cfg.universe_limit = cells[c].universe.resolve(grp.n);
            cfg.seed = derive_seed(cell_seed, "atmfg");
            const AtmfgResult r = build_atmfg(data, cfg);
            row.k = r.stats.k_effective;
            row.universe = universe_label(r.stats.universe_limit);
            row.jaccard = jaccard(r.edges, truth);
            row.wall_seconds = r.stats.wall_seconds;
            row.peak_universe = r.stats.peak_universe;
            row.rescues = r.stats.rescues;
          }
          rows[grp.first_row + c] = row;
          if (progress) {
            std::lock_guard lock(report);
            progress(row);
          }
        }
      } catch (...) {
        std::lock_guard lock(report);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const std::size_t slots = std::max<std::size_t>(1, std::min(g.threads, groups.size()));
  if (slots == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < slots; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

std::string format_csv(const std::vector<BenchRow>& rows) {
  std::string out = "builder,N,k,U,alpha,jaccard,wall_seconds,peak_universe\n";
  char buf[256];
  for (const BenchRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%zu,%zu,%s,%g,%.6f,%.4f,%zu\n", r.builder.c_str(), r.n, r.k,
                  r.universe.c_str(), r.alpha, r.jaccard, r.wall_seconds, r.peak_universe);
    out += buf;
  }
  return out;
}

nlohmann::json to_json(const BenchGrid& g) {
  nlohmann::json j;
  j["preset"] = preset_name(g.preset);
  j["sizes"] = g.sizes;
  j["alphas"] = g.alphas;
  j["ks"] = g.ks;
  std::vector<std::string> us;
  for (const UniverseSpec& u : g.universes) us.push_back(u.text());
  j["universes"] = us;
  j["repeats"] = g.repeats;
  j["samples"] = g.samples;
  j["seed"] = g.seed;
  j["with_exact"] = g.with_exact;
  j["exact_cap"] = g.exact_cap;
  return j;
}

std::size_t worker_threads() {
  if (const char* env = std::getenv("ATMFG_THREADS")) {
    std::size_t v = 0;
    const std::string_view s(env);
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && end == s.data() + s.size() && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace atmfg::bench
