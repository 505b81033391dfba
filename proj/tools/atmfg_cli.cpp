// atmfg: build, generate, evaluate and benchmark TMFG-style graphs.
//
// Exit codes: 0 success, 2 parameter error, 3 size guard, 4 input
// inconsistency, 1 internal error.

#include "bench.hpp"

#include "atmfg/dataset.hpp"
#include "atmfg/edge_list.hpp"
#include "atmfg/engine.hpp"
#include "atmfg/error.hpp"
#include "atmfg/exact_tmfg.hpp"
#include "atmfg/metrics.hpp"
#include "atmfg/seeding.hpp"
#include "atmfg/simd/kernels.hpp"
#include "atmfg/synthgen.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

enum Exit { ok = 0, internal = 1, parameter = 2, size_guard = 3, input = 4 };

// "<dir>/<stem><suffix>" next to an output file.
fs::path sibling(const fs::path& out, const std::string& suffix) {
  fs::path p = out;
  p.replace_extension();
  return p.string() + suffix;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw atmfg::Error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw atmfg::Error("write failed: " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json manifest(const std::string& command) {
  json m;
  m["tool"] = "atmfg";
  m["version"] = kVersion;
  m["command"] = command;
  m["simd"] = atmfg::simd::isa_name(atmfg::simd::active_isa());
  return m;
}

atmfg::MatrixFormat parse_format(const std::string& name, const fs::path& path) {
  if (name == "auto") return atmfg::format_from_path(path);
  if (name == "csv") return atmfg::MatrixFormat::csv;
  if (name == "binary") return atmfg::MatrixFormat::binary;
  throw atmfg::ParameterError("unknown matrix format '" + name + "'");
}

void write_matrix(const atmfg::DataMatrix& m, const fs::path& path) {
  if (atmfg::format_from_path(path) == atmfg::MatrixFormat::csv)
    atmfg::write_csv(m, path);
  else
    atmfg::write_binary(m, path);
}

atmfg::DataMatrix load_normalized(const fs::path& path, const std::string& format) {
  const atmfg::DataMatrix raw = atmfg::load_matrix(path, parse_format(format, path));
  atmfg::DataMatrix m = atmfg::znormalize(raw);
  if (!m.degenerate_rows().empty())
    std::fprintf(stderr, "warning: %zu constant row(s) treated as uncorrelated\n", m.degenerate_rows().size());
  return m;
}

struct BuildArgs {
  std::string input, format = "auto", out, stats, manifest, steps;
  std::size_t k = 50, rescue_k = 8;
  std::string universe = "auto";
  std::uint64_t seed = 0;
  atmfg::IndexParams index;
};

int cmd_build(const BuildArgs& a) {
  const atmfg::DataMatrix m = load_normalized(a.input, a.format);
  atmfg::AtmfgConfig cfg;
  cfg.k = a.k;
  cfg.rescue_k = a.rescue_k;
  cfg.universe_limit = atmfg::bench::parse_universe(a.universe).resolve(m.n_rows());
  cfg.seed = a.seed;
  cfg.index = a.index;
  cfg.record_steps = !a.steps.empty();
  const atmfg::AtmfgResult r = atmfg::build_atmfg(m, cfg);

  const fs::path out = a.out;
  atmfg::write_edgelist_tsv(r.edges, out);
  const fs::path stats_path = a.stats.empty() ? sibling(out, ".stats.json") : fs::path(a.stats);
  write_text(stats_path, atmfg::to_json(r.stats) + "\n");
  if (!a.steps.empty()) {
    std::string csv = "step,face,a,b,c,node,score\n";
    char buf[160];
    for (std::size_t i = 0; i < r.steps.size(); ++i) {
      const auto& s = r.steps[i];
      std::snprintf(buf, sizeof buf, "%zu,%u,%u,%u,%u,%u,%.9f\n", i + 1, s.face, s.vertices[0],
                    s.vertices[1], s.vertices[2], s.node, s.score);
      csv += buf;
    }
    write_text(a.steps, csv);
  }

  json j = manifest("build");
  j["input"] = {{"path", a.input}, {"n", m.n_rows()}, {"d", m.n_cols()}, {"degenerate_rows", m.degenerate_rows().size()}};
  j["parameters"] = {{"k", a.k},
                     {"k_effective", r.stats.k_effective},
                     {"universe_limit", a.universe},
                     {"universe_limit_resolved", r.stats.universe_limit == atmfg::kUnboundedUniverse
                                                     ? json("inf")
                                                     : json(r.stats.universe_limit)},
                     {"clique_size", cfg.clique_size},
                     {"rescue_k", cfg.rescue_k},
                     {"index", {{"max_degree", a.index.max_degree},
                                {"ef_construction", a.index.ef_construction},
                                {"ef_search", a.index.ef_search},
                                {"exact_fallback_threshold", a.index.exact_fallback_threshold},
                                {"live_scan_threshold", a.index.live_scan_threshold},
                                {"seed", a.index.seed}}}};
  j["seed"] = a.seed;
  j["seed_clique"] = r.seed;
  j["outputs"] = {{"edgelist", out.string()}, {"stats", stats_path.string()}};
  if (!a.steps.empty()) j["outputs"]["steps"] = a.steps;
  write_json(a.manifest.empty() ? sibling(out, ".manifest.json") : fs::path(a.manifest), j);

  std::fprintf(stderr, "built %zu edges over %zu nodes in %.2fs (%zu rescues)\n", r.edges.size(), m.n_rows(),
               r.stats.wall_seconds, r.stats.rescues);
  return Exit::ok;
}

struct ExactArgs {
  std::string input, format = "auto", out, trace, locations, manifest;
  bool force = false;
  std::size_t bins = 20;
};

int cmd_build_exact(const ExactArgs& a) {
  const atmfg::DataMatrix m = load_normalized(a.input, a.format);
  atmfg::ExactOptions opt;
  opt.force = a.force;
  const auto t0 = std::chrono::steady_clock::now();
  const atmfg::ExactResult r = atmfg::build_exact_tmfg(m, opt);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const fs::path out = a.out;
  atmfg::write_edgelist_tsv(r.edges, out);
  const fs::path trace_path = a.trace.empty() ? sibling(out, ".trace.csv") : fs::path(a.trace);
  atmfg::write_trace_csv(r.trace, trace_path);

  const auto locations = atmfg::face_location_stats(r.trace);
  const auto hist = atmfg::location_histogram(locations, a.bins);
  std::string csv = "lo,hi,count\n";
  char buf[96];
  for (const auto& b : hist) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%zu\n", b.lo, b.hi, b.count);
    csv += buf;
  }
  const fs::path loc_path = a.locations.empty() ? sibling(out, ".locations.csv") : fs::path(a.locations);
  write_text(loc_path, csv);

  const atmfg::ValidationReport report = atmfg::validate_tmfg(r.edges, r.trace);
  json j = manifest("build-exact");
  j["input"] = {{"path", a.input}, {"n", m.n_rows()}, {"d", m.n_cols()}};
  j["parameters"] = {{"force", a.force}, {"max_nodes", opt.max_nodes}, {"bins", a.bins}};
  j["seed_clique"] = r.trace.seed;
  j["valid"] = report.ok();
  j["outputs"] = {{"edgelist", out.string()}, {"trace", trace_path.string()}, {"locations", loc_path.string()}};
  write_json(a.manifest.empty() ? sibling(out, ".manifest.json") : fs::path(a.manifest), j);
  if (!report.ok()) {
    for (const auto& c : report.checks)
      if (!c.passed) std::fprintf(stderr, "validation failed: %s: %s\n", c.name.c_str(), c.detail.c_str());
    return Exit::internal;
  }
  std::fprintf(stderr, "built %zu edges over %zu nodes in %.2fs\n", r.edges.size(), m.n_rows(), wall);
  return Exit::ok;
}

struct FactorArgs {
  std::size_t n = 1000, clusters = 5, samples = 2000;
  std::vector<double> loadings{0.5};
  std::uint64_t seed = 0;
  std::string out, labels, manifest;
};

int cmd_gen_factor(const FactorArgs& a) {
  atmfg::FactorModelParams p;
  p.n = a.n;
  p.n_clusters = a.clusters;
  p.loadings = a.loadings;
  p.n_samples = a.samples;
  p.seed = a.seed;
  const atmfg::FactorModelData d = atmfg::gen_factor_model(p);
  const fs::path out = a.out;
  write_matrix(d.data, out);
  const fs::path labels = a.labels.empty() ? sibling(out, ".labels.txt") : fs::path(a.labels);
  atmfg::write_labels(d.labels, labels);

  json j = manifest("gen factor");
  j["parameters"] = {{"n", a.n}, {"clusters", a.clusters}, {"loadings", a.loadings}, {"samples", a.samples}};
  j["seed"] = a.seed;
  j["outputs"] = {{"matrix", out.string()}, {"labels", labels.string()}};
  write_json(a.manifest.empty() ? sibling(out, ".manifest.json") : fs::path(a.manifest), j);
  return Exit::ok;
}

struct GmrfArgs {
  std::string graph, out, manifest;
  double alpha = 0.25;
  std::size_t samples = 2000;
  std::uint64_t seed = 0;
};

int cmd_gen_gmrf(const GmrfArgs& a) {
  atmfg::GmrfParams p;
  p.adjacency = atmfg::read_edgelist_tsv(a.graph);
  p.alpha = a.alpha;
  p.n_samples = a.samples;
  p.seed = a.seed;
  const atmfg::DataMatrix d = atmfg::gen_gmrf(p);
  const fs::path out = a.out;
  write_matrix(d, out);

  json j = manifest("gen gmrf");
  j["parameters"] = {{"graph", a.graph}, {"n", p.adjacency.n_nodes()}, {"alpha", a.alpha}, {"samples", a.samples}};
  j["seed"] = a.seed;
  j["outputs"] = {{"matrix", out.string()}};
  write_json(a.manifest.empty() ? sibling(out, ".manifest.json") : fs::path(a.manifest), j);
  return Exit::ok;
}

struct PlanarArgs {
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  std::string out, manifest;
};

int cmd_gen_planar(const PlanarArgs& a) {
  const atmfg::EdgeList e = atmfg::gen_planar_ground_truth(a.n, a.seed);
  const fs::path out = a.out;
  atmfg::write_edgelist_tsv(e, out);
  json j = manifest("gen planar");
  j["parameters"] = {{"n", a.n}};
  j["seed"] = a.seed;
  j["outputs"] = {{"edgelist", out.string()}};
  write_json(a.manifest.empty() ? sibling(out, ".manifest.json") : fs::path(a.manifest), j);
  return Exit::ok;
}

struct EvalArgs {
  std::vector<std::string> graphs;
  std::string truth, labels, out;
  bool pairwise = false, induced = false;
  std::size_t max_pairs = 10000;
  std::uint64_t seed = 0;
};

int cmd_eval(const EvalArgs& a) {
  std::vector<atmfg::EdgeList> graphs;
  for (const auto& g : a.graphs) graphs.push_back(atmfg::read_edgelist_tsv(g));
  std::optional<atmfg::EdgeList> truth;
  if (!a.truth.empty()) truth = atmfg::read_edgelist_tsv(a.truth);
  std::optional<atmfg::Partition> partition;
  if (!a.labels.empty()) partition.emplace(atmfg::read_labels(a.labels));

  const auto check_nodes = [](const atmfg::EdgeList& g, std::size_t n, const std::string& what) {
    if (g.n_nodes() != n)
      throw atmfg::InputMismatchError(what + ": graph has " + std::to_string(g.n_nodes()) + " nodes, expected " +
                                      std::to_string(n));
  };

  json j;
  j["graphs"] = json::array();
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    json g;
    g["path"] = a.graphs[i];
    g["audit"] = atmfg::to_json(atmfg::graph_audit(graphs[i]));
    if (truth) {
      check_nodes(graphs[i], truth->n_nodes(), a.graphs[i] + " vs " + a.truth);
      g["jaccard"] = atmfg::jaccard(graphs[i], *truth);
    }
    if (partition) {
      atmfg::PathOptions po;
      po.max_pairs_per_cluster = a.max_pairs;
      po.seed = a.seed;
      po.induced = a.induced;
      const atmfg::PathResult pr = atmfg::weighted_intra_cluster_path(graphs[i], *partition, po);
      g.update(atmfg::to_json(pr));
      for (const auto& w : pr.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    }
    j["graphs"].push_back(g);
  }
  if (graphs.size() == 1)
    for (const char* key : {"audit", "jaccard", "l_weighted", "per_cluster"})
      if (j["graphs"][0].contains(key)) j[key] = j["graphs"][0][key];

  if (a.pairwise) {
    if (graphs.size() < 2) throw atmfg::ParameterError("--pairwise needs at least two edgelists");
    std::vector<double> values;
    json pairs = json::array();
    for (std::size_t p = 0; p < graphs.size(); ++p)
      for (std::size_t q = p + 1; q < graphs.size(); ++q) {
        check_nodes(graphs[q], graphs[p].n_nodes(), a.graphs[q] + " vs " + a.graphs[p]);
        const double v = atmfg::jaccard(graphs[p], graphs[q]);
        values.push_back(v);
        pairs.push_back({{"a", p}, {"b", q}, {"jaccard", v}});
      }
    double sum = 0.0;
    for (double v : values) sum += v;
    j["pairwise"] = {{"count", values.size()},
                     {"mean", sum / static_cast<double>(values.size())},
                     {"min", *std::min_element(values.begin(), values.end())},
                     {"max", *std::max_element(values.begin(), values.end())},
                     {"pairs", pairs}};
  }

  const std::string text = j.dump(2) + "\n";
  if (a.out.empty())
    std::fwrite(text.data(), 1, text.size(), stdout);
  else
    write_text(a.out, text);
  return Exit::ok;
}

struct BenchArgs {
  std::string preset, out, manifest;
  std::vector<std::size_t> sizes, ks;
  std::vector<double> alphas;
  std::vector<std::string> universes;
  std::optional<std::size_t> repeats, samples;
  std::uint64_t seed = 0;
  bool with_exact = false;
  bool quiet = false;
};

int cmd_bench(const BenchArgs& a) {
  atmfg::bench::BenchGrid g = atmfg::bench::default_grid(atmfg::bench::parse_preset(a.preset));
  if (!a.sizes.empty()) g.sizes = a.sizes;
  if (!a.alphas.empty()) g.alphas = a.alphas;
  if (!a.ks.empty()) g.ks = a.ks;
  if (!a.universes.empty()) {
    g.universes.clear();
    for (const auto& u : a.universes) g.universes.push_back(atmfg::bench::parse_universe(u));
  }
  if (a.repeats) g.repeats = *a.repeats;
  if (a.samples) g.samples = *a.samples;
  g.seed = a.seed;
  g.with_exact = a.with_exact;
  g.threads = atmfg::bench::worker_threads();
  atmfg::bench::validate(g);

  const std::size_t total = atmfg::bench::row_count(g);
  std::size_t done = 0;
  const auto rows = atmfg::bench::run_bench(g, [&](const atmfg::bench::BenchRow& r) {
    ++done;
    if (!a.quiet)
      std::fprintf(stderr, "[%zu/%zu] %s N=%zu k=%zu U=%s alpha=%g jaccard=%.4f %.2fs\n", done, total,
                   r.builder.c_str(), r.n, r.k, r.universe.c_str(), r.alpha, r.jaccard, r.wall_seconds);
  });
  const std::string csv = atmfg::bench::format_csv(rows);
  if (a.out.empty()) {
    std::fwrite(csv.data(), 1, csv.size(), stdout);
  } else {
    write_text(a.out, csv);
    json j = manifest("bench");
    j["grid"] = atmfg::bench::to_json(g);
    j["threads"] = g.threads;
    j["rows"] = rows.size();
    j["outputs"] = {{"csv", a.out}};
    write_json(a.manifest.empty() ? sibling(a.out, ".manifest.json") : fs::path(a.manifest), j);
  }
  return Exit::ok;
}

void add_index_options(CLI::App* cmd, atmfg::IndexParams& p) {
  cmd->add_option("--max-degree", p.max_degree, "Index links per node on upper layers")->capture_default_str();
  cmd->add_option("--ef-construction", p.ef_construction, "Index build beam width")->capture_default_str();
  cmd->add_option("--ef-search", p.ef_search, "Query beam width (0: max(64, 2k))")->capture_default_str();
  cmd->add_option("--exact-threshold", p.exact_fallback_threshold, "Use exact scans up to this many rows")
      ->capture_default_str();
  cmd->add_option("--index-seed", p.seed, "Index level-assignment seed")->capture_default_str();
}

int run(int argc, char** argv) {
  CLI::App app{"Approximate and exact TMFG construction, synthetic data and benchmarks", "atmfg"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  std::string simd = "auto";
  app.add_option("--simd", simd, "Kernel set: auto, scalar or avx2")->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  BuildArgs build;
  auto* c_build = app.add_subcommand("build", "Build an a-TMFG from a feature matrix");
  c_build->add_option("--input", build.input, "Matrix file (.csv or binary)")->required()->check(CLI::ExistingFile);
  c_build->add_option("--format", build.format, "auto, csv or binary")->capture_default_str();
  c_build->add_option("--out", build.out, "Output edgelist (TSV)")->required();
  c_build->add_option("--stats", build.stats, "Stats JSON (default: <out>.stats.json)");
  c_build->add_option("--manifest", build.manifest, "Manifest JSON (default: <out>.manifest.json)");
  c_build->add_option("--steps", build.steps, "Write every (face, node) choice to this CSV");
  c_build->add_option("--k", build.k, "kNN neighborhood size")->capture_default_str();
  c_build->add_option("--universe-limit", build.universe, "auto, inf, a count or a fraction like 0.3N")
      ->capture_default_str();
  c_build->add_option("--rescue-k", build.rescue_k, "Neighbors per face in a global rescue")->capture_default_str();
  c_build->add_option("--seed", build.seed, "Root seed")->capture_default_str();
  add_index_options(c_build, build.index);

  ExactArgs exact;
  auto* c_exact = app.add_subcommand("build-exact", "Build the exact TMFG from a feature matrix");
  c_exact->add_option("--input", exact.input, "Matrix file (.csv or binary)")->required()->check(CLI::ExistingFile);
  c_exact->add_option("--format", exact.format, "auto, csv or binary")->capture_default_str();
  c_exact->add_option("--out", exact.out, "Output edgelist (TSV)")->required();
  c_exact->add_option("--trace", exact.trace, "Trace CSV (default: <out>.trace.csv)");
  c_exact->add_option("--locations", exact.locations, "Face-location histogram CSV (default: <out>.locations.csv)");
  c_exact->add_option("--bins", exact.bins, "Histogram bins over [-1, 0]")->capture_default_str()->check(CLI::PositiveNumber);
  c_exact->add_option("--manifest", exact.manifest, "Manifest JSON (default: <out>.manifest.json)");
  c_exact->add_flag("--force", exact.force, "Allow inputs above 30000 rows");

  auto* c_gen = app.add_subcommand("gen", "Generate synthetic data");
  c_gen->require_subcommand(1);
  FactorArgs factor;
  auto* c_factor = c_gen->add_subcommand("factor", "One-factor clustered Gaussian data");
  c_factor->add_option("--n", factor.n, "Rows")->capture_default_str();
  c_factor->add_option("--k,--clusters", factor.clusters, "Clusters")->capture_default_str();
  c_factor->add_option("--g", factor.loadings, "Loading, or one per cluster")->delimiter(',')->capture_default_str();
  c_factor->add_option("--samples", factor.samples, "Columns (observations per row)")->capture_default_str();
  c_factor->add_option("--seed", factor.seed, "Seed")->capture_default_str();
  c_factor->add_option("--out", factor.out, "Matrix file (.csv or binary)")->required();
  c_factor->add_option("--labels", factor.labels, "Labels file (default: <out>.labels.txt)");
  c_factor->add_option("--manifest", factor.manifest, "Manifest JSON (default: <out>.manifest.json)");

  GmrfArgs gmrf;
  auto* c_gmrf = c_gen->add_subcommand("gmrf", "Gaussian Markov random field over a graph");
  c_gmrf->add_option("--graph", gmrf.graph, "Adjacency edgelist (TSV)")->required()->check(CLI::ExistingFile);
  c_gmrf->add_option("--alpha", gmrf.alpha, "Coupling strength")->capture_default_str();
  c_gmrf->add_option("--samples", gmrf.samples, "Columns (observations per row)")->capture_default_str();
  c_gmrf->add_option("--seed", gmrf.seed, "Seed")->capture_default_str();
  c_gmrf->add_option("--out", gmrf.out, "Matrix file (.csv or binary)")->required();
  c_gmrf->add_option("--manifest", gmrf.manifest, "Manifest JSON (default: <out>.manifest.json)");

  PlanarArgs planar;
  auto* c_planar = c_gen->add_subcommand("planar", "Random maximal planar ground truth");
  c_planar->add_option("--n", planar.n, "Nodes")->capture_default_str();
  c_planar->add_option("--seed", planar.seed, "Seed")->capture_default_str();
  c_planar->add_option("--out", planar.out, "Output edgelist (TSV)")->required();
  c_planar->add_option("--manifest", planar.manifest, "Manifest JSON (default: <out>.manifest.json)");

  EvalArgs eval;
  auto* c_eval = app.add_subcommand("eval", "Compare edgelists and compute graph metrics");
  c_eval->add_option("--graph,graphs", eval.graphs, "Edgelist(s) to evaluate")->required()->check(CLI::ExistingFile);
  c_eval->add_option("--truth", eval.truth, "Reference edgelist for Jaccard")->check(CLI::ExistingFile);
  c_eval->add_option("--labels", eval.labels, "Cluster labels for the intra-cluster path metric")
      ->check(CLI::ExistingFile);
  c_eval->add_flag("--pairwise", eval.pairwise, "Jaccard between every pair of input edgelists");
  c_eval->add_flag("--induced", eval.induced, "Measure paths inside each cluster's induced subgraph");
  c_eval->add_option("--max-pairs", eval.max_pairs, "Sample clusters with more ordered pairs than this")
      ->capture_default_str();
  c_eval->add_option("--seed", eval.seed, "Sampling seed")->capture_default_str();
  c_eval->add_option("--out", eval.out, "Write JSON here instead of stdout");

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench", "Run a benchmark preset over synthetic GMRF data");
  c_bench->add_option("--preset", bench.preset, "alpha-heatmap, k-sweep, universe-sweep or runtime")->required();
  c_bench->add_option("--sizes", bench.sizes, "Node counts")->delimiter(',');
  c_bench->add_option("--alphas", bench.alphas, "GMRF couplings")->delimiter(',');
  c_bench->add_option("--ks", bench.ks, "kNN neighborhood sizes")->delimiter(',');
  c_bench->add_option("--universes", bench.universes, "Universe limits (auto, inf, counts or fractions like 0.3N)")
      ->delimiter(',');
  c_bench->add_option("--repeats", bench.repeats, "Independent realizations per cell");
  c_bench->add_option("--samples", bench.samples, "Observations per node");
  c_bench->add_option("--seed", bench.seed, "Root seed")->capture_default_str();
  c_bench->add_flag("--with-exact", bench.with_exact, "Also time the exact builder");
  c_bench->add_flag("--quiet", bench.quiet, "No progress on stderr");
  c_bench->add_option("--out", bench.out, "CSV output (default: stdout)");
  c_bench->add_option("--manifest", bench.manifest, "Manifest JSON (default: <out>.manifest.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return Exit::parameter;
  }

  if (simd != "auto") {
    const auto isa = simd == "avx2" ? atmfg::simd::Isa::avx2 : atmfg::simd::Isa::scalar;
    if (!atmfg::simd::select_isa(isa)) throw atmfg::ParameterError("kernel set '" + simd + "' not supported here");
  }

  if (c_build->parsed()) return cmd_build(build);
  if (c_exact->parsed()) return cmd_build_exact(exact);
  if (c_factor->parsed()) return cmd_gen_factor(factor);
  if (c_gmrf->parsed()) return cmd_gen_gmrf(gmrf);
  if (c_planar->parsed()) return cmd_gen_planar(planar);
  if (c_eval->parsed()) return cmd_eval(eval);
  if (c_bench->parsed()) return cmd_bench(bench);
  return Exit::parameter;
}

} // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const atmfg::ParameterError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return Exit::parameter;
  } catch (const atmfg::SizeError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return Exit::size_guard;
  } catch (const atmfg::InternalError& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return Exit::internal;
  } catch (const atmfg::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return Exit::input;
  } catch (const atmfg::DimensionError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return Exit::input;
  } catch (const atmfg::StructureError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return Exit::input;
  } catch (const atmfg::InputMismatchError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return Exit::input;
  } catch (const atmfg::BoundsError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return Exit::input;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return Exit::internal;
  }
}
