#include "atmfg/exact_tmfg.hpp"

#include "atmfg/error.hpp"
#include "atmfg/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

namespace atmfg {

namespace {

// Dense storage switches to float above this size to bound memory.
constexpr std::size_t kDoubleMatrixLimit = 8192;

class Fenwick {
public:
  explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}
  void add(std::size_t i, int delta) {
    for (++i; i < tree_.size(); i += i & (~i + 1)) tree_[i] += delta;
  }
  // Sum over [0, i].
  long long prefix(std::size_t i) const {
    long long s = 0;
    for (++i; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }

private:
  std::vector<long long> tree_;
};

template <typename Real>
std::vector<Real> correlation_matrix(const DataMatrix& m) {
  const std::size_t n = m.n_rows();
  const std::size_t d = m.n_cols();
  const double inv_d = 1.0 / static_cast<double>(d);
  std::vector<Real> c(n * n);
  const auto& k = simd::active();
  const double* base = m.values().data();
  constexpr std::size_t kTile = 32;
  for (std::size_t i0 = 0; i0 < n; i0 += kTile) {
    const std::size_t i1 = std::min(n, i0 + kTile);
    for (std::size_t j0 = i0; j0 < n; j0 += kTile) {
      const std::size_t j1 = std::min(n, j0 + kTile);
      for (std::size_t i = i0; i < i1; ++i) {
        for (std::size_t j = std::max(j0, i); j < j1; ++j) {
          double v = k.dot(base + i * d, base + j * d, d) * inv_d;
          v = std::clamp(v, -1.0, 1.0);
          c[i * n + j] = static_cast<Real>(v);
          c[j * n + i] = static_cast<Real>(v);
        }
      }
    }
  }
  return c;
}

struct ExactFace {
  std::array<NodeId, 3> v{};
  bool alive = true;
  NodeId best = 0;
  double best_gain = 0.0;
  bool has_best = false;
};

template <typename Real>
class ExactBuilder {
public:
  ExactBuilder(const DataMatrix& m, const ExactOptions& options)
      : n_(m.n_rows()), c_(correlation_matrix<Real>(m)), options_(options) {}

  ExactResult run() {
    ExactResult result{EdgeList(n_), {}};
    const auto seed = options_.seed ? *options_.seed : greedy_seed();
    validate_seed(seed);
    result.trace.seed = seed;

    inserted_.assign(n_, 0);
    for (NodeId s : seed) inserted_[s] = 1;
    for (std::size_t i = 0; i < n_; ++i)
      if (!inserted_[i]) remaining_.push_back(static_cast<NodeId>(i));

    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = a + 1; b < 4; ++b)
        result.edges.add(seed[a], seed[b], corr(seed[a], seed[b]));

    const std::size_t total_faces = 4 + 3 * (n_ - 4);
    faces_.reserve(total_faces);
    Fenwick alive(total_faces);
    const auto add_face = [&](NodeId a, NodeId b, NodeId c) {
      faces_.push_back({{a, b, c}});
      const std::size_t id = faces_.size() - 1;
      alive.add(id, 1);
      live_.push_back(id);
      rescan(faces_.back());
    };
    add_face(seed[0], seed[1], seed[2]);
    add_face(seed[0], seed[1], seed[3]);
    add_face(seed[0], seed[2], seed[3]);
    add_face(seed[1], seed[2], seed[3]);

    result.trace.steps.reserve(n_ - 4);
    while (!remaining_.empty()) {
      // Highest gain, then lowest node id, then oldest face.
      std::size_t pick_pos = live_.size();
      for (std::size_t p = 0; p < live_.size(); ++p) {
        const ExactFace& f = faces_[live_[p]];
        if (!f.has_best) continue;
        if (pick_pos == live_.size()) {
          pick_pos = p;
          continue;
        }
        const ExactFace& g = faces_[live_[pick_pos]];
        if (f.best_gain > g.best_gain ||
            (f.best_gain == g.best_gain &&
             (f.best < g.best || (f.best == g.best && live_[p] < live_[pick_pos]))))
          pick_pos = p;
      }
      if (pick_pos == live_.size()) throw InternalError("exact TMFG: no candidate face");

      const std::size_t fid = live_[pick_pos];
      const std::array<NodeId, 3> fv = faces_[fid].v;
      const NodeId node = faces_[fid].best;
      const double gain = faces_[fid].best_gain;

      TraceStep step;
      step.universe_size = live_.size();
      step.j = static_cast<std::size_t>(alive.prefix(fid));
      step.node = node;
      step.gain = gain;
      result.trace.steps.push_back(step);

      for (NodeId u : fv) result.edges.add(node, u, corr(node, u));

      inserted_[node] = 1;
      remaining_.erase(std::find(remaining_.begin(), remaining_.end(), node));
      faces_[fid].alive = false;
      alive.add(fid, -1);
      live_[pick_pos] = live_.back();
      live_.pop_back();

      for (std::size_t p = 0; p < live_.size(); ++p) {
        ExactFace& f = faces_[live_[p]];
        if (f.has_best && f.best == node) rescan(f);
      }
      add_face(node, fv[1], fv[2]);
      add_face(fv[0], node, fv[2]);
      add_face(fv[0], fv[1], node);
    }
    return result;
  }

private:
  double corr(NodeId i, NodeId j) const { return static_cast<double>(c_[i * n_ + j]); }

  void rescan(ExactFace& f) const {
    f.has_best = false;
    const Real* ra = c_.data() + static_cast<std::size_t>(f.v[0]) * n_;
    const Real* rb = c_.data() + static_cast<std::size_t>(f.v[1]) * n_;
    const Real* rc = c_.data() + static_cast<std::size_t>(f.v[2]) * n_;
    for (NodeId x : remaining_) {
      const double g = static_cast<double>(ra[x]) + static_cast<double>(rb[x]) + static_cast<double>(rc[x]);
      if (!f.has_best || g > f.best_gain || (g == f.best_gain && x < f.best)) {
        f.best = x;
        f.best_gain = g;
        f.has_best = true;
      }
    }
  }

  std::array<NodeId, 4> greedy_seed() const {
    std::array<NodeId, 4> seed{};
    double best_sum = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n_; ++j)
        if (j != i) s += corr(static_cast<NodeId>(i), static_cast<NodeId>(j));
      if (i == 0 || s > best_sum) {
        best_sum = s;
        seed[0] = static_cast<NodeId>(i);
      }
    }
    for (std::size_t slot = 1; slot < 4; ++slot) {
      bool found = false;
      double best = 0.0;
      for (std::size_t j = 0; j < n_; ++j) {
        const auto cand = static_cast<NodeId>(j);
        if (std::find(seed.begin(), seed.begin() + static_cast<std::ptrdiff_t>(slot), cand) !=
            seed.begin() + static_cast<std::ptrdiff_t>(slot))
          continue;
        double s = 0.0;
        for (std::size_t t = 0; t < slot; ++t) s += corr(seed[t], cand);
        if (!found || s > best) {
          best = s;
          seed[slot] = cand;
          found = true;
        }
      }
    }
    return seed;
  }

  void validate_seed(const std::array<NodeId, 4>& seed) const {
    for (std::size_t a = 0; a < 4; ++a) {
      if (seed[a] >= n_) throw BoundsError("seed node out of range");
      for (std::size_t b = a + 1; b < 4; ++b)
        if (seed[a] == seed[b]) throw ParameterError("seed nodes must be distinct");
    }
  }

  std::size_t n_;
  std::vector<Real> c_;
  ExactOptions options_;
  std::vector<std::uint8_t> inserted_;
  std::vector<NodeId> remaining_;
  std::vector<ExactFace> faces_;
  std::vector<std::size_t> live_;
};

bool connected(const EdgeList& e) {
  const std::size_t n = e.n_nodes();
  if (n == 0) return true;
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
  return components == 1;
}

} // namespace

ExactResult build_exact_tmfg(const DataMatrix& m, const ExactOptions& options) {
  const std::size_t n = m.n_rows();
  if (n < 4) throw SizeError("TMFG needs at least 4 nodes, got " + std::to_string(n));
  if (n > options.max_nodes && !options.force)
    throw SizeError("exact TMFG refuses N = " + std::to_string(n) + " above " +
                    std::to_string(options.max_nodes) + " without force");
  if (!m.normalized()) throw ParameterError("exact TMFG requires a normalized matrix");
  if (n <= kDoubleMatrixLimit) return ExactBuilder<double>(m, options).run();
  return ExactBuilder<float>(m, options).run();
}

std::vector<double> face_location_stats(const ConstructionTrace& trace) {
  std::vector<double> out;
  out.reserve(trace.steps.size());
  for (const TraceStep& s : trace.steps) {
    const double f = static_cast<double>(s.universe_size);
    out.push_back(f > 0 ? (static_cast<double>(s.j) - f) / f : 0.0);
  }
  return out;
}

std::vector<LocationBin> location_histogram(const std::vector<double>& locations, std::size_t bins) {
  if (bins == 0) throw ParameterError("histogram needs at least one bin");
  std::vector<LocationBin> out(bins);
  const double width = 1.0 / static_cast<double>(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].lo = -1.0 + width * static_cast<double>(b);
    out[b].hi = b + 1 == bins ? 0.0 : -1.0 + width * static_cast<double>(b + 1);
  }
  for (double l : locations) {
    const double x = std::clamp(l, -1.0, 0.0);
    auto b = static_cast<std::size_t>((x + 1.0) / width);
    if (b >= bins) b = bins - 1;
    ++out[b].count;
  }
  return out;
}

bool ValidationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.passed; });
}

const ValidationCheck* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

ValidationReport validate_tmfg(const EdgeList& e, const ConstructionTrace& trace) {
  ValidationReport report;
  const std::size_t n = e.n_nodes();
  const std::size_t expected = n >= 3 ? 3 * n - 6 : 0;
  report.checks.push_back({"edge_count", e.size() == expected && !e.has_duplicates(),
                           std::to_string(e.size()) + " edges, expected " + std::to_string(expected)});

  report.checks.push_back({"connected", connected(e), ""});

  // Each inserted node must have exactly three edges into the nodes present before it.
  std::vector<std::size_t> order(n, std::size_t(-1));
  for (NodeId s : trace.seed)
    if (s < n) order[s] = 0;
  for (std::size_t t = 0; t < trace.steps.size(); ++t)
    if (trace.steps[t].node < n) order[trace.steps[t].node] = t + 1;
  std::vector<std::size_t> back_degree(n, 0);
  for (const Edge& edge : e.edges()) {
    const std::size_t ou = order[edge.u];
    const std::size_t ov = order[edge.v];
    if (ou == ov) continue;
    ++back_degree[ou > ov ? edge.u : edge.v];
  }
  bool degree_ok = trace.steps.size() + 4 == n;
  std::string degree_detail;
  for (std::size_t t = 0; t < trace.steps.size() && degree_ok; ++t) {
    const NodeId v = trace.steps[t].node;
    if (v >= n || order[v] != t + 1 || back_degree[v] != 3) {
      degree_ok = false;
      degree_detail = "step " + std::to_string(t) + " node " + std::to_string(v);
    }
  }
  report.checks.push_back({"degree3_at_insertion", degree_ok, degree_detail});

  bool growth_ok = true;
  std::string growth_detail;
  for (std::size_t t = 0; t < trace.steps.size(); ++t) {
    const auto& s = trace.steps[t];
    if (s.universe_size != 4 + 2 * t || s.j < 1 || s.j > s.universe_size) {
      growth_ok = false;
      growth_detail = "step " + std::to_string(t) + ": |F| = " + std::to_string(s.universe_size);
      break;
    }
  }
  report.checks.push_back({"universe_growth", growth_ok, growth_detail});
  return report;
}

void write_trace_csv(const ConstructionTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ParseError("cannot write " + path.string());
  out << "step,j,universe_size,node,gain\n";
  char buf[128];
  for (std::size_t t = 0; t < trace.steps.size(); ++t) {
    const auto& s = trace.steps[t];
    std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%u,%.9f\n", t, s.j, s.universe_size, s.node, s.gain);
    out << buf;
  }
}

} // namespace atmfg
