#include "atmfg/edge_list.hpp"

#include "atmfg/error.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace atmfg {

void EdgeList::add(NodeId a, NodeId b, double w) {
  if (a == b) throw StructureError("self-loop on node " + std::to_string(a));
  if (a >= n_nodes_ || b >= n_nodes_)
    throw BoundsError("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                      ") outside node range " + std::to_string(n_nodes_));
  edges_.push_back({std::min(a, b), std::max(a, b), w});
}

bool EdgeList::remove(NodeId a, NodeId b) {
  const NodeId u = std::min(a, b);
  const NodeId v = std::max(a, b);
  const auto it = std::find_if(edges_.begin(), edges_.end(),
                               [&](const Edge& e) { return e.u == u && e.v == v; });
  if (it == edges_.end()) return false;
  edges_.erase(it);
  return true;
}

void EdgeList::sort() {
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
}

EdgeList EdgeList::sorted() const {
  EdgeList copy = *this;
  copy.sort();
  return copy;
}

bool EdgeList::has_duplicates() const {
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(edges_.size());
  for (const Edge& e : edges_)
    if (!seen.insert(edge_key(e.u, e.v)).second) return true;
  return false;
}

std::string format_edgelist_tsv(const EdgeList& e) {
  const EdgeList s = e.sorted();
  std::string out;
  out.reserve(s.size() * 24);
  char buf[96];
  for (const Edge& edge : s.edges()) {
    const int len = std::snprintf(buf, sizeof buf, "%u\t%u\t%.6f\n", edge.u, edge.v, edge.w);
    out.append(buf, static_cast<std::size_t>(len));
  }
  return out;
}

void write_edgelist_tsv(const EdgeList& e, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot write " + path.string());
  out << format_edgelist_tsv(e);
  if (!out) throw ParseError("write failed for " + path.string());
}

EdgeList read_edgelist_tsv(const std::filesystem::path& path, std::size_t n_nodes) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  struct Raw {
    NodeId u, v;
    double w;
  };
  std::vector<Raw> raw;
  std::string line;
  std::size_t line_no = 0;
  NodeId max_id = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    long long u = -1;
    long long v = -1;
    double w = 0.0;
    if (!(fields >> u >> v) || u < 0 || v < 0 || u > 0xFFFFFFFELL || v > 0xFFFFFFFELL)
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected u<TAB>v<TAB>w");
    if (!(fields >> w)) w = 1.0;
    raw.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v), w});
    max_id = std::max({max_id, static_cast<NodeId>(u), static_cast<NodeId>(v)});
  }
  const std::size_t inferred = raw.empty() ? 0 : static_cast<std::size_t>(max_id) + 1;
  if (n_nodes == 0) n_nodes = inferred;
  if (inferred > n_nodes)
    throw InputMismatchError(path.string() + ": node id " + std::to_string(max_id) +
                             " exceeds node count " + std::to_string(n_nodes));
  EdgeList e(n_nodes);
  for (const Raw& r : raw) e.add(r.u, r.v, r.w);
  if (e.has_duplicates()) throw StructureError(path.string() + ": duplicate edge");
  return e;
}

std::vector<std::uint32_t> read_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::vector<std::uint32_t> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::uint32_t value = 0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), value);
    if (ec != std::errc{} || ptr != line.data() + line.size())
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad label");
    labels.push_back(value);
  }
  return labels;
}

void write_labels(const std::vector<std::uint32_t>& labels, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ParseError("cannot write " + path.string());
  for (std::uint32_t l : labels) out << l << '\n';
}

} // namespace atmfg
