#include "atmfg/dataset.hpp"

#include "atmfg/error.hpp"
#include "atmfg/simd/kernels.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

namespace atmfg {

namespace {

constexpr std::array<char, 4> kMagic{'A', 'T', 'M', 'F'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "binary matrix I/O assumes a little-endian host");

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view field, double& out) {
  field = trim(field);
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc{} && ptr == field.data() + field.size() && std::isfinite(out);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

DataMatrix load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());

  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  std::string line;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    const auto fields = split_commas(view);
    std::vector<double> parsed(fields.size());
    bool numeric = true;
    for (std::size_t f = 0; f < fields.size(); ++f) {
      if (!parse_double(fields[f], parsed[f])) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (first_content_line) {
        // header line
        first_content_line = false;
        continue;
      }
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": non-numeric field");
    }
    first_content_line = false;
    if (cols == 0) {
      cols = fields.size();
    } else if (fields.size() != cols) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(cols) + " fields, found " +
                       std::to_string(fields.size()));
    }
    values.insert(values.end(), parsed.begin(), parsed.end());
    ++rows;
  }
  if (rows == 0) throw ParseError(path.string() + ": no data rows");
  if (cols < 2)
    throw DimensionError(path.string() + ": need at least 2 columns, found " +
                         std::to_string(cols));
  return DataMatrix(rows, cols, std::move(values));
}

template <typename T>
void read_le(std::istream& in, T& value, std::uint64_t& offset, const std::string& name) {
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in)
    throw ParseError(name + ": truncated header at byte offset " + std::to_string(offset));
  offset += sizeof(T);
}

DataMatrix load_binary(const std::filesystem::path& path) {
  const std::string name = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + name);

  std::uint64_t offset = 0;
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw ParseError(name + ": bad magic at byte offset 0");
  offset += magic.size();

  std::uint32_t version = 0;
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  read_le(in, version, offset, name);
  if (version != kVersion)
    throw ParseError(name + ": unsupported version " + std::to_string(version) +
                     " at byte offset 4");
  read_le(in, rows, offset, name);
  read_le(in, cols, offset, name);
  if (rows == 0) throw ParseError(name + ": N = 0 at byte offset 8");
  if (cols < 2) throw DimensionError(name + ": need at least 2 columns, found " + std::to_string(cols));
  if (cols > (std::uint64_t{1} << 40) / rows)
    throw ParseError(name + ": implausible shape at byte offset 8");

  const std::uint64_t count = rows * cols;
  std::vector<float> raw(count);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count * sizeof(float)));
  if (static_cast<std::uint64_t>(in.gcount()) != count * sizeof(float))
    throw ParseError(name + ": truncated payload at byte offset " +
                     std::to_string(offset + static_cast<std::uint64_t>(in.gcount())));
  if (in.peek() != std::char_traits<char>::eof())
    throw ParseError(name + ": trailing bytes at byte offset " +
                     std::to_string(offset + count * sizeof(float)));

  std::vector<double> values(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    if (!std::isfinite(raw[i]))
      throw ParseError(name + ": non-finite value at byte offset " +
                       std::to_string(offset + i * sizeof(float)));
    values[i] = raw[i];
  }
  return DataMatrix(rows, cols, std::move(values));
}

} // namespace

DataMatrix::DataMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (rows_ < 1) throw DimensionError("matrix needs at least one row");
  if (cols_ < 2) throw DimensionError("matrix needs at least two columns, got " + std::to_string(cols_));
  if (values_.size() != rows_ * cols_)
    throw DimensionError("matrix payload has " + std::to_string(values_.size()) +
                         " values, expected " + std::to_string(rows_ * cols_));
}

DataMatrix DataMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw DimensionError("matrix needs at least one row");
  const std::size_t cols = rows.front().size();
  std::vector<double> values;
  values.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw DimensionError("ragged rows");
    values.insert(values.end(), r.begin(), r.end());
  }
  return DataMatrix(rows.size(), cols, std::move(values));
}

bool DataMatrix::is_degenerate(NodeId i) const {
  return i < degenerate_mask_.size() && degenerate_mask_[i] != 0;
}

void DataMatrix::round_to_float32() {
  for (double& v : values_) v = static_cast<double>(static_cast<float>(v));
}

MatrixFormat format_from_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".csv" ? MatrixFormat::csv : MatrixFormat::binary;
}

DataMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format) {
  return format == MatrixFormat::csv ? load_csv(path) : load_binary(path);
}

DataMatrix load_matrix(const std::filesystem::path& path) {
  return load_matrix(path, format_from_path(path));
}

void write_binary(const DataMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot write " + path.string());
  const std::uint32_t version = kVersion;
  const std::uint64_t rows = m.n_rows();
  const std::uint64_t cols = m.n_cols();
  out.write(kMagic.data(), kMagic.size());
  out.write(reinterpret_cast<const char*>(&version), sizeof version);
  out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
  out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
  std::vector<float> buf(m.values().size());
  std::transform(m.values().begin(), m.values().end(), buf.begin(),
                 [](double v) { return static_cast<float>(v); });
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!out) throw ParseError("write failed for " + path.string());
}

void write_csv(const DataMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ParseError("cannot write " + path.string());
  std::array<char, 64> buf{};
  for (std::size_t i = 0; i < m.n_rows(); ++i) {
    const auto r = m.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (j) out.put(',');
      // shortest round-trip representation
      const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), r[j]);
      out.write(buf.data(), res.ptr - buf.data());
    }
    out.put('\n');
  }
}

DataMatrix znormalize(const DataMatrix& m) {
  DataMatrix out = m;
  const std::size_t d = m.n_cols();
  out.degenerate_.clear();
  out.degenerate_mask_.assign(m.n_rows(), 0);
  for (std::size_t i = 0; i < m.n_rows(); ++i) {
    double* r = out.values_.data() + i * d;
    double sum = 0.0;
    double max_abs = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      sum += r[j];
      max_abs = std::max(max_abs, std::abs(r[j]));
    }
    const double mean = sum / static_cast<double>(d);
    double ss = 0.0;
    for (std::size_t j = 0; j < d; ++j) ss += (r[j] - mean) * (r[j] - mean);
    const double sd = std::sqrt(ss / static_cast<double>(d));
    if (sd <= 1e-12 * std::max(1.0, max_abs)) {
      std::fill(r, r + d, 0.0);
      out.degenerate_.push_back(static_cast<NodeId>(i));
      out.degenerate_mask_[i] = 1;
      continue;
    }
    for (std::size_t j = 0; j < d; ++j) r[j] = (r[j] - mean) / sd;
  }
  out.normalized_ = true;
  return out;
}

double correlation(const DataMatrix& m, NodeId i, NodeId j) {
  if (i >= m.n_rows() || j >= m.n_rows())
    throw BoundsError("node id out of range: " + std::to_string(std::max(i, j)) +
                      " >= " + std::to_string(m.n_rows()));
  if (!m.normalized()) throw ParameterError("correlation requires a normalized matrix");
  const double c = simd::dot(m.row(i), m.row(j)) / static_cast<double>(m.n_cols());
  return std::clamp(c, -1.0, 1.0);
}

} // namespace atmfg
