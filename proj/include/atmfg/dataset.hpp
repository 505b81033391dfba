#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace atmfg {

using NodeId = std::uint32_t;

enum class MatrixFormat { csv, binary };

// N x D feature matrix, one node per row, stored row-major in double precision.
//
// After znormalize() every non-degenerate row has mean 0 and population
// standard deviation 1, so dot(row_i, row_j) / D is the Pearson correlation of
// the raw rows. Constant rows are stored as zeros and listed in
// degenerate_rows(); they correlate 0 with everything.
class DataMatrix {
public:
  DataMatrix() = default;
  // Throws DimensionError unless rows >= 1, cols >= 2 and values.size() == rows * cols.
  DataMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  static DataMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t n_rows() const { return rows_; }
  std::size_t n_cols() const { return cols_; }
  bool normalized() const { return normalized_; }
  bool empty() const { return rows_ == 0; }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * cols_, cols_};
  }
  const std::vector<double>& values() const { return values_; }

  const std::vector<NodeId>& degenerate_rows() const { return degenerate_; }
  bool is_degenerate(NodeId i) const;

  // Rounds every value to the nearest float32, so that writing the matrix in
  // the binary format and reading it back is lossless.
  void round_to_float32();

  friend DataMatrix znormalize(const DataMatrix& m);

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
  bool normalized_ = false;
  std::vector<NodeId> degenerate_;
  std::vector<std::uint8_t> degenerate_mask_;
};

// Format from the file extension: ".csv" (any case) is CSV, everything else binary.
MatrixFormat format_from_path(const std::filesystem::path& path);

// Throws ParseError (with line or byte offset) or DimensionError.
DataMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format);
DataMatrix load_matrix(const std::filesystem::path& path);

// Binary layout: "ATMF", u32 version = 1, u64 N, u64 D, N*D float32, all little-endian.
void write_binary(const DataMatrix& m, const std::filesystem::path& path);
void write_csv(const DataMatrix& m, const std::filesystem::path& path);

// Row-wise (x - mean) / std with the population standard deviation.
DataMatrix znormalize(const DataMatrix& m);

// Pearson correlation of rows i and j of a normalized matrix, clamped to [-1, 1].
double correlation(const DataMatrix& m, NodeId i, NodeId j);

} // namespace atmfg
