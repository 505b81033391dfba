#include "atmfg/simd/kernels.hpp"

namespace atmfg::simd::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void sum3(const double* a, const double* b, const double* c, double* out,
          std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i] + c[i];
}

void dot_rows(const double* query, const double* base, std::size_t stride,
              const std::uint32_t* ids, std::size_t count, std::size_t n,
              double* out) {
  for (std::size_t r = 0; r < count; ++r)
    out[r] = dot(query, base + static_cast<std::size_t>(ids[r]) * stride, n);
}

double dot_f32(const float* a, const float* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += static_cast<double>(a[i]) * b[i];
  return acc;
}

void dot_rows_f32(const float* query, const float* base, std::size_t stride,
                  const std::uint32_t* ids, std::size_t count, std::size_t n,
                  double* out) {
  for (std::size_t r = 0; r < count; ++r)
    out[r] = dot_f32(query, base + static_cast<std::size_t>(ids[r]) * stride, n);
}

} // namespace atmfg::simd::scalar
