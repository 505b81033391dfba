#pragma once

// Dense arithmetic kernels behind every correlation evaluation.
//
// Each kernel has a portable scalar reference and, on x86-64, an AVX2+FMA
// variant compiled in its own translation unit. The variant is chosen once at
// startup from CPUID; ATMFG_SIMD=scalar|avx2 overrides the choice. Scalar and
// vector variants sum in different orders, so results agree to rounding, not
// bitwise. Within one process the choice is fixed, which keeps every build
// deterministic.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace atmfg::simd {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

// Function table for one instruction set.
struct Kernels {
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // out[i] = a[i] + b[i] + c[i]
  void (*sum3)(const double* a, const double* b, const double* c, double* out,
               std::size_t n);
  // out[r] = dot(query, base + ids[r] * stride) for r in [0, count)
  void (*dot_rows)(const double* query, const double* base, std::size_t stride,
                   const std::uint32_t* ids, std::size_t count, std::size_t n,
                   double* out);
  // Float32 counterparts for index navigation. The scalar variant accumulates
  // in double, the AVX2 variant in float lanes.
  double (*dot_f32)(const float* a, const float* b, std::size_t n);
  void (*dot_rows_f32)(const float* query, const float* base, std::size_t stride,
                       const std::uint32_t* ids, std::size_t count, std::size_t n,
                       double* out);
};

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void sum3(const double* a, const double* b, const double* c, double* out,
          std::size_t n);
void dot_rows(const double* query, const double* base, std::size_t stride,
              const std::uint32_t* ids, std::size_t count, std::size_t n,
              double* out);
double dot_f32(const float* a, const float* b, std::size_t n);
void dot_rows_f32(const float* query, const float* base, std::size_t stride,
                  const std::uint32_t* ids, std::size_t count, std::size_t n,
                  double* out);
} // namespace scalar

#if defined(ATMFG_HAVE_AVX2_KERNELS)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void sum3(const double* a, const double* b, const double* c, double* out,
          std::size_t n);
void dot_rows(const double* query, const double* base, std::size_t stride,
              const std::uint32_t* ids, std::size_t count, std::size_t n,
              double* out);
double dot_f32(const float* a, const float* b, std::size_t n);
void dot_rows_f32(const float* query, const float* base, std::size_t stride,
                  const std::uint32_t* ids, std::size_t count, std::size_t n,
                  double* out);
} // namespace avx2
#endif

bool cpu_supports(Isa isa);

// Table for a specific ISA; throws ParameterError when the CPU or build lacks it.
const Kernels& kernels_for(Isa isa);

// Table selected for this process.
const Kernels& active();
Isa active_isa();

// Switch the process-wide selection. Only meant for tests and benchmarks;
// must not race with running builds. Returns false if unsupported.
bool select_isa(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

} // namespace atmfg::simd
