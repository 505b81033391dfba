#include "atmfg/simd/kernels.hpp"

#include "atmfg/error.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace atmfg::simd {

namespace {

constexpr Kernels kScalar{&scalar::dot, &scalar::sum3, &scalar::dot_rows, &scalar::dot_f32,
                          &scalar::dot_rows_f32};
#if defined(ATMFG_HAVE_AVX2_KERNELS)
constexpr Kernels kAvx2{&avx2::dot, &avx2::sum3, &avx2::dot_rows, &avx2::dot_f32,
                        &avx2::dot_rows_f32};
#endif

Isa detect() {
  if (const char* env = std::getenv("ATMFG_SIMD")) {
    const std::string want{env};
    if (want == "scalar") return Isa::scalar;
    if (want == "avx2" && cpu_supports(Isa::avx2)) return Isa::avx2;
  }
  return cpu_supports(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

const Kernels* table(Isa isa) {
#if defined(ATMFG_HAVE_AVX2_KERNELS)
  if (isa == Isa::avx2) return &kAvx2;
#endif
  (void)isa;
  return &kScalar;
}

struct Selection {
  std::atomic<Isa> isa;
  std::atomic<const Kernels*> kernels;
};

Selection& current() {
  static Selection sel{detect(), table(detect())};
  return sel;
}

} // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
  case Isa::scalar: return "scalar";
  case Isa::avx2: return "avx2";
  }
  return "unknown";
}

bool cpu_supports(Isa isa) {
  switch (isa) {
  case Isa::scalar: return true;
  case Isa::avx2:
#if defined(ATMFG_HAVE_AVX2_KERNELS)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
  }
  return false;
}

const Kernels& kernels_for(Isa isa) {
  if (!cpu_supports(isa))
    throw ParameterError("SIMD kernels for " + std::string(isa_name(isa)) +
                         " are not available on this machine");
  return *table(isa);
}

const Kernels& active() { return *current().kernels.load(std::memory_order_relaxed); }

Isa active_isa() { return current().isa.load(std::memory_order_relaxed); }

bool select_isa(Isa isa) {
  if (!cpu_supports(isa)) return false;
  current().isa.store(isa, std::memory_order_relaxed);
  current().kernels.store(table(isa), std::memory_order_relaxed);
  return true;
}

} // namespace atmfg::simd
