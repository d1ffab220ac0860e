#include <atomic>
#include <cstdlib>
#include <string>

#include "spdc/error.hpp"
#include "spdc/simd/kernels.hpp"

namespace spdc::simd {
namespace {

bool cpu_has_avx2() {
#if defined(SPDC_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa initial_isa() {
  if (const char* env = std::getenv("SPDC_SIMD")) {
    try {
      const Isa want = isa_from_string(env);
      if (isa_available(want)) return want;
    } catch (const Error&) {
      // unknown names fall back to detection
    }
  }
  return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

bool isa_available(Isa isa) {
  return isa == Isa::Scalar || (isa == Isa::Avx2 && cpu_has_avx2());
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (!isa_available(isa)) {
    fail(ErrorCode::InvalidArgument,
         "SIMD variant '" + std::string(to_string(isa)) + "' not available");
  }
  current().store(isa, std::memory_order_relaxed);
}

const KernelTable& kernels(Isa isa) {
#if defined(SPDC_HAVE_AVX2)
  if (isa == Isa::Avx2 && cpu_has_avx2()) return avx2_kernels();
#endif
  (void)isa;
  return scalar_kernels();
}

const KernelTable& kernels() { return kernels(active_isa()); }

std::string_view to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

Isa isa_from_string(std::string_view name) {
  if (name == "scalar") return Isa::Scalar;
  if (name == "avx2") return Isa::Avx2;
  fail(ErrorCode::InvalidArgument, "unknown SIMD variant '" + std::string(name) + "'");
}

}  // namespace spdc::simd
