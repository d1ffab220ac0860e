#pragma once

#include <cstddef>
#include <string_view>

namespace spdc::simd {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  // I_j = len_j · e^{i h} · sinc(h), h = dk_j · len_j / 2.
  void (*phase_integrals)(std::size_t n, const double* dk, const double* len,
                          double* re, double* im);
  // Σ_j a_j b_j c_j over complex SoA arrays.
  void (*complex_triple_dot)(std::size_t n, const double* ar, const double* ai,
                             const double* br, const double* bi, const double* cr,
                             const double* ci, double* out_re, double* out_im);
};

const KernelTable& scalar_kernels();
#if defined(SPDC_HAVE_AVX2)
const KernelTable& avx2_kernels();
#endif

bool isa_available(Isa isa);
/// Best available ISA unless overridden by set_isa() or SPDC_SIMD=scalar|avx2.
Isa active_isa();
/// Throws InvalidArgument when the ISA is not available on this CPU/build.
void set_isa(Isa isa);
const KernelTable& kernels();
const KernelTable& kernels(Isa isa);

std::string_view to_string(Isa isa);
Isa isa_from_string(std::string_view name);

}  // namespace spdc::simd
