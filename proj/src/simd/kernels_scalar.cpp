#include <cmath>

#include "spdc/simd/kernels.hpp"

namespace spdc::simd {
namespace {

void phase_integrals(std::size_t n, const double* dk, const double* len, double* re,
                     double* im) {
  for (std::size_t j = 0; j < n; ++j) {
    const double h = 0.5 * dk[j] * len[j];
    const double h2 = h * h;
    const double sinc =
        std::abs(h) < 1e-4 ? 1.0 - h2 / 6.0 + h2 * h2 / 120.0 : std::sin(h) / h;
    re[j] = len[j] * std::cos(h) * sinc;
    im[j] = len[j] * std::sin(h) * sinc;
  }
}

void complex_triple_dot(std::size_t n, const double* ar, const double* ai,
                        const double* br, const double* bi, const double* cr,
                        const double* ci, double* out_re, double* out_im) {
  double sr = 0.0, si = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double tr = ar[j] * br[j] - ai[j] * bi[j];
    const double ti = ar[j] * bi[j] + ai[j] * br[j];
    sr += tr * cr[j] - ti * ci[j];
    si += tr * ci[j] + ti * cr[j];
  }
  *out_re = sr;
  *out_im = si;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable t{phase_integrals, complex_triple_dot};
  return t;
}

}  // namespace spdc::simd
