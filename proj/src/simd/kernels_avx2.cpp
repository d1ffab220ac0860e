#include <immintrin.h>

#include <cmath>

#include "spdc/simd/kernels.hpp"

namespace spdc::simd {
namespace {

// Cody-Waite split of π/2 (fdlibm) and Cephes minimax coefficients on
// [−π/4, π/4].
constexpr double kTwoOverPi = 6.36619772367581382433e-01;
constexpr double kPio2_1 = 1.57079632673412561417e+00;
constexpr double kPio2_2 = 6.07710050630396597660e-11;
constexpr double kPio2_3 = 2.02226624879595063154e-21;

constexpr double kSin[] = {1.58962301576546568060e-10, -2.50507477628578072866e-8,
                           2.75573136213857245213e-6,  -1.98412698295895385996e-4,
                           8.33333333332211858878e-3,  -1.66666666666666307295e-1};
constexpr double kCos[] = {-1.13585365213876817300e-11, 2.08757008419747316778e-9,
                           -2.75573141792967388112e-7,  2.48015872888517045348e-5,
                           -1.38888888888730564116e-3,  4.16666666666665929218e-2};

inline __m256d poly6(__m256d z, const double* c) {
  __m256d p = _mm256_set1_pd(c[0]);
  for (int k = 1; k < 6; ++k) p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(c[k]));
  return p;
}

inline void sincos4(__m256d x, __m256d* s_out, __m256d* c_out) {
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kTwoOverPi)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kPio2_1), x);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kPio2_2), r);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kPio2_3), r);
  const __m256d z = _mm256_mul_pd(r, r);
  const __m256d s = _mm256_fmadd_pd(_mm256_mul_pd(r, z), poly6(z, kSin), r);
  const __m256d c = _mm256_fmadd_pd(
      _mm256_mul_pd(z, z), poly6(z, kCos),
      _mm256_fnmadd_pd(z, _mm256_set1_pd(0.5), _mm256_set1_pd(1.0)));

  const __m256i q = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(n));
  const __m256i one = _mm256_set1_epi64x(1), two = _mm256_set1_epi64x(2);
  const __m256d swap =
      _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(q, one), one));
  const __m256d sin_sign =
      _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_and_si256(q, two), 62));
  const __m256d cos_sign = _mm256_castsi256_pd(
      _mm256_slli_epi64(_mm256_and_si256(_mm256_add_epi64(q, one), two), 62));
  *s_out = _mm256_xor_pd(_mm256_blendv_pd(s, c, swap), sin_sign);
  *c_out = _mm256_xor_pd(_mm256_blendv_pd(c, s, swap), cos_sign);
}

void phase_integrals(std::size_t n, const double* dk, const double* len, double* re,
                     double* im) {
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d small = _mm256_set1_pd(1e-4);
  const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d l = _mm256_loadu_pd(len + j);
    const __m256d h = _mm256_mul_pd(_mm256_mul_pd(half, _mm256_loadu_pd(dk + j)), l);
    __m256d s, c;
    sincos4(h, &s, &c);
    const __m256d h2 = _mm256_mul_pd(h, h);
    const __m256d series = _mm256_fmadd_pd(
        h2, _mm256_fmadd_pd(h2, _mm256_set1_pd(1.0 / 120.0), _mm256_set1_pd(-1.0 / 6.0)),
        _mm256_set1_pd(1.0));
    const __m256d is_small =
        _mm256_cmp_pd(_mm256_and_pd(h, abs_mask), small, _CMP_LT_OQ);
    // Keep the division finite for h = 0; the series lane wins there.
    const __m256d safe_h = _mm256_blendv_pd(h, _mm256_set1_pd(1.0), is_small);
    const __m256d sinc = _mm256_blendv_pd(_mm256_div_pd(s, safe_h), series, is_small);
    const __m256d ls = _mm256_mul_pd(l, sinc);
    _mm256_storeu_pd(re + j, _mm256_mul_pd(ls, c));
    _mm256_storeu_pd(im + j, _mm256_mul_pd(ls, s));
  }
  if (j < n) scalar_kernels().phase_integrals(n - j, dk + j, len + j, re + j, im + j);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void complex_triple_dot(std::size_t n, const double* ar, const double* ai,
                        const double* br, const double* bi, const double* cr,
                        const double* ci, double* out_re, double* out_im) {
  __m256d sr = _mm256_setzero_pd(), si = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d a_r = _mm256_loadu_pd(ar + j), a_i = _mm256_loadu_pd(ai + j);
    const __m256d b_r = _mm256_loadu_pd(br + j), b_i = _mm256_loadu_pd(bi + j);
    const __m256d c_r = _mm256_loadu_pd(cr + j), c_i = _mm256_loadu_pd(ci + j);
    const __m256d tr = _mm256_fmsub_pd(a_r, b_r, _mm256_mul_pd(a_i, b_i));
    const __m256d ti = _mm256_fmadd_pd(a_r, b_i, _mm256_mul_pd(a_i, b_r));
    sr = _mm256_add_pd(sr, _mm256_fmsub_pd(tr, c_r, _mm256_mul_pd(ti, c_i)));
    si = _mm256_add_pd(si, _mm256_fmadd_pd(tr, c_i, _mm256_mul_pd(ti, c_r)));
  }
  double tail_re = 0.0, tail_im = 0.0;
  if (j < n) {
    scalar_kernels().complex_triple_dot(n - j, ar + j, ai + j, br + j, bi + j, cr + j,
                                        ci + j, &tail_re, &tail_im);
  }
  *out_re = hsum(sr) + tail_re;
  *out_im = hsum(si) + tail_im;
}

}  // namespace

const KernelTable& avx2_kernels() {
  static const KernelTable t{phase_integrals, complex_triple_dot};
  return t;
}

}  // namespace spdc::simd
