// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include "nlcoh/simd/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

#include <cmath>

namespace nlcoh::simd::detail {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void fir_accumulate(double* out, const double* in, const double* w,
                    std::size_t taps, std::size_t stride, std::size_t n) {
  std::size_t t = 0;
  for (; t + 8 <= n; t += 8) {
    __m256d acc0 = _mm256_loadu_pd(out + t);
    __m256d acc1 = _mm256_loadu_pd(out + t + 4);
    const double* src = in + t;
    for (std::size_t j = 0; j < taps; ++j, src += stride) {
      const __m256d wj = _mm256_broadcast_sd(w + j);
      acc0 = _mm256_fmadd_pd(wj, _mm256_loadu_pd(src), acc0);
      acc1 = _mm256_fmadd_pd(wj, _mm256_loadu_pd(src + 4), acc1);
    }
    _mm256_storeu_pd(out + t, acc0);
    _mm256_storeu_pd(out + t + 4, acc1);
  }
  for (; t < n; ++t) {
    double acc = out[t];
    for (std::size_t j = 0; j < taps; ++j) acc += w[j] * in[t + j * stride];
    out[t] = acc;
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  __m256d s2 = _mm256_setzero_pd(), s3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
    s2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), s2);
    s3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), s3);
  }
  for (; i + 4 <= n; i += 4)
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
  double acc = hsum(_mm256_add_pd(_mm256_add_pd(s0, s1), _mm256_add_pd(s2, s3)));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void fir_weight_grad(double* grad_w, const double* g, const double* in,
                     std::size_t taps, std::size_t stride, std::size_t n) {
  for (std::size_t j = 0; j < taps; ++j) grad_w[j] += dot(g, in + j * stride, n);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
    s0 = _mm256_fmadd_pd(d0, d0, s0);
    s1 = _mm256_fmadd_pd(d1, d1, s1);
  }
  double acc = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void cross_accumulate(std::complex<double>* acc, const std::complex<double>* a,
                      const std::complex<double>* b, std::size_t n) {
  auto* accd = reinterpret_cast<double*>(acc);
  const auto* ad = reinterpret_cast<const double*>(a);
  const auto* bd = reinterpret_cast<const double*>(b);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const __m256d av = _mm256_loadu_pd(ad + 2 * k);
    const __m256d bv = _mm256_loadu_pd(bd + 2 * k);
    const __m256d b_re = _mm256_movedup_pd(bv);
    const __m256d b_im = _mm256_permute_pd(bv, 0xF);
    const __m256d a_sw = _mm256_permute_pd(av, 0x5);
    // even lanes: ar*br + ai*bi, odd lanes: ai*br - ar*bi
    const __m256d prod = _mm256_fmsubadd_pd(av, b_re, _mm256_mul_pd(a_sw, b_im));
    _mm256_storeu_pd(accd + 2 * k, _mm256_add_pd(_mm256_loadu_pd(accd + 2 * k), prod));
  }
  for (; k < n; ++k) {
    const double ar = a[k].real(), ai = a[k].imag();
    const double br = b[k].real(), bi = b[k].imag();
    acc[k] += std::complex<double>(ar * br + ai * bi, ai * br - ar * bi);
  }
}

// exp on [1.25, 40]: n = round(y / ln 2), Taylor series of degree 13 for the
// remainder, then scale by 2^n through the exponent bits.
inline __m256d exp_reduced(__m256d y) {
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(y, _mm256_set1_pd(1.4426950408889634)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93147180369123816490e-1), y);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.90821492927058770002e-10), r);
  static constexpr double inv_fact[] = {1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0,
                                        1.0 / 3628800.0,    1.0 / 362880.0,    1.0 / 40320.0,
                                        1.0 / 5040.0,       1.0 / 720.0,       1.0 / 120.0,
                                        1.0 / 24.0,         1.0 / 6.0,         0.5,
                                        1.0,                1.0};
  __m256d p = _mm256_set1_pd(inv_fact[0]);
  for (std::size_t i = 1; i < std::size(inv_fact); ++i) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(inv_fact[i]));
  const __m128i ni = _mm256_cvtpd_epi32(n);
  const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(_mm256_cvtepi32_epi64(ni), _mm256_set1_epi64x(1023)), 52);
  return _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
}

// |x| < 0.625: x + x^3 P(x^2) / Q(x^2); otherwise 1 - 2 / (exp(2|x|) + 1).
void tanh_inplace(double* x, std::size_t n) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    const __m256d sign = _mm256_and_pd(v, sign_mask);
    const __m256d a = _mm256_andnot_pd(sign_mask, v);

    const __m256d s = _mm256_mul_pd(v, v);
    __m256d p = _mm256_fmadd_pd(_mm256_set1_pd(-9.64399179425052238628e-1), s,
                                _mm256_set1_pd(-9.92877231001918586564e1));
    p = _mm256_fmadd_pd(p, s, _mm256_set1_pd(-1.61468768441708447952e3));
    __m256d q = _mm256_add_pd(s, _mm256_set1_pd(1.12811678491632931402e2));
    q = _mm256_fmadd_pd(q, s, _mm256_set1_pd(2.23548839060100448583e3));
    q = _mm256_fmadd_pd(q, s, _mm256_set1_pd(4.84406305325125486048e3));
    const __m256d small = _mm256_or_pd(_mm256_fmadd_pd(_mm256_mul_pd(a, s), _mm256_div_pd(p, q), a), sign);

    const __m256d y = _mm256_min_pd(_mm256_add_pd(a, a), _mm256_set1_pd(40.0));
    const __m256d e = exp_reduced(_mm256_max_pd(y, _mm256_set1_pd(1.25)));
    const __m256d big = _mm256_or_pd(_mm256_sub_pd(one, _mm256_div_pd(two, _mm256_add_pd(e, one))), sign);

    const __m256d use_small = _mm256_cmp_pd(a, _mm256_set1_pd(0.625), _CMP_LT_OQ);
    __m256d r = _mm256_blendv_pd(big, small, use_small);
    // NaN passes through
    r = _mm256_blendv_pd(r, v, _mm256_cmp_pd(v, v, _CMP_UNORD_Q));
    _mm256_storeu_pd(x + i, r);
  }
  for (; i < n; ++i) x[i] = std::tanh(x[i]);
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable table{Isa::avx2, fir_accumulate,   fir_weight_grad, dot,
                                 axpy,      squared_distance, cross_accumulate, tanh_inplace};
  return &table;
}

}  // namespace nlcoh::simd::detail

#else

namespace nlcoh::simd::detail {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace nlcoh::simd::detail

#endif
