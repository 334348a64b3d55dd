#include "nlcoh/simd/kernels.hpp"

#include <cmath>

#if defined(__aarch64__) && defined(__ARM_NEON)
#include <arm_neon.h>

namespace nlcoh::simd::detail {
namespace {

void fir_accumulate(double* out, const double* in, const double* w,
                    std::size_t taps, std::size_t stride, std::size_t n) {
  std::size_t t = 0;
  for (; t + 4 <= n; t += 4) {
    float64x2_t acc0 = vld1q_f64(out + t);
    float64x2_t acc1 = vld1q_f64(out + t + 2);
    const double* src = in + t;
    for (std::size_t j = 0; j < taps; ++j, src += stride) {
      const float64x2_t wj = vdupq_n_f64(w[j]);
      acc0 = vfmaq_f64(acc0, wj, vld1q_f64(src));
      acc1 = vfmaq_f64(acc1, wj, vld1q_f64(src + 2));
    }
    vst1q_f64(out + t, acc0);
    vst1q_f64(out + t + 2, acc1);
  }
  for (; t < n; ++t) {
    double acc = out[t];
    for (std::size_t j = 0; j < taps; ++j) acc += w[j] * in[t + j * stride];
    out[t] = acc;
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t s0 = vdupq_n_f64(0.0), s1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 = vfmaq_f64(s0, vld1q_f64(a + i), vld1q_f64(b + i));
    s1 = vfmaq_f64(s1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(s0, s1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void fir_weight_grad(double* grad_w, const double* g, const double* in,
                     std::size_t taps, std::size_t stride, std::size_t n) {
  for (std::size_t j = 0; j < taps; ++j) grad_w[j] += dot(g, in + j * stride, n);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t av = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), av, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  float64x2_t s = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    s = vfmaq_f64(s, d, d);
  }
  double acc = vaddvq_f64(s);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void cross_accumulate(std::complex<double>* acc, const std::complex<double>* a,
                      const std::complex<double>* b, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    const double ar = a[k].real(), ai = a[k].imag();
    const double br = b[k].real(), bi = b[k].imag();
    acc[k] += std::complex<double>(ar * br + ai * bi, ai * br - ar * bi);
  }
}

void tanh_inplace(double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = std::tanh(x[i]);
}

}  // namespace

const KernelTable* neon_table() {
  static const KernelTable table{Isa::neon, fir_accumulate,   fir_weight_grad, dot,
                                 axpy,      squared_distance, cross_accumulate, tanh_inplace};
  return &table;
}

}  // namespace nlcoh::simd::detail

#else

namespace nlcoh::simd::detail {
const KernelTable* neon_table() { return nullptr; }
}  // namespace nlcoh::simd::detail

#endif
