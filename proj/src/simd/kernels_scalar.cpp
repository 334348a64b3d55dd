#include "nlcoh/simd/kernels.hpp"

#include <cmath>

namespace nlcoh::simd::detail {
namespace {

void fir_accumulate(double* out, const double* in, const double* w,
                    std::size_t taps, std::size_t stride, std::size_t n) {
  for (std::size_t j = 0; j < taps; ++j) {
    const double wj = w[j];
    const double* src = in + j * stride;
    for (std::size_t t = 0; t < n; ++t) out[t] += wj * src[t];
  }
}

void fir_weight_grad(double* grad_w, const double* g, const double* in,
                     std::size_t taps, std::size_t stride, std::size_t n) {
  for (std::size_t j = 0; j < taps; ++j) {
    const double* src = in + j * stride;
    double acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) acc += g[t] * src[t];
    grad_w[j] += acc;
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
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

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::scalar,   fir_accumulate,   fir_weight_grad, dot,
                                 axpy,          squared_distance, cross_accumulate, tanh_inplace};
  return table;
}

}  // namespace nlcoh::simd::detail
