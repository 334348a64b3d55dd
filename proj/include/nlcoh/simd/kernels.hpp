#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

// Data-parallel inner loops used by the convolution layers and the spectral
// averages. Every kernel has a portable scalar reference; vector variants are
// picked at runtime and must agree with the reference to rounding.
namespace nlcoh::simd {

enum class Isa { scalar, avx2, neon };

struct KernelTable {
  Isa isa;
  // out[t] += sum_j w[j] * in[t + j * stride], t in [0, n)
  void (*fir_accumulate)(double* out, const double* in, const double* w,
                         std::size_t taps, std::size_t stride, std::size_t n);
  // grad_w[j] += sum_t g[t] * in[t + j * stride], j in [0, taps)
  void (*fir_weight_grad)(double* grad_w, const double* g, const double* in,
                          std::size_t taps, std::size_t stride, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // acc[k] += a[k] * conj(b[k])
  void (*cross_accumulate)(std::complex<double>* acc,
                           const std::complex<double>* a,
                           const std::complex<double>* b, std::size_t n);
  // x[i] = tanh(x[i])
  void (*tanh_inplace)(double* x, std::size_t n);
};

bool isa_supported(Isa isa);
std::string_view isa_name(Isa isa);
Isa parse_isa(std::string_view name);

// Best supported ISA, unless NLCOH_ISA names another supported one.
Isa default_isa();

const KernelTable& kernels();
const KernelTable& kernels(Isa isa);

Isa active_isa();
void set_active_isa(Isa isa);

namespace detail {
const KernelTable& scalar_table();
const KernelTable* avx2_table();
const KernelTable* neon_table();
}  // namespace detail

}  // namespace nlcoh::simd
