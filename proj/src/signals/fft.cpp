#include "nlcoh/signals/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>

#include "nlcoh/error.hpp"

namespace nlcoh {
namespace {

// fftw plan creation is not thread-safe; execution is. Plans are built once
// per length with FFTW_UNALIGNED so results never depend on buffer alignment.
struct PlanSet {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  fftw_plan c2c_forward = nullptr;
  fftw_plan c2c_backward = nullptr;
};

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

const PlanSet& plans_for(std::size_t n) {
  static std::map<std::size_t, PlanSet> cache;
  std::lock_guard lock(planner_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  const int len = static_cast<int>(n);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::vector<double> real(n);
  std::vector<fftw_complex> a(n), b(n);
  PlanSet p;
  p.r2c = fftw_plan_dft_r2c_1d(len, real.data(), a.data(), flags);
  p.c2r = fftw_plan_dft_c2r_1d(len, a.data(), real.data(), flags);
  p.c2c_forward = fftw_plan_dft_1d(len, a.data(), b.data(), FFTW_FORWARD, flags);
  p.c2c_backward = fftw_plan_dft_1d(len, a.data(), b.data(), FFTW_BACKWARD, flags);
  if (!p.r2c || !p.c2r || !p.c2c_forward || !p.c2c_backward)
    throw std::runtime_error("fftw failed to create a plan of length " + std::to_string(n));
  return cache.emplace(n, p).first->second;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

void check_length(std::size_t n) {
  if (n < 2) throw InvalidInput("transform length must be at least 2, got " + std::to_string(n));
}

}  // namespace

struct RealFft::Impl {
  const PlanSet* plans;
  std::vector<Complex> scratch;
  std::vector<double> real_scratch;
};

RealFft::RealFft(std::size_t length) : length_(length) {
  check_length(length);
  impl_ = std::make_unique<Impl>(
      Impl{&plans_for(length), std::vector<Complex>(length / 2 + 1), std::vector<double>(length)});
}

RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

void RealFft::forward(std::span<const double> in, std::span<Complex> out) {
  if (in.size() != length_ || out.size() != half_length())
    throw InvalidInput("RealFft::forward: buffer sizes do not match the plan");
  std::copy(in.begin(), in.end(), impl_->real_scratch.begin());
  fftw_execute_dft_r2c(impl_->plans->r2c, impl_->real_scratch.data(), as_fftw(out.data()));
}

void RealFft::inverse(std::span<const Complex> in, std::span<double> out) {
  if (in.size() != half_length() || out.size() != length_)
    throw InvalidInput("RealFft::inverse: buffer sizes do not match the plan");
  std::copy(in.begin(), in.end(), impl_->scratch.begin());
  fftw_execute_dft_c2r(impl_->plans->c2r, as_fftw(impl_->scratch.data()), out.data());
  const double scale = 1.0 / static_cast<double>(length_);
  for (double& v : out) v *= scale;
}

SpectrumFrame fft(const TimeFrame& frame) {
  const std::size_t n = frame.size();
  if (n == 0) throw InvalidInput("fft of an empty frame");
  check_length(n);
  if (!(frame.dt > 0.0)) throw InvalidInput("fft: dt must be positive");
  const PlanSet& p = plans_for(n);
  std::vector<Complex> in(n), out(n);
  for (std::size_t t = 0; t < n; ++t) in[t] = frame.samples[t];
  fftw_execute_dft(p.c2c_forward, as_fftw(in.data()), as_fftw(out.data()));
  return {std::move(out), 1.0 / (static_cast<double>(n) * frame.dt)};
}

std::vector<Complex> ifft_complex(std::span<const Complex> bins) {
  const std::size_t n = bins.size();
  check_length(n);
  const PlanSet& p = plans_for(n);
  std::vector<Complex> in(bins.begin(), bins.end()), out(n);
  fftw_execute_dft(p.c2c_backward, as_fftw(in.data()), as_fftw(out.data()));
  const double scale = 1.0 / static_cast<double>(n);
  for (Complex& v : out) v *= scale;
  return out;
}

TimeFrame ifft(const SpectrumFrame& spectrum, double tolerance) {
  if (!(spectrum.df > 0.0)) throw InvalidInput("ifft: df must be positive");
  const auto z = ifft_complex(spectrum.bins);
  double max_re = 0.0, max_im = 0.0;
  for (const Complex& v : z) {
    max_re = std::max(max_re, std::abs(v.real()));
    max_im = std::max(max_im, std::abs(v.imag()));
  }
  if (max_im > tolerance * std::max(max_re, 1e-300) && max_im > 0.0)
    throw InvalidInput("ifft: spectrum is not conjugate-symmetric (imaginary residue " +
                       std::to_string(max_im) + ")");
  TimeFrame out;
  out.samples.resize(z.size());
  for (std::size_t t = 0; t < z.size(); ++t) out.samples[t] = z[t].real();
  out.dt = 1.0 / (static_cast<double>(z.size()) * spectrum.df);
  return out;
}

std::vector<SpectrumFrame> half_spectra(const FrameSet& set, std::span<const std::size_t> rows) {
  RealFft plan(set.length());
  const double df = 1.0 / (static_cast<double>(set.length()) * set.dt());
  std::vector<SpectrumFrame> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) {
    if (r >= set.frames()) throw InvalidInput("half_spectra: frame index out of range");
    SpectrumFrame s{std::vector<Complex>(plan.half_length()), df};
    plan.forward(set.frame(r), s.bins);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<SpectrumFrame> half_spectra(const FrameSet& set) {
  std::vector<std::size_t> rows(set.frames());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return half_spectra(set, rows);
}

}  // namespace nlcoh
