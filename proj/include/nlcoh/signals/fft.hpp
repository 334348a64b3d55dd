#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "nlcoh/signals/types.hpp"

// Discrete Fourier transforms. Convention: the forward transform is unscaled,
// X[k] = sum_t x[t] exp(-2 pi i k t / M), and the inverse carries the 1/M.
namespace nlcoh {

// Real-input transform of one fixed length M, working on the M/2+1
// non-negative-frequency bins. Plans are cached per length and reused.
class RealFft {
 public:
  explicit RealFft(std::size_t length);
  ~RealFft();
  RealFft(RealFft&&) noexcept;
  RealFft& operator=(RealFft&&) noexcept;
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t length() const { return length_; }
  std::size_t half_length() const { return length_ / 2 + 1; }

  void forward(std::span<const double> in, std::span<Complex> out);
  // Scaled by 1/M. The imaginary parts of bin 0 (and M/2 for even M) are ignored.
  void inverse(std::span<const Complex> in, std::span<double> out);

 private:
  struct Impl;
  std::size_t length_;
  std::unique_ptr<Impl> impl_;
};

// Full M-bin transform of a real frame. Throws InvalidInput for frames
// shorter than 2 samples.
SpectrumFrame fft(const TimeFrame& frame);

// Full complex inverse (scaled by 1/M).
std::vector<Complex> ifft_complex(std::span<const Complex> bins);

// Inverse of a full M-bin spectrum that must come from a real frame. The
// imaginary residue is discarded; throws InvalidInput when it exceeds
// `tolerance` relative to the largest real sample.
TimeFrame ifft(const SpectrumFrame& spectrum, double tolerance = 1e-10);

// The non-negative-frequency bins of every frame in a set.
std::vector<SpectrumFrame> half_spectra(const FrameSet& set);
std::vector<SpectrumFrame> half_spectra(const FrameSet& set, std::span<const std::size_t> rows);

}  // namespace nlcoh
