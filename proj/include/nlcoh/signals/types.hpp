#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace nlcoh {

using Complex = std::complex<double>;

// One fixed-length record of a sampled signal.
struct TimeFrame {
  std::vector<double> samples;
  double dt = 1.0;

  std::size_t size() const { return samples.size(); }
};

// Fourier coefficients of one frame. Either all M bins or the M/2+1
// non-negative-frequency bins of a real frame; the spectral estimators work
// per bin and accept both.
struct SpectrumFrame {
  std::vector<Complex> bins;
  double df = 1.0;

  std::size_t size() const { return bins.size(); }
};

// A per-bin quantity over a frequency grid starting at 0 Hz.
template <class T>
struct Curve {
  std::vector<T> values;
  double df = 1.0;

  std::size_t size() const { return values.size(); }
  double frequency(std::size_t bin) const { return static_cast<double>(bin) * df; }
};

using CrossSpectrum = Curve<Complex>;
using RealCurve = Curve<double>;

// N frames of equal length stored frame-major in one buffer.
class FrameSet {
 public:
  FrameSet() = default;
  FrameSet(std::size_t frames, std::size_t length, double dt)
      : frames_(frames), length_(length), dt_(dt), data_(frames * length, 0.0) {}

  std::size_t frames() const { return frames_; }
  std::size_t length() const { return length_; }
  double dt() const { return dt_; }
  bool empty() const { return frames_ == 0; }

  std::span<double> frame(std::size_t i) { return {data_.data() + i * length_, length_}; }
  std::span<const double> frame(std::size_t i) const {
    return {data_.data() + i * length_, length_};
  }
  TimeFrame time_frame(std::size_t i) const {
    auto f = frame(i);
    return {std::vector<double>(f.begin(), f.end()), dt_};
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const FrameSet&) const = default;

 private:
  std::size_t frames_ = 0;
  std::size_t length_ = 0;
  double dt_ = 1.0;
  std::vector<double> data_;
};

}  // namespace nlcoh
