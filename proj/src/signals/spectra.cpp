#include "nlcoh/signals/spectra.hpp"

#include <algorithm>
#include <string>

#include "nlcoh/error.hpp"
#include "nlcoh/simd/kernels.hpp"

namespace nlcoh {
namespace {

void check_pair(std::span<const SpectrumFrame> a, std::span<const SpectrumFrame> b) {
  if (a.empty() || b.empty()) throw InvalidInput("spectral estimate needs at least one frame");
  if (a.size() != b.size())
    throw InvalidInput("frame counts differ: " + std::to_string(a.size()) + " vs " +
                       std::to_string(b.size()));
  const std::size_t m = a.front().size();
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].size() != m || b[i].size() != m)
      throw InvalidInput("frame " + std::to_string(i) + " has a different length");
}

}  // namespace

CrossSpectrum cross_spectral_density(std::span<const SpectrumFrame> a,
                                     std::span<const SpectrumFrame> b) {
  check_pair(a, b);
  const std::size_t m = a.front().size();
  CrossSpectrum out{std::vector<Complex>(m, Complex{}), a.front().df};
  const auto& k = simd::kernels();
  for (std::size_t i = 0; i < a.size(); ++i)
    k.cross_accumulate(out.values.data(), a[i].bins.data(), b[i].bins.data(), m);
  const double inv = 1.0 / static_cast<double>(a.size());
  for (Complex& v : out.values) v *= inv;
  return out;
}

RealCurve power_spectral_density(std::span<const SpectrumFrame> a) {
  if (a.empty()) throw InvalidInput("spectral estimate needs at least one frame");
  const std::size_t m = a.front().size();
  RealCurve out{std::vector<double>(m, 0.0), a.front().df};
  for (const SpectrumFrame& f : a) {
    if (f.size() != m) throw InvalidInput("frames have different lengths");
    for (std::size_t k = 0; k < m; ++k) out.values[k] += std::norm(f.bins[k]);
  }
  const double inv = 1.0 / static_cast<double>(a.size());
  for (double& v : out.values) v *= inv;
  return out;
}

RealCurve linear_coherence(const CrossSpectrum& s_ab, const RealCurve& s_aa, const RealCurve& s_bb,
                           double guard) {
  const std::size_t m = s_ab.size();
  if (s_aa.size() != m || s_bb.size() != m) throw InvalidInput("spectra have different lengths");
  double max_den = 0.0;
  for (std::size_t k = 0; k < m; ++k) max_den = std::max(max_den, s_aa.values[k] * s_bb.values[k]);
  const double eps = guard * max_den;
  RealCurve out{std::vector<double>(m, 0.0), s_ab.df};
  for (std::size_t k = 0; k < m; ++k) {
    const double den = s_aa.values[k] * s_bb.values[k];
    if (den <= eps || den <= 0.0) continue;
    out.values[k] = std::clamp(std::norm(s_ab.values[k]) / den, 0.0, 1.0);
  }
  return out;
}

RealCurve linear_coherence(std::span<const SpectrumFrame> a, std::span<const SpectrumFrame> b,
                           const CoherenceOptions& options) {
  check_pair(a, b);
  if (a.size() < 2 && !options.allow_single_frame)
    throw InvalidInput("coherence from a single frame is identically 1; need at least 2 frames");
  return linear_coherence(cross_spectral_density(a, b), power_spectral_density(a),
                          power_spectral_density(b), options.guard);
}

RealCurve controlled_inputs_psd(std::span<const SpectrumFrame> yn, std::span<const SpectrumFrame> ym) {
  const CrossSpectrum s = cross_spectral_density(yn, ym);
  RealCurve out{std::vector<double>(s.size()), s.df};
  for (std::size_t k = 0; k < s.size(); ++k) out.values[k] = s.values[k].real();
  return out;
}

}  // namespace nlcoh

namespace nlcoh {

std::vector<bool> in_band_mask(const RealCurve& input_psd, double fraction) {
  double peak = 0.0;
  for (double v : input_psd.values) peak = std::max(peak, v);
  std::vector<bool> mask(input_psd.size(), false);
  for (std::size_t k = 0; k < mask.size(); ++k) mask[k] = peak > 0.0 && input_psd.values[k] > fraction * peak;
  return mask;
}

double band_mean(std::span<const double> values, const std::vector<bool>& mask) {
  if (values.size() != mask.size()) throw InvalidInput("band_mean: mask length mismatch");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < values.size(); ++k)
    if (mask[k]) {
      sum += values[k];
      ++n;
    }
  return n ? sum / static_cast<double>(n) : 0.0;
}

}  // namespace nlcoh
