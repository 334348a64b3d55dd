#pragma once

#include <span>

#include "nlcoh/signals/types.hpp"

// Frame-averaged spectral estimators. Frames are independent records with a
// rectangular window; every average runs in frame order so results are
// reproducible bit-for-bit.
namespace nlcoh {

// S_AB(f) = mean_i A_i(f) conj(B_i(f)).
CrossSpectrum cross_spectral_density(std::span<const SpectrumFrame> a,
                                     std::span<const SpectrumFrame> b);

// S_AA(f), real and non-negative.
RealCurve power_spectral_density(std::span<const SpectrumFrame> a);

struct CoherenceOptions {
  // A single frame gives coherence 1 everywhere; reject it unless asked not to.
  bool allow_single_frame = false;
  // Bins whose S_AA * S_BB falls below guard * max_f(S_AA * S_BB) report 0.
  double guard = 1e-12;
};

// |S_AB|^2 / (S_AA S_BB), clamped to [0, 1].
RealCurve linear_coherence(std::span<const SpectrumFrame> a, std::span<const SpectrumFrame> b,
                           const CoherenceOptions& options = {});

// Same, from already averaged spectra.
RealCurve linear_coherence(const CrossSpectrum& s_ab, const RealCurve& s_aa, const RealCurve& s_bb,
                           double guard = 1e-12);

// PSD of the deterministic part of a response from two index-aligned noisy
// repeats driven by the same inputs: Re(mean_i Yn_i conj(Ym_i)). Unbiased only
// when the two noise records are independent of each other and of the response.
RealCurve controlled_inputs_psd(std::span<const SpectrumFrame> yn, std::span<const SpectrumFrame> ym);

}  // namespace nlcoh

namespace nlcoh {

// Bins where the input PSD exceeds `fraction` of its maximum.
std::vector<bool> in_band_mask(const RealCurve& input_psd, double fraction = 0.01);

// Mean of `values` over the masked bins (0 when the mask is empty).
double band_mean(std::span<const double> values, const std::vector<bool>& mask);

}  // namespace nlcoh
