#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "nlcoh/signals/types.hpp"
#include "nlcoh/simulate/dataset.hpp"

namespace nlcoh {

struct ErrorRatio {
  std::vector<double> c;
  std::vector<bool> infinite;  // K == 1 exactly
};

// C = K / (1 - K): model-error PSD over measurement-noise PSD.
ErrorRatio error_ratio(std::span<const double> k);

struct SignalPsdEstimate {
  RealCurve psd;            // clipped to [0, S_YnYn]
  std::vector<double> raw;  // before clipping
  std::vector<bool> floored;
  std::vector<bool> ceilinged;
};

// S_YY ~ (C S_YnYn - S_YzYz + 2 Re S_YnYz) / (C + 1). An infinite C (K == 1)
// takes the limit S_YnYn. Estimates are clipped to [0, S_YnYn] so the implied
// noise PSD stays non-negative.
SignalPsdEstimate estimate_signal_psd(std::span<const double> c, const std::vector<bool>& c_infinite,
                                      const RealCurve& s_nn, const RealCurve& s_zz,
                                      const CrossSpectrum& s_nz);

struct NonlinearCoherence {
  RealCurve gamma2;         // clamped to [0, 1], 0 outside the band
  std::vector<double> raw;  // S_YY / S_YnYn before clamping, 0 outside the band
  std::vector<bool> in_band;
};

// gamma^2 = S_YY / S_YnYn on the bins of `in_band` (all bins with S_YnYn > 0
// when the mask is empty).
NonlinearCoherence nonlinear_coherence(const RealCurve& s_yy, const RealCurve& s_nn,
                                       std::vector<bool> in_band = {});

// Linear coherence between the forward prediction and the measurement.
RealCurve lower_bound_coherence(std::span<const SpectrumFrame> yz, std::span<const SpectrumFrame> yn);

struct CoherenceReport {
  double df = 0.0;
  std::size_t frames = 0;  // test frames averaged
  double lambda = 0.0;
  std::vector<double> s_xx;
  std::vector<double> s_nn;
  std::vector<double> s_zz;
  std::vector<bool> in_band;
  std::vector<double> k;
  std::vector<double> c;
  std::vector<double> s_yy_raw;
  std::vector<double> gamma2_raw;
  std::vector<double> gamma2;
  std::vector<double> lower_bound;
  std::optional<std::vector<double>> gamma2_true;

  std::size_t size() const { return gamma2.size(); }
  double frequency(std::size_t bin) const { return static_cast<double>(bin) * df; }
};

// Runs the reconstruction chain on the test split from K over bins 0..M/2.
CoherenceReport build_coherence_report(const FramedDataset& ds, std::span<const double> k_half,
                                       double lambda);

struct CoherenceSummary {
  std::size_t bins_in_band = 0;
  double lambda = 0.0;
  double band_mean_estimate = 0.0;
  double band_mean_lower_bound = 0.0;
  double band_mean_improvement = 0.0;   // mean(gamma2 - lower bound)
  double min_margin_over_bound = 0.0;   // min(gamma2 - lower bound)
  double max_raw_estimate = 0.0;
  std::size_t floored_bins = 0;
  std::optional<double> band_mean_true;
  std::optional<double> band_mean_abs_error;
};

CoherenceSummary summarize(const CoherenceReport& report);

// Columns: frequency, gamma2_est, lower_bound, [gamma2_true,] K, C, gamma2_raw,
// S_yy_raw, S_xx, S_nn, S_zz, in_band.
void write_report_csv(const std::filesystem::path& path, const CoherenceReport& report);
CoherenceReport read_report_csv(const std::filesystem::path& path);
void write_summary_json(const std::filesystem::path& path, const CoherenceSummary& summary);

}  // namespace nlcoh
