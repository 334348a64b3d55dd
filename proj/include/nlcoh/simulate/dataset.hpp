#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nlcoh/signals/frame_io.hpp"
#include "nlcoh/signals/types.hpp"
#include "nlcoh/simulate/oscillator.hpp"

namespace nlcoh {

enum class NoiseLevel { none, low, moderate, high, explicit_scale };

std::string_view noise_level_name(NoiseLevel level);
NoiseLevel parse_noise_level(std::string_view name);
// Band-mean true coherence each preset level is calibrated to (0.9/0.6/0.3).
double target_coherence(NoiseLevel level);

struct NoiseSpec {
  NoiseLevel level = NoiseLevel::none;
  // rms of the added noise when level == explicit_scale.
  double scale = 0.0;
  // Defaults to the excitation band when left empty.
  Band band;
  std::uint64_t seed = 0;
};

// First n_train frames train, the next n_val validate, the rest are test.
struct DatasetSplit {
  std::size_t n_train = 10;
  std::size_t n_val = 10;

  std::vector<std::size_t> train() const;
  std::vector<std::size_t> validation() const;
  std::vector<std::size_t> test(std::size_t total) const;
  std::size_t minimum_frames() const { return n_train + n_val + 1; }
};

struct DatasetManifest {
  std::size_t frames = 0;
  std::size_t length = 0;
  double dt = 1.0;
  DatasetSplit split;
  std::uint64_t seed = 0;
  std::size_t lead_in = 1000;
  FrameFormat format = FrameFormat::binary;
  std::string source = "simulated";
  std::optional<OscillatorSpec> oscillator;
  std::optional<NoiseSpec> noise;
  double noise_scale = 0.0;  // realised rms multiplier of the unit noise records
  std::optional<double> forward_capture;
};

// Aligned frames of the input x, noise-free response y (simulated data only),
// measurement y_n = y + noise, and optionally a forward-model prediction y_z.
struct FramedDataset {
  DatasetManifest manifest;
  FrameSet x;
  FrameSet y;
  FrameSet y_n;
  FrameSet y_z;
  FrameSet noise;  // y_n - y as stored
  std::optional<RealCurve> true_coherence;

  bool has_ground_truth() const { return !y.empty(); }
  bool has_forward_prediction() const { return !y_z.empty(); }
  double df() const { return 1.0 / (static_cast<double>(manifest.length) * manifest.dt); }
};

// Flat-magnitude, uniform-random-phase spectrum inside `band`, zero outside,
// rescaled to the requested time-domain rms.
TimeFrame bandlimited_noise(double rms, Band band, std::size_t length, double dt,
                            std::uint64_t seed);

// Simulates n_frames independent records from rest, discarding a lead-in of
// manifest.lead_in steps before the `length` retained samples. y_n is left
// equal to y until add_output_noise is applied.
FramedDataset simulate_dataset(const OscillatorSpec& spec, std::size_t n_frames,
                               std::size_t length, std::uint64_t seed, DatasetSplit split = {},
                               std::size_t lead_in = 1000);

// Full input record (lead-in included) of frame i, regenerated from the seed.
std::vector<double> input_record(const DatasetManifest& manifest, std::size_t frame);

// Adds band-limited output noise from its own random stream and stores the
// true nonlinear coherence S_YY / S_YnYn over the test split.
FramedDataset add_output_noise(FramedDataset ds, const NoiseSpec& noise);

// True nonlinear coherence over the test split.
RealCurve true_coherence(const FramedDataset& ds);

struct LinearizedResponse {
  FrameSet frames;
  double capture_fraction = 0.0;
  OscillatorSpec linear_spec;
};

// Replaces the nonlinear force with its least-squares fit k*y + c*y' over the
// noise-free response, re-simulates with the same inputs, and reports
// capture = 1 - sum|y - y_lin|^2 / sum|y|^2.
LinearizedResponse linearized_response(const FramedDataset& ds, const OscillatorSpec& spec);

// 1 - sum|reference - prediction|^2 / sum|reference|^2 over the given rows,
// skipping `edge` samples at the start and end of each frame.
double capture_fraction(const FrameSet& reference, const FrameSet& prediction,
                        std::span<const std::size_t> rows, std::size_t edge_start = 0,
                        std::size_t edge_end = 0);

void save_dataset(const std::filesystem::path& dir, const FramedDataset& ds);
FramedDataset load_dataset(const std::filesystem::path& dir);
// System recorded in a dataset manifest; empty for external data.
std::optional<SystemKind> dataset_system(const std::filesystem::path& dir);
// Rewrites only the manifest and the y_z frames.
void save_forward_prediction(const std::filesystem::path& dir, const FramedDataset& ds);

}  // namespace nlcoh
