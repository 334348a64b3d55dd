#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "nlcoh/nn/forward_model.hpp"
#include "nlcoh/simulate/dataset.hpp"
#include "nlcoh/sweep/sweep.hpp"

// Everything a run needs besides the data itself, as flat `key = value` text.
// Unknown keys are rejected; omitted keys keep their defaults.
//
//   data, out                 paths
//   system                    poly | sat | friction | external
//   noise, noise_scale        none | low | moderate | high | explicit; rms for explicit
//   frames, length, lead_in, seed, noise_seed, format
//   forward.kernel_width, forward.layers, forward.features, forward.epochs,
//   forward.learning_rate, forward.seed
//   sweep.schedule            default | path to one lambda per line
//   sweep.initial_epochs, sweep.epochs_per_step, sweep.window, sweep.threshold,
//   sweep.fallback_lambda, sweep.control_points, sweep.learning_rate,
//   sweep.seed, sweep.run_to_end, sweep.sensitivity
namespace nlcoh {

struct RunConfig {
  std::filesystem::path data;
  std::filesystem::path out;
  // poly | sat | friction | external. Empty means poly for simulate and the
  // dataset's own system everywhere else.
  std::string system;
  NoiseLevel noise = NoiseLevel::moderate;
  double noise_scale = 0.0;
  std::size_t frames = 1000;
  std::size_t length = 6000;
  std::size_t lead_in = 1000;
  std::uint64_t seed = 7;
  std::uint64_t noise_seed = 8;
  FrameFormat format = FrameFormat::binary;

  // Filled from the system preset unless set explicitly.
  std::optional<ForwardModelConfig> forward;

  std::string schedule = "default";
  SweepConfig sweep;
  std::uint64_t sweep_seed = 11;
  bool sensitivity = false;

  bool external() const { return system == "external"; }
  ForwardModelConfig forward_config() const;
  SweepConfig sweep_config() const;  // resolves the schedule
};

// Fills an empty system from the manifest under config.data, when it names one.
void infer_system(RunConfig& config);

// Applies one key/value pair; throws InvalidInput on unknown keys or bad values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);
RunConfig parse_run_config(const std::string& text);
RunConfig read_run_config(const std::filesystem::path& path);
std::string serialize(const RunConfig& config);
void write_run_config(const std::filesystem::path& path, const RunConfig& config);

}  // namespace nlcoh
