#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "nlcoh/blend/kcurve.hpp"
#include "nlcoh/nn/conv_net.hpp"
#include "nlcoh/simulate/dataset.hpp"

namespace nlcoh {

// 0.001 followed by 20 values whose ratio lambda/(1-lambda) is log-spaced
// from 0.01 to 100.
std::vector<double> default_schedule();

struct SweepConfig {
  // The first entry is trained for initial_epochs, the rest for epochs_per_step.
  std::vector<double> schedule = default_schedule();
  std::size_t initial_epochs = 2000;
  std::size_t epochs_per_step = 100;
  std::size_t window = 100;
  double threshold = 0.01;
  double fallback_lambda = 0.99;
  std::size_t control_points = 50;
  double learning_rate = 0.01;
  // Keep training past the crossing so the trace covers the whole schedule.
  bool run_to_end = false;

  void validate() const;
};

std::vector<double> read_schedule(const std::filesystem::path& path);

struct SweepStep {
  double lambda = 0.0;
  std::size_t epochs = 0;
  // Losses per frame (the frame sums divided by the frame count), averaged
  // over the last `window` epochs of the step.
  double val_lx = 0.0;
  double train_lx = 0.0;
  double train_ly = 0.0;
  std::vector<double> k_controls;
  std::vector<double> net_parameters;

  double ratio() const { return lambda / (1.0 - lambda); }
};

struct LambdaSelection {
  std::optional<std::size_t> crossing;  // first step above running min + threshold
  std::optional<std::size_t> chosen;    // crossing - 1, or empty on fallback
  double lambda = 0.0;
};

// Stopping rule on per-step averaged validation losses: the first step whose
// value exceeds the minimum over all earlier steps by more than `threshold`
// selects the step before it; without a crossing the fallback applies.
LambdaSelection select_lambda(std::span<const double> lambdas, std::span<const double> averaged_val_lx,
                              double threshold, double fallback_lambda);

struct SweepTrace {
  std::vector<SweepStep> steps;
  LambdaSelection selection;
  std::vector<double> epoch_val_lx;  // per-frame validation L_x after every epoch
};

struct SweepResult {
  double lambda = 0.0;
  bool fallback = false;
  KCurve k;
  Conv1dNet net;
  SweepTrace trace;
};

using SweepProgress = std::function<void(const SweepStep&, std::size_t index)>;

// Trains the reverse network and K jointly with Adam, one frame per update,
// warm-starting each schedule step from the previous one. The returned state
// is the chosen step's snapshot; on fallback it is the final step's.
SweepResult run_sweep(const FramedDataset& ds, const SweepConfig& config, std::uint64_t seed,
                      const SweepProgress& progress = {});

// Re-applies the stopping rule to a finished trace at another threshold.
LambdaSelection reselect(const SweepTrace& trace, double threshold, double fallback_lambda);

// step, lambda, ratio, epochs, val_lx, train_lx, train_ly
void write_sweep_trace_csv(const std::filesystem::path& path, const SweepTrace& trace);
// kind, lambda, ratio, val_lx: one "trace" row per step, then one "crossing"
// marker row (absent when the fallback was used).
void write_lambda_plot_csv(const std::filesystem::path& path, const SweepTrace& trace);

}  // namespace nlcoh
