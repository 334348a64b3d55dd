#pragma once

#include <cstdint>
#include <vector>

#include "nlcoh/nn/adam.hpp"
#include "nlcoh/nn/conv_net.hpp"
#include "nlcoh/simulate/dataset.hpp"

namespace nlcoh {

struct ForwardModelConfig {
  std::size_t kernel_width = 10;
  std::size_t layers = 5;
  std::size_t features = 3;
  std::size_t epochs = 100;
  double learning_rate = 0.01;
  std::uint64_t seed = 0;
};

// Case-study hyperparameters for the forward benchmark of each system.
ForwardModelConfig forward_preset(SystemKind kind);

struct ForwardModelResult {
  Conv1dNet net;
  AdamState optimizer;
  std::vector<double> epoch_loss;  // mean training loss per epoch
  double input_scale = 1.0;        // rms of x
  double output_scale = 1.0;       // rms of y_n
  // Against the noise-free response over the test split, when available.
  std::optional<double> capture_fraction;
};

// Trains x -> y_n on the training split (one frame per step, frame order
// shuffled each epoch), then writes y_z for every frame into `ds`. Signals are
// divided by their rms before entering the network. Loss sums skip the
// samples whose receptive field reaches into the zero padding.
ForwardModelResult train_forward_model(FramedDataset& ds, const ForwardModelConfig& config);

}  // namespace nlcoh
