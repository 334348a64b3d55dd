#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace nlcoh {

struct AdamConfig {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  bool operator==(const AdamConfig&) const = default;
};

struct AdamState {
  AdamConfig config;
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;

  AdamState() = default;
  AdamState(std::size_t size, AdamConfig cfg) : config(cfg), m(size, 0.0), v(size, 0.0) {}
  bool operator==(const AdamState&) const = default;
};

// Bias-corrected Adam update in place. Throws DivergenceError naming the
// first non-finite gradient entry; parameters are untouched in that case.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads);

}  // namespace nlcoh
