#include "nlcoh/nn/forward_model.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "nlcoh/error.hpp"
#include "nlcoh/simd/kernels.hpp"
#include "nlcoh/simulate/rng.hpp"

namespace nlcoh {

ForwardModelConfig forward_preset(SystemKind kind) {
  switch (kind) {
    case SystemKind::polynomial_stiffness: return {20, 5, 10, 1000, 0.01, 0};
    case SystemKind::saturating_stiffness: return {10, 5, 3, 100, 0.01, 0};
    case SystemKind::coulomb_friction: return {10, 5, 3, 1000, 0.01, 0};
  }
  return {};
}

namespace {

double rms(const FrameSet& s) {
  double e = 0.0;
  for (double v : s.data()) e += v * v;
  return std::sqrt(e / static_cast<double>(s.data().size()));
}

}  // namespace

ForwardModelResult train_forward_model(FramedDataset& ds, const ForwardModelConfig& cfg) {
  const DatasetManifest& m = ds.manifest;
  if (ds.x.empty() || ds.y_n.empty()) throw DataError("forward model training needs x and y_n");
  ForwardModelResult r;
  r.net = forward_benchmark_net(cfg.kernel_width, cfg.layers, cfg.features);
  r.net.initialize(cfg.seed);
  r.optimizer = AdamState(r.net.parameter_count(), AdamConfig{cfg.learning_rate});
  r.input_scale = rms(ds.x);
  r.output_scale = rms(ds.y_n);
  if (!(r.input_scale > 0.0) || !(r.output_scale > 0.0)) throw DataError("x or y_n is identically zero");

  const std::size_t n = m.length;
  const std::size_t lo = r.net.edge_before();
  const std::size_t hi = n - r.net.edge_after();
  if (lo >= hi) throw InvalidInput("frames are shorter than the forward model's receptive field");
  const double inv_count = 1.0 / static_cast<double>(hi - lo);
  const auto& k = simd::kernels();

  std::vector<double> input(n), target(n), upstream(n, 0.0), grad(r.net.parameter_count());
  ConvTape tape;
  const auto train_rows = m.split.train();
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    double epoch_loss = 0.0;
    for (std::size_t row : shuffled_rows(train_rows, cfg.seed, epoch)) {
      auto xs = ds.x.frame(row);
      auto ys = ds.y_n.frame(row);
      for (std::size_t t = 0; t < n; ++t) {
        input[t] = xs[t] / r.input_scale;
        target[t] = ys[t] / r.output_scale;
      }
      auto out = r.net.forward(input, tape);
      const double loss = k.squared_distance(out.data() + lo, target.data() + lo, hi - lo) * inv_count;
      if (!std::isfinite(loss))
        throw DivergenceError("forward model loss diverged at epoch " + std::to_string(epoch));
      epoch_loss += loss;
      for (std::size_t t = lo; t < hi; ++t) upstream[t] = 2.0 * (out[t] - target[t]) * inv_count;
      r.net.backward(tape, upstream, grad);
      try {
        adam_step(r.optimizer, r.net.parameters(), grad);
      } catch (const DivergenceError& e) {
        throw DivergenceError(std::string(e.what()) + " (forward model, epoch " + std::to_string(epoch) + ")");
      }
    }
    r.epoch_loss.push_back(epoch_loss / static_cast<double>(train_rows.size()));
  }

  ds.y_z = FrameSet(m.frames, n, m.dt);
  for (std::size_t i = 0; i < m.frames; ++i) {
    auto xs = ds.x.frame(i);
    for (std::size_t t = 0; t < n; ++t) input[t] = xs[t] / r.input_scale;
    auto out = r.net.forward(input, tape);
    auto yz = ds.y_z.frame(i);
    for (std::size_t t = 0; t < n; ++t) yz[t] = out[t] * r.output_scale;
  }
  if (ds.has_ground_truth()) {
    const auto rows = m.split.test(m.frames);
    r.capture_fraction = capture_fraction(ds.y, ds.y_z, rows, lo, n - hi);
    ds.manifest.forward_capture = r.capture_fraction;
  }
  return r;
}

}  // namespace nlcoh
