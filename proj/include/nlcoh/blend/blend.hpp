#pragma once

#include <span>
#include <vector>

#include "nlcoh/blend/kcurve.hpp"
#include "nlcoh/nn/conv_net.hpp"
#include "nlcoh/signals/fft.hpp"
#include "nlcoh/signals/types.hpp"
#include "nlcoh/simulate/dataset.hpp"

namespace nlcoh {

// Yhat = Yn K + Yz (1 - K) per bin. K == 1 and K == 0 return Yn and Yz
// exactly, as does Yn == Yz for any K.
SpectrumFrame blend_spectra(const SpectrumFrame& yn, const SpectrumFrame& yz, std::span<const double> k);

struct BlendLossTerms {
  double l_x = 0.0;
  double l_y = 0.0;
  double sigma_x2 = 1.0;
  double sigma_y2 = 1.0;
  double lambda = 0.0;

  double total() const { return (1.0 - lambda) * l_x + lambda * l_y; }
};

// Composite objective L = (1 - lambda) L_x + lambda L_y over a set of frames,
//   L_x = sum_i |F(yhat_i) - x_i|^2 / sigma_x^2,  L_y = sum_i |yhat_i - yn_i|^2 / sigma_y^2,
// with yhat_i = ifft(blend(fft(yn_i), fft(yz_i), K)) and sigma^2 the mean
// squared frame norm over the whole dataset. The network sees yhat divided by
// the rms of y_n and its output is multiplied by the rms of x. L_x skips the
// frame edges where the network's receptive field reaches the padding.
class BlendObjective {
 public:
  explicit BlendObjective(const FramedDataset& ds);

  std::size_t length() const { return length_; }
  double sigma_x2() const { return sigma_x2_; }
  double sigma_y2() const { return sigma_y2_; }

  std::vector<double> blended(const KCurve& k, std::size_t row) const;

  BlendLossTerms evaluate(const Conv1dNet& net, const KCurve& k, double lambda,
                          std::span<const std::size_t> rows) const;

  // Loss terms plus exact gradients summed over `rows`; both gradient buffers
  // are overwritten.
  BlendLossTerms gradient(const Conv1dNet& net, const KCurve& k, double lambda,
                          std::span<const std::size_t> rows, std::span<double> net_grad,
                          std::span<double> k_grad) const;

 private:
  struct Workspace;
  void blend_into(std::span<const double> k_half, std::size_t row, Workspace& ws) const;

  const FramedDataset* ds_;
  std::size_t length_;
  double sigma_x2_ = 1.0;
  double sigma_y2_ = 1.0;
  double x_rms_ = 1.0;
  double y_rms_ = 1.0;
  std::vector<std::vector<Complex>> yz_half_;
  std::vector<std::vector<Complex>> diff_half_;  // Yn - Yz
  std::vector<std::vector<Complex>> yn_half_;
  mutable RealFft fft_;
};

struct OptimalK {
  std::vector<double> k;
  std::vector<bool> indifferent;  // both error PSDs zero; K set to 0.5
};

// K = 1 / (1 + S_nn / S_zz) per bin, minimiser of K^2 S_nn + (1 - K)^2 S_zz.
OptimalK optimal_k_closed_form(std::span<const double> noise_psd, std::span<const double> model_error_psd);

}  // namespace nlcoh
