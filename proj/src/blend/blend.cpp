#include "nlcoh/blend/blend.hpp"

#include <cmath>
#include <string>

#include "nlcoh/error.hpp"
#include "nlcoh/simd/kernels.hpp"

namespace nlcoh {
namespace {

// Both branches reproduce the endpoints exactly: for K >= 1/2 the factor 1-K
// is exact, and a zero difference leaves the anchor untouched.
inline Complex blend_bin(const Complex& yn, const Complex& yz, double k) {
  return k >= 0.5 ? yn + (1.0 - k) * (yz - yn) : yz + k * (yn - yz);
}

double mean_squared_norm(const FrameSet& s) {
  double e = 0.0;
  for (double v : s.data()) e += v * v;
  return e / static_cast<double>(s.frames());
}

}  // namespace

SpectrumFrame blend_spectra(const SpectrumFrame& yn, const SpectrumFrame& yz, std::span<const double> k) {
  if (yn.size() != yz.size() || yn.size() != k.size())
    throw InvalidInput("blend_spectra: lengths differ (" + std::to_string(yn.size()) + ", " +
                       std::to_string(yz.size()) + ", " + std::to_string(k.size()) + ")");
  SpectrumFrame out{std::vector<Complex>(yn.size()), yn.df};
  for (std::size_t i = 0; i < yn.size(); ++i) out.bins[i] = blend_bin(yn.bins[i], yz.bins[i], k[i]);
  return out;
}

struct BlendObjective::Workspace {
  std::vector<Complex> spectrum;
  std::vector<double> yhat;
  std::vector<double> net_in;
  std::vector<double> upstream;
  std::vector<double> input_grad;
  std::vector<double> frame_grad;
  std::vector<Complex> grad_spectrum;
  ConvTape tape;
};

BlendObjective::BlendObjective(const FramedDataset& ds)
    : ds_(&ds), length_(ds.manifest.length), fft_(ds.manifest.length) {
  if (!ds.has_forward_prediction())
    throw DataError("dataset has no forward prediction y_z; run train-forward first");
  sigma_x2_ = mean_squared_norm(ds.x);
  sigma_y2_ = mean_squared_norm(ds.y_n);
  if (!(sigma_x2_ > 0.0) || !(sigma_y2_ > 0.0)) throw DataError("x or y_n is identically zero");
  x_rms_ = std::sqrt(sigma_x2_ / static_cast<double>(length_));
  y_rms_ = std::sqrt(sigma_y2_ / static_cast<double>(length_));
  const std::size_t h = fft_.half_length();
  yz_half_.resize(ds.manifest.frames);
  yn_half_.resize(ds.manifest.frames);
  diff_half_.resize(ds.manifest.frames);
  for (std::size_t i = 0; i < ds.manifest.frames; ++i) {
    yn_half_[i].resize(h);
    yz_half_[i].resize(h);
    diff_half_[i].resize(h);
    fft_.forward(ds.y_n.frame(i), yn_half_[i]);
    fft_.forward(ds.y_z.frame(i), yz_half_[i]);
    for (std::size_t j = 0; j < h; ++j) diff_half_[i][j] = yn_half_[i][j] - yz_half_[i][j];
  }
}

void BlendObjective::blend_into(std::span<const double> k_half, std::size_t row, Workspace& ws) const {
  const std::size_t h = fft_.half_length();
  ws.spectrum.resize(h);
  for (std::size_t j = 0; j < h; ++j) ws.spectrum[j] = blend_bin(yn_half_[row][j], yz_half_[row][j], k_half[j]);
  ws.yhat.resize(length_);
  fft_.inverse(ws.spectrum, ws.yhat);
}

std::vector<double> BlendObjective::blended(const KCurve& k, std::size_t row) const {
  if (k.length() != length_) throw InvalidInput("K curve length does not match the frames");
  Workspace ws;
  blend_into(k.evaluate_half(), row, ws);
  return ws.yhat;
}

BlendLossTerms BlendObjective::evaluate(const Conv1dNet& net, const KCurve& k, double lambda,
                                        std::span<const std::size_t> rows) const {
  if (k.length() != length_) throw InvalidInput("K curve length does not match the frames");
  const auto& kern = simd::kernels();
  const auto k_half = k.evaluate_half();
  const std::size_t lo = net.edge_before(), hi = length_ - net.edge_after();
  Workspace ws;
  BlendLossTerms terms{0.0, 0.0, sigma_x2_, sigma_y2_, lambda};
  ws.net_in.resize(length_);
  for (std::size_t row : rows) {
    blend_into(k_half, row, ws);
    for (std::size_t t = 0; t < length_; ++t) ws.net_in[t] = ws.yhat[t] / y_rms_;
    auto out = net.forward(ws.net_in, ws.tape);
    auto x = ds_->x.frame(row);
    double ex = 0.0;
    for (std::size_t t = lo; t < hi; ++t) {
      const double d = out[t] * x_rms_ - x[t];
      ex += d * d;
    }
    terms.l_x += ex / sigma_x2_;
    terms.l_y += kern.squared_distance(ws.yhat.data(), ds_->y_n.frame(row).data(), length_) / sigma_y2_;
  }
  return terms;
}

BlendLossTerms BlendObjective::gradient(const Conv1dNet& net, const KCurve& k, double lambda,
                                        std::span<const std::size_t> rows, std::span<double> net_grad,
                                        std::span<double> k_grad) const {
  if (k.length() != length_) throw InvalidInput("K curve length does not match the frames");
  if (net_grad.size() != net.parameter_count() || k_grad.size() != k.control_points())
    throw InvalidInput("BlendObjective::gradient: gradient buffer sizes do not match");
  const auto& kern = simd::kernels();
  const auto k_half = k.evaluate_half();
  const std::size_t h = fft_.half_length();
  const std::size_t lo = net.edge_before(), hi = length_ - net.edge_after();
  const double m = static_cast<double>(length_);

  Workspace ws;
  ws.net_in.resize(length_);
  ws.upstream.assign(length_, 0.0);
  ws.input_grad.resize(length_);
  ws.frame_grad.resize(net.parameter_count());
  ws.grad_spectrum.resize(h);
  std::vector<double> grad_k_half(h, 0.0);
  std::fill(net_grad.begin(), net_grad.end(), 0.0);

  BlendLossTerms terms{0.0, 0.0, sigma_x2_, sigma_y2_, lambda};
  const double wx = (1.0 - lambda) / sigma_x2_;
  const double wy = lambda / sigma_y2_;
  for (std::size_t row : rows) {
    blend_into(k_half, row, ws);
    for (std::size_t t = 0; t < length_; ++t) ws.net_in[t] = ws.yhat[t] / y_rms_;
    auto out = net.forward(ws.net_in, ws.tape);
    auto x = ds_->x.frame(row);
    auto yn = ds_->y_n.frame(row);

    double ex = 0.0;
    for (std::size_t t = lo; t < hi; ++t) {
      const double d = out[t] * x_rms_ - x[t];
      ex += d * d;
      ws.upstream[t] = 2.0 * wx * d * x_rms_;
    }
    terms.l_x += ex / sigma_x2_;
    terms.l_y += kern.squared_distance(ws.yhat.data(), yn.data(), length_) / sigma_y2_;

    net.backward(ws.tape, ws.upstream, ws.frame_grad, ws.input_grad);
    for (std::size_t i = 0; i < net_grad.size(); ++i) net_grad[i] += ws.frame_grad[i];

    // dL/dyhat, then through the inverse transform to the half-spectrum K.
    for (std::size_t t = 0; t < length_; ++t)
      ws.input_grad[t] = ws.input_grad[t] / y_rms_ + 2.0 * wy * (ws.yhat[t] - yn[t]);
    fft_.forward(ws.input_grad, ws.grad_spectrum);
    const auto& d = diff_half_[row];
    for (std::size_t j = 0; j < h; ++j) {
      const bool self_conjugate = j == 0 || (length_ % 2 == 0 && j == h - 1);
      const double factor = (self_conjugate ? 1.0 : 2.0) / m;
      grad_k_half[j] += factor * (d[j].real() * ws.grad_spectrum[j].real() +
                                  d[j].imag() * ws.grad_spectrum[j].imag());
    }
  }
  k.backpropagate(k_half, grad_k_half, k_grad);
  for (double g : net_grad)
    if (!std::isfinite(g)) throw DivergenceError("non-finite network gradient in the blend objective");
  for (double g : k_grad)
    if (!std::isfinite(g)) throw DivergenceError("non-finite K gradient in the blend objective");
  return terms;
}

OptimalK optimal_k_closed_form(std::span<const double> noise_psd, std::span<const double> model_error_psd) {
  if (noise_psd.size() != model_error_psd.size()) throw InvalidInput("optimal K: PSD lengths differ");
  OptimalK out{std::vector<double>(noise_psd.size()), std::vector<bool>(noise_psd.size(), false)};
  for (std::size_t j = 0; j < noise_psd.size(); ++j) {
    const double sn = noise_psd[j], sz = model_error_psd[j];
    if (sn < 0.0 || sz < 0.0) throw InvalidInput("optimal K: PSDs must be non-negative");
    if (sn == 0.0 && sz == 0.0) {
      out.k[j] = 0.5;
      out.indifferent[j] = true;
    } else {
      out.k[j] = sz / (sz + sn);
    }
  }
  return out;
}

}  // namespace nlcoh
