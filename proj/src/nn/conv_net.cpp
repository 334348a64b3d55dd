#include "nlcoh/nn/conv_net.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlcoh/error.hpp"
#include "nlcoh/simd/kernels.hpp"
#include "nlcoh/simulate/rng.hpp"

namespace nlcoh {

std::string_view activation_name(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::tanh: return "tanh";
    case Activation::relu: return "relu";
  }
  return "unknown";
}

Activation parse_activation(std::string_view name) {
  if (name == "identity") return Activation::identity;
  if (name == "tanh") return Activation::tanh;
  if (name == "relu") return Activation::relu;
  throw InvalidInput("unknown activation '" + std::string(name) + "'");
}

std::string_view padding_name(Padding p) { return p == Padding::same ? "same" : "causal"; }

Padding parse_padding(std::string_view name) {
  if (name == "same") return Padding::same;
  if (name == "causal") return Padding::causal;
  throw InvalidInput("unknown padding '" + std::string(name) + "'");
}

Conv1dNet::Conv1dNet(std::vector<LayerSpec> layers, Padding padding)
    : layers_(std::move(layers)), padding_(padding) {
  if (layers_.empty()) throw InvalidInput("a network needs at least one layer");
  std::size_t total = 0;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const LayerSpec& s = layers_[l];
    if (s.in_features == 0 || s.out_features == 0 || s.kernel_width == 0 || s.dilation == 0)
      throw InvalidInput("layer " + std::to_string(l) + " has a zero dimension");
    if (l == 0 ? s.in_features != 1 : s.in_features != layers_[l - 1].out_features)
      throw InvalidInput("layer " + std::to_string(l) + " input features do not chain");
    offsets_.push_back(total);
    total += s.parameter_count();
  }
  if (layers_.back().out_features != 1) throw InvalidInput("the last layer must have one output");
  params_.assign(total, 0.0);
}

std::size_t Conv1dNet::receptive_field() const {
  std::size_t rf = 1;
  for (const LayerSpec& l : layers_) rf += l.span();
  return rf;
}

std::size_t Conv1dNet::left_pad(const LayerSpec& l) const {
  return padding_ == Padding::same ? l.span() / 2 : l.span();
}

std::size_t Conv1dNet::edge_before() const {
  std::size_t e = 0;
  for (const LayerSpec& l : layers_) e += left_pad(l);
  return e;
}

std::size_t Conv1dNet::edge_after() const { return receptive_field() - 1 - edge_before(); }

std::size_t Conv1dNet::layer_of_parameter(std::size_t index) const {
  if (index >= params_.size()) throw InvalidInput("parameter index out of range");
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), index);
  return static_cast<std::size_t>(it - offsets_.begin()) - 1;
}

void Conv1dNet::initialize(std::uint64_t seed) {
  Rng rng(seed, Stream::weights);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const LayerSpec& s = layers_[l];
    const double bound = 1.0 / std::sqrt(static_cast<double>(s.in_features * s.kernel_width));
    const std::size_t begin = offsets_[l];
    for (std::size_t i = 0; i < s.parameter_count(); ++i) params_[begin + i] = rng.uniform(-bound, bound);
  }
}

void Conv1dNet::check_input_length(std::size_t n) const {
  if (n < receptive_field())
    throw InvalidInput("input of length " + std::to_string(n) + " is shorter than the receptive field " +
                       std::to_string(receptive_field()));
}

std::vector<double> Conv1dNet::forward(std::span<const double> input) const {
  ConvTape tape;
  auto out = forward(input, tape);
  return {out.begin(), out.end()};
}

std::span<const double> Conv1dNet::forward(std::span<const double> input, ConvTape& tape) const {
  const std::size_t n = input.size();
  check_input_length(n);
  const auto& k = simd::kernels();
  tape.length = n;
  tape.activations.resize(layers_.size() + 1);
  tape.activations[0].assign(input.begin(), input.end());

  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const LayerSpec& s = layers_[l];
    const std::size_t span = s.span();
    const std::size_t left = left_pad(s);
    const std::size_t padded_len = n + span;
    const std::vector<double>& a = tape.activations[l];
    tape.padded.assign(s.in_features * padded_len, 0.0);
    for (std::size_t c = 0; c < s.in_features; ++c)
      std::copy_n(a.data() + c * n, n, tape.padded.data() + c * padded_len + left);

    std::vector<double>& z = tape.activations[l + 1];
    z.resize(s.out_features * n);
    const double* w = params_.data() + offsets_[l];
    const double* bias = w + s.out_features * s.in_features * s.kernel_width;
    for (std::size_t o = 0; o < s.out_features; ++o) {
      double* out = z.data() + o * n;
      std::fill_n(out, n, bias[o]);
      for (std::size_t c = 0; c < s.in_features; ++c)
        k.fir_accumulate(out, tape.padded.data() + c * padded_len,
                         w + (o * s.in_features + c) * s.kernel_width, s.kernel_width, s.dilation, n);
    }
    switch (s.activation) {
      case Activation::identity: break;
      case Activation::tanh:
        k.tanh_inplace(z.data(), z.size());
        break;
      case Activation::relu:
        for (double& v : z) v = v > 0.0 ? v : 0.0;
        break;
    }
  }
  return tape.activations.back();
}

void Conv1dNet::backward(ConvTape& tape, std::span<const double> upstream, std::span<double> param_grad,
                         std::span<double> input_grad) const {
  const std::size_t n = tape.length;
  if (tape.activations.size() != layers_.size() + 1)
    throw InvalidInput("backward: tape does not come from this network");
  if (upstream.size() != n) throw InvalidInput("backward: upstream gradient has the wrong length");
  if (param_grad.size() != params_.size()) throw InvalidInput("backward: parameter gradient has the wrong size");
  if (!input_grad.empty() && input_grad.size() != n)
    throw InvalidInput("backward: input gradient has the wrong length");
  const auto& k = simd::kernels();
  std::fill(param_grad.begin(), param_grad.end(), 0.0);

  tape.grad_a.assign(upstream.begin(), upstream.end());
  std::vector<double> w_rev;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const LayerSpec& s = layers_[l];
    const std::size_t span = s.span();
    const std::size_t left = left_pad(s);
    const std::size_t padded_len = n + span;
    const std::vector<double>& a_out = tape.activations[l + 1];

    // dL/dz from dL/da through the activation.
    std::vector<double>& gz = tape.grad_z;
    gz.resize(s.out_features * n);
    switch (s.activation) {
      case Activation::identity:
        std::copy(tape.grad_a.begin(), tape.grad_a.end(), gz.begin());
        break;
      case Activation::tanh:
        for (std::size_t i = 0; i < gz.size(); ++i) gz[i] = tape.grad_a[i] * (1.0 - a_out[i] * a_out[i]);
        break;
      case Activation::relu:
        for (std::size_t i = 0; i < gz.size(); ++i) gz[i] = a_out[i] > 0.0 ? tape.grad_a[i] : 0.0;
        break;
    }

    const double* w = params_.data() + offsets_[l];
    double* gw = param_grad.data() + offsets_[l];
    double* gb = gw + s.out_features * s.in_features * s.kernel_width;

    // Weight and bias gradients against the zero-padded layer input.
    const std::vector<double>& a_in = tape.activations[l];
    tape.padded.assign(s.in_features * padded_len, 0.0);
    for (std::size_t c = 0; c < s.in_features; ++c)
      std::copy_n(a_in.data() + c * n, n, tape.padded.data() + c * padded_len + left);
    for (std::size_t o = 0; o < s.out_features; ++o) {
      const double* g = gz.data() + o * n;
      double sum = 0.0;
      for (std::size_t t = 0; t < n; ++t) sum += g[t];
      gb[o] = sum;
      for (std::size_t c = 0; c < s.in_features; ++c)
        k.fir_weight_grad(gw + (o * s.in_features + c) * s.kernel_width, g,
                          tape.padded.data() + c * padded_len, s.kernel_width, s.dilation, n);
    }

    if (l == 0 && input_grad.empty()) break;

    // Input gradient: correlate the padded dL/dz with the reversed kernels.
    const std::size_t right = span - left;
    std::vector<double> gpad(s.out_features * padded_len, 0.0);
    for (std::size_t o = 0; o < s.out_features; ++o)
      std::copy_n(gz.data() + o * n, n, gpad.data() + o * padded_len + right);
    tape.grad_a.assign(s.in_features * n, 0.0);
    w_rev.resize(s.kernel_width);
    for (std::size_t c = 0; c < s.in_features; ++c) {
      double* ga = tape.grad_a.data() + c * n;
      for (std::size_t o = 0; o < s.out_features; ++o) {
        const double* wk = w + (o * s.in_features + c) * s.kernel_width;
        for (std::size_t j = 0; j < s.kernel_width; ++j) w_rev[j] = wk[s.kernel_width - 1 - j];
        k.fir_accumulate(ga, gpad.data() + o * padded_len, w_rev.data(), s.kernel_width, s.dilation, n);
      }
    }
  }
  if (!input_grad.empty()) std::copy(tape.grad_a.begin(), tape.grad_a.end(), input_grad.begin());
}

Conv1dNet default_reverse_net() {
  std::vector<LayerSpec> layers;
  const std::size_t features = 5, width = 7, depth = 5;
  for (std::size_t l = 0; l < depth; ++l) {
    const bool last = l + 1 == depth;
    layers.push_back({l == 0 ? 1 : features, last ? 1 : features, width, 1,
                      last ? Activation::identity : Activation::tanh});
  }
  return Conv1dNet(std::move(layers), Padding::same);
}

Conv1dNet forward_benchmark_net(std::size_t kernel_width, std::size_t depth, std::size_t features) {
  if (depth < 2) throw InvalidInput("forward benchmark needs at least two layers");
  std::vector<LayerSpec> layers;
  for (std::size_t l = 0; l < depth; ++l) {
    const bool last = l + 1 == depth;
    layers.push_back({l == 0 ? 1 : features, last ? 1 : features, kernel_width, std::size_t{1} << l,
                      last ? Activation::identity : Activation::tanh});
  }
  return Conv1dNet(std::move(layers), Padding::causal);
}

}  // namespace nlcoh
