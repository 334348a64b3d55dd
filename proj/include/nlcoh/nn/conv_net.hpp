#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace nlcoh {

enum class Activation { identity, tanh, relu };
// same: centred receptive field; causal: output t sees inputs <= t.
// Both zero-pad so the output has the input's length.
enum class Padding { same, causal };

std::string_view activation_name(Activation a);
Activation parse_activation(std::string_view name);
std::string_view padding_name(Padding p);
Padding parse_padding(std::string_view name);

struct LayerSpec {
  std::size_t in_features = 1;
  std::size_t out_features = 1;
  std::size_t kernel_width = 1;
  std::size_t dilation = 1;
  Activation activation = Activation::identity;

  std::size_t parameter_count() const { return out_features * in_features * kernel_width + out_features; }
  std::size_t span() const { return (kernel_width - 1) * dilation; }
  bool operator==(const LayerSpec&) const = default;
};

// Per-layer activations recorded by a forward pass for the backward pass.
struct ConvTape {
  std::size_t length = 0;
  std::vector<std::vector<double>> activations;  // [layer] -> channels * length, layer 0 is the input
  std::vector<double> padded;
  std::vector<double> grad_a;
  std::vector<double> grad_z;
};

// Stack of 1D convolutions over a single frame. Parameters live in one flat
// buffer: for each layer the weights [out][in][tap] followed by the biases.
class Conv1dNet {
 public:
  Conv1dNet() = default;
  Conv1dNet(std::vector<LayerSpec> layers, Padding padding);

  const std::vector<LayerSpec>& layers() const { return layers_; }
  Padding padding() const { return padding_; }
  std::size_t parameter_count() const { return params_.size(); }
  std::size_t receptive_field() const;
  // Samples at the start / end of a frame whose outputs see zero padding.
  std::size_t edge_before() const;
  std::size_t edge_after() const;

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }
  std::size_t layer_offset(std::size_t layer) const { return offsets_.at(layer); }
  std::size_t layer_of_parameter(std::size_t index) const;

  // Uniform in +-1/sqrt(in_features * kernel_width) for weights and biases.
  void initialize(std::uint64_t seed);

  std::vector<double> forward(std::span<const double> input) const;
  // Records activations in `tape`; returns a view of the output channel.
  std::span<const double> forward(std::span<const double> input, ConvTape& tape) const;

  // Reverse-mode pass for the frame recorded in `tape`. Writes dL/dparams into
  // `param_grad` (overwritten) and, when non-empty, dL/dinput into `input_grad`.
  void backward(ConvTape& tape, std::span<const double> upstream, std::span<double> param_grad,
                std::span<double> input_grad = {}) const;

  bool operator==(const Conv1dNet&) const = default;

 private:
  std::size_t left_pad(const LayerSpec& l) const;
  void check_input_length(std::size_t n) const;

  std::vector<LayerSpec> layers_;
  Padding padding_ = Padding::same;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

// 5 layers of width 7 with 5 hidden features, tanh hidden activations, identity
// output, dilation 1, same padding: 1->5->5->5->5->1.
Conv1dNet default_reverse_net();

// Dilated causal stack (dilations 1, 2, 4, ...) used as the forward benchmark:
// 1 -> features -> ... -> 1 over `layers` layers.
Conv1dNet forward_benchmark_net(std::size_t kernel_width, std::size_t layers, std::size_t features);

}  // namespace nlcoh
