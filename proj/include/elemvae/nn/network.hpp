#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "elemvae/nn/rng.hpp"
#include "elemvae/nn/tensor.hpp"

namespace elemvae::nn {

enum class LayerKind {
  fully_connected,
  conv2d,
  conv2d_transpose,
  max_pool,
  dropout,
  flatten,
  reshape,
};

enum class Activation { none, relu, sigmoid };
enum class Padding { same, valid };

struct LayerSpec {
  LayerKind kind = LayerKind::fully_connected;
  Activation activation = Activation::none;
  int units = 0;                  // fully_connected
  int filters = 0;                // conv2d / conv2d_transpose
  int kernel_h = 0, kernel_w = 0;
  int stride_h = 1, stride_w = 1;
  Padding padding = Padding::same;
  int pool_h = 0, pool_w = 0;     // max_pool
  double rate = 0.0;              // dropout
  std::vector<int> target_shape;  // reshape

  static LayerSpec dense(int units, Activation act = Activation::none);
  static LayerSpec conv(int filters, int kh, int kw, int sh, int sw, Padding pad, Activation act);
  static LayerSpec conv_transpose(int filters, int kh, int kw, int sh, int sw, Padding pad,
                                  Activation act);
  static LayerSpec pool(int kh, int kw);
  static LayerSpec dropout_layer(double rate);
  static LayerSpec flatten();
  static LayerSpec reshape(std::vector<int> shape);
};

struct NetworkSpec {
  std::vector<int> input_shape;  // per sample, e.g. {7,4,1} or {28}
  std::vector<LayerSpec> layers;
};

/// Per-layer output shapes (per sample). Throws on inconsistent specs or
/// non-positive derived dimensions.
std::vector<std::vector<int>> shape_of(const NetworkSpec& spec);

struct ParameterStore {
  std::vector<Tensor> weights;  // empty tensors for parameterless layers
  std::vector<Tensor> biases;

  long long count() const;
  bool all_finite() const;
};

/// Glorot-uniform weights (limit sqrt(6/(fan_in+fan_out))), zero biases.
/// Same seed, same store.
ParameterStore init_parameters(const NetworkSpec& spec, std::uint64_t seed);

enum class Mode { train, eval };

/// Everything the backward pass needs from a forward pass.
struct ForwardTrace {
  Tensor input;
  std::vector<Tensor> out;  // post-activation output per layer
  std::vector<std::vector<double>> dropout_scale;
  std::vector<std::vector<int>> pool_argmax;

  const Tensor& output() const { return out.back(); }
};

/// Batched forward pass. `rng` is consumed only by dropout in train mode.
ForwardTrace forward(const NetworkSpec& spec, const ParameterStore& params, const Tensor& input,
                     Mode mode, Rng* rng = nullptr);

struct Gradients {
  std::vector<Tensor> dweights;
  std::vector<Tensor> dbiases;
  Tensor dinput;
};

/// Reverse-mode pass; `dout` is the loss gradient w.r.t. the final
/// (post-activation) output of the trace. Pass `want_input_grad = false`
/// when the gradient w.r.t. the network input is not needed; `dinput` is
/// then left empty and the first layer's input gradient is never computed.
Gradients backward(const NetworkSpec& spec, const ParameterStore& params,
                   const ForwardTrace& trace, const Tensor& dout, bool want_input_grad = true);

const char* to_string(LayerKind k);
const char* to_string(Activation a);

}  // namespace elemvae::nn
