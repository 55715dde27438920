#include "elemvae/nn/network.hpp"

#include <cmath>
#include <stdexcept>

#include "elemvae/nn/kernels.hpp"

namespace elemvae::nn {

using kernels::ConvGeom;
using kernels::PoolGeom;

LayerSpec LayerSpec::dense(int units, Activation act) {
  LayerSpec s;
  s.kind = LayerKind::fully_connected;
  s.units = units;
  s.activation = act;
  return s;
}

LayerSpec LayerSpec::conv(int filters, int kh, int kw, int sh, int sw, Padding pad,
                          Activation act) {
  LayerSpec s;
  s.kind = LayerKind::conv2d;
  s.filters = filters;
  s.kernel_h = kh;
  s.kernel_w = kw;
  s.stride_h = sh;
  s.stride_w = sw;
  s.padding = pad;
  s.activation = act;
  return s;
}

LayerSpec LayerSpec::conv_transpose(int filters, int kh, int kw, int sh, int sw, Padding pad,
                                    Activation act) {
  LayerSpec s = conv(filters, kh, kw, sh, sw, pad, act);
  s.kind = LayerKind::conv2d_transpose;
  return s;
}

LayerSpec LayerSpec::pool(int kh, int kw) {
  LayerSpec s;
  s.kind = LayerKind::max_pool;
  s.pool_h = kh;
  s.pool_w = kw;
  return s;
}

LayerSpec LayerSpec::dropout_layer(double rate) {
  if (rate < 0.0 || rate >= 1.0) throw std::invalid_argument("dropout rate must be in [0,1)");
  LayerSpec s;
  s.kind = LayerKind::dropout;
  s.rate = rate;
  return s;
}

LayerSpec LayerSpec::flatten() {
  LayerSpec s;
  s.kind = LayerKind::flatten;
  return s;
}

LayerSpec LayerSpec::reshape(std::vector<int> shape) {
  LayerSpec s;
  s.kind = LayerKind::reshape;
  s.target_shape = std::move(shape);
  return s;
}

namespace {

long long product(const std::vector<int>& s) {
  long long n = 1;
  for (int d : s) n *= d;
  return n;
}

ConvGeom geom_for(const LayerSpec& l, const std::vector<int>& in) {
  if (in.size() != 3) throw std::invalid_argument("conv layer needs a HxWxC input");
  if (l.kind == LayerKind::conv2d) {
    return l.padding == Padding::same
               ? ConvGeom::conv_same(in[0], in[1], in[2], l.filters, l.kernel_h, l.kernel_w,
                                     l.stride_h, l.stride_w)
               : ConvGeom::conv_valid(in[0], in[1], in[2], l.filters, l.kernel_h, l.kernel_w,
                                      l.stride_h, l.stride_w);
  }
  if (l.padding != Padding::same)
    throw std::invalid_argument("conv2d_transpose supports only 'same' padding");
  return ConvGeom::convt_same(in[0], in[1], in[2], l.filters, l.kernel_h, l.kernel_w, l.stride_h,
                              l.stride_w);
}

std::vector<int> layer_output_shape(const LayerSpec& l, const std::vector<int>& in) {
  switch (l.kind) {
    case LayerKind::fully_connected:
      if (in.size() != 1) throw std::invalid_argument("fully_connected needs a flat input");
      if (l.units <= 0) throw std::invalid_argument("fully_connected needs units > 0");
      return {l.units};
    case LayerKind::conv2d:
    case LayerKind::conv2d_transpose: {
      ConvGeom g = geom_for(l, in);
      if (g.out_h <= 0 || g.out_w <= 0 || g.out_c <= 0)
        throw std::invalid_argument("conv produces a non-positive dimension");
      return {g.out_h, g.out_w, g.out_c};
    }
    case LayerKind::max_pool: {
      if (in.size() != 3) throw std::invalid_argument("max_pool needs a HxWxC input");
      PoolGeom g = PoolGeom::valid(in[0], in[1], in[2], l.pool_h, l.pool_w);
      if (g.out_h <= 0 || g.out_w <= 0)
        throw std::invalid_argument("max_pool produces a non-positive dimension");
      return {g.out_h, g.out_w, g.c};
    }
    case LayerKind::dropout:
      return in;
    case LayerKind::flatten:
      return {static_cast<int>(product(in))};
    case LayerKind::reshape:
      if (product(l.target_shape) != product(in))
        throw std::invalid_argument("reshape does not preserve element count");
      return l.target_shape;
  }
  throw std::logic_error("unknown layer kind");
}

void apply_activation(Tensor& t, Activation a) {
  switch (a) {
    case Activation::none:
      return;
    case Activation::relu:
      for (double& v : t.data) v = v > 0.0 ? v : 0.0;
      return;
    case Activation::sigmoid:
      for (double& v : t.data) v = 1.0 / (1.0 + std::exp(-v));
      return;
  }
}

// gradient through the activation, using the post-activation values
void activation_backward(const Tensor& post, Activation a, Tensor& d) {
  switch (a) {
    case Activation::none:
      return;
    case Activation::relu:
      for (long long i = 0; i < d.numel(); ++i)
        if (post.data[i] <= 0.0) d.data[i] = 0.0;
      return;
    case Activation::sigmoid:
      for (long long i = 0; i < d.numel(); ++i) d.data[i] *= post.data[i] * (1.0 - post.data[i]);
      return;
  }
}

std::vector<int> batched(int n, const std::vector<int>& per_sample) {
  std::vector<int> s{n};
  s.insert(s.end(), per_sample.begin(), per_sample.end());
  return s;
}

}  // namespace

std::vector<std::vector<int>> shape_of(const NetworkSpec& spec) {
  std::vector<std::vector<int>> shapes;
  std::vector<int> cur = spec.input_shape;
  for (int d : cur)
    if (d <= 0) throw std::invalid_argument("input shape has a non-positive dimension");
  for (const LayerSpec& l : spec.layers) {
    cur = layer_output_shape(l, cur);
    shapes.push_back(cur);
  }
  return shapes;
}

long long ParameterStore::count() const {
  long long n = 0;
  for (const Tensor& t : weights) n += t.numel();
  for (const Tensor& t : biases) n += t.numel();
  return n;
}

bool ParameterStore::all_finite() const {
  for (const Tensor& t : weights)
    if (!t.all_finite()) return false;
  for (const Tensor& t : biases)
    if (!t.all_finite()) return false;
  return true;
}

ParameterStore init_parameters(const NetworkSpec& spec, std::uint64_t seed) {
  ParameterStore store;
  Rng rng(seed);
  std::vector<int> cur = spec.input_shape;
  for (const LayerSpec& l : spec.layers) {
    Tensor w, b;
    if (l.kind == LayerKind::fully_connected) {
      int fan_in = cur[0], fan_out = l.units;
      double a = std::sqrt(6.0 / (fan_in + fan_out));
      w = Tensor({fan_in, fan_out});
      for (double& v : w.data) v = rng.uniform(-a, a);
      b = Tensor({fan_out});
    } else if (l.kind == LayerKind::conv2d || l.kind == LayerKind::conv2d_transpose) {
      int cin = cur[2];
      double fan_in = static_cast<double>(l.kernel_h) * l.kernel_w * cin;
      double fan_out = static_cast<double>(l.kernel_h) * l.kernel_w * l.filters;
      double a = std::sqrt(6.0 / (fan_in + fan_out));
      w = Tensor({l.kernel_h, l.kernel_w, cin, l.filters});
      for (double& v : w.data) v = rng.uniform(-a, a);
      b = Tensor({l.filters});
    }
    store.weights.push_back(std::move(w));
    store.biases.push_back(std::move(b));
    cur = layer_output_shape(l, cur);
  }
  return store;
}

ForwardTrace forward(const NetworkSpec& spec, const ParameterStore& params, const Tensor& input,
                     Mode mode, Rng* rng) {
  if (spec.layers.size() != params.weights.size())
    throw std::invalid_argument("parameter store does not match network spec");
  if (input.shape.empty() || std::vector<int>(input.shape.begin() + 1, input.shape.end()) !=
                                 spec.input_shape)
    throw std::invalid_argument("input shape " + shape_to_string(input.shape) +
                                " does not match spec input " +
                                shape_to_string(spec.input_shape));
  int n = input.shape[0];

  ForwardTrace trace;
  trace.input = input;
  trace.dropout_scale.resize(spec.layers.size());
  trace.pool_argmax.resize(spec.layers.size());

  std::vector<int> cur = spec.input_shape;
  const Tensor* x = &trace.input;
  for (std::size_t li = 0; li < spec.layers.size(); ++li) {
    const LayerSpec& l = spec.layers[li];
    std::vector<int> out_shape = layer_output_shape(l, cur);
    Tensor y(batched(n, out_shape));
    switch (l.kind) {
      case LayerKind::fully_connected:
        kernels::dense_forward(n, cur[0], l.units, x->ptr(), params.weights[li].ptr(),
                               params.biases[li].ptr(), y.ptr());
        apply_activation(y, l.activation);
        break;
      case LayerKind::conv2d: {
        ConvGeom g = geom_for(l, cur);
        kernels::conv2d_forward(g, n, x->ptr(), params.weights[li].ptr(),
                                params.biases[li].ptr(), y.ptr());
        apply_activation(y, l.activation);
        break;
      }
      case LayerKind::conv2d_transpose: {
        ConvGeom g = geom_for(l, cur);
        kernels::convt_forward(g, n, x->ptr(), params.weights[li].ptr(), params.biases[li].ptr(),
                               y.ptr());
        apply_activation(y, l.activation);
        break;
      }
      case LayerKind::max_pool: {
        PoolGeom g = PoolGeom::valid(cur[0], cur[1], cur[2], l.pool_h, l.pool_w);
        trace.pool_argmax[li].resize(y.numel());
        kernels::maxpool_forward(g, n, x->ptr(), y.ptr(), trace.pool_argmax[li].data());
        break;
      }
      case LayerKind::dropout: {
        if (mode == Mode::train && l.rate > 0.0) {
          if (!rng) throw std::invalid_argument("dropout in train mode needs an rng");
          std::vector<double>& scale = trace.dropout_scale[li];
          scale.resize(x->numel());
          double keep_scale = 1.0 / (1.0 - l.rate);
          for (long long i = 0; i < x->numel(); ++i)
            scale[i] = rng->uniform() < l.rate ? 0.0 : keep_scale;
          for (long long i = 0; i < x->numel(); ++i) y.data[i] = x->data[i] * scale[i];
        } else {
          y.data = x->data;
        }
        break;
      }
      case LayerKind::flatten:
      case LayerKind::reshape:
        y.data = x->data;
        break;
    }
    trace.out.push_back(std::move(y));
    x = &trace.out.back();
    cur = out_shape;
  }
  return trace;
}

Gradients backward(const NetworkSpec& spec, const ParameterStore& params,
                   const ForwardTrace& trace, const Tensor& dout, bool want_input_grad) {
  std::size_t nl = spec.layers.size();
  if (trace.out.size() != nl) throw std::invalid_argument("trace does not match network spec");
  int n = trace.input.shape[0];

  Gradients grads;
  grads.dweights.resize(nl);
  grads.dbiases.resize(nl);

  // per-sample input shapes of each layer
  std::vector<std::vector<int>> in_shapes(nl);
  std::vector<int> cur = spec.input_shape;
  for (std::size_t li = 0; li < nl; ++li) {
    in_shapes[li] = cur;
    cur = layer_output_shape(spec.layers[li], cur);
  }

  Tensor d = dout;
  for (std::size_t ri = nl; ri-- > 0;) {
    const LayerSpec& l = spec.layers[ri];
    const Tensor& x = ri == 0 ? trace.input : trace.out[ri - 1];
    const std::vector<int>& ishape = in_shapes[ri];
    activation_backward(trace.out[ri], l.activation, d);
    bool skip_dx = ri == 0 && !want_input_grad;
    Tensor dx;
    if (!skip_dx) dx = Tensor(batched(n, ishape));
    switch (l.kind) {
      case LayerKind::fully_connected: {
        grads.dweights[ri] = Tensor(params.weights[ri].shape);
        grads.dbiases[ri] = Tensor(params.biases[ri].shape);
        kernels::dense_dparams(n, ishape[0], l.units, x.ptr(), d.ptr(),
                               grads.dweights[ri].ptr(), grads.dbiases[ri].ptr());
        if (!skip_dx)
          kernels::dense_dinput(n, ishape[0], l.units, d.ptr(), params.weights[ri].ptr(),
                                dx.ptr());
        break;
      }
      case LayerKind::conv2d: {
        ConvGeom g = geom_for(l, ishape);
        grads.dweights[ri] = Tensor(params.weights[ri].shape);
        grads.dbiases[ri] = Tensor(params.biases[ri].shape);
        kernels::conv2d_dparams(g, n, x.ptr(), d.ptr(), grads.dweights[ri].ptr(),
                                grads.dbiases[ri].ptr());
        if (!skip_dx) kernels::conv2d_dinput(g, n, d.ptr(), params.weights[ri].ptr(), dx.ptr());
        break;
      }
      case LayerKind::conv2d_transpose: {
        ConvGeom g = geom_for(l, ishape);
        grads.dweights[ri] = Tensor(params.weights[ri].shape);
        grads.dbiases[ri] = Tensor(params.biases[ri].shape);
        kernels::convt_dparams(g, n, x.ptr(), d.ptr(), grads.dweights[ri].ptr(),
                               grads.dbiases[ri].ptr());
        if (!skip_dx) kernels::convt_dinput(g, n, d.ptr(), params.weights[ri].ptr(), dx.ptr());
        break;
      }
      case LayerKind::max_pool: {
        if (skip_dx) break;
        PoolGeom g = PoolGeom::valid(ishape[0], ishape[1], ishape[2], l.pool_h, l.pool_w);
        kernels::maxpool_dinput(g, n, d.ptr(), trace.pool_argmax[ri].data(), dx.ptr());
        break;
      }
      case LayerKind::dropout: {
        if (skip_dx) break;
        const std::vector<double>& scale = trace.dropout_scale[ri];
        if (scale.empty()) {
          dx.data = d.data;
        } else {
          for (long long i = 0; i < dx.numel(); ++i) dx.data[i] = d.data[i] * scale[i];
        }
        break;
      }
      case LayerKind::flatten:
      case LayerKind::reshape:
        if (!skip_dx) dx.data = d.data;
        break;
    }
    d = std::move(dx);
  }
  grads.dinput = std::move(d);
  return grads;
}

const char* to_string(LayerKind k) {
  switch (k) {
    case LayerKind::fully_connected: return "fully_connected";
    case LayerKind::conv2d: return "conv2d";
    case LayerKind::conv2d_transpose: return "conv2d_transpose";
    case LayerKind::max_pool: return "max_pool";
    case LayerKind::dropout: return "dropout";
    case LayerKind::flatten: return "flatten";
    case LayerKind::reshape: return "reshape";
  }
  return "?";
}

const char* to_string(Activation a) {
  switch (a) {
    case Activation::none: return "none";
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
  }
  return "?";
}

}  // namespace elemvae::nn
