// Gradient oracle: every layer kind and loss against central finite
// differences (eps 1e-5) on 7x4-scale tensors.

#include <doctest.h>

#include "elemvae/nn/losses.hpp"
#include "elemvae/nn/network.hpp"
#include "test_support.hpp"

using namespace elemvae::nn;
using testsup::max_grad_err;
using testsup::rel_err;

namespace {

constexpr double kTol = 1e-4;

// scalar probe: weighted sum of the network output, dL/dy = weights
struct Probe {
  NetworkSpec spec;
  ParameterStore params;
  Tensor input;
  Tensor dout;
  std::uint64_t rng_seed = 7;

  double loss() const {
    Rng rng(rng_seed);
    ForwardTrace t = forward(spec, params, input, Mode::train, &rng);
    double s = 0.0;
    for (long long i = 0; i < t.output().numel(); ++i) s += dout.data[i] * t.output().data[i];
    return s;
  }

  Gradients grads() const {
    Rng rng(rng_seed);
    ForwardTrace t = forward(spec, params, input, Mode::train, &rng);
    return backward(spec, params, t, dout);
  }
};

Probe make_probe(NetworkSpec spec, std::uint64_t seed) {
  Probe p;
  p.spec = std::move(spec);
  p.params = init_parameters(p.spec, seed);
  Rng rng(seed + 99);
  std::vector<int> in_shape{3};
  in_shape.insert(in_shape.end(), p.spec.input_shape.begin(), p.spec.input_shape.end());
  p.input = Tensor(in_shape);
  testsup::fill_uniform(p.input, rng);
  std::vector<int> out_shape{3};
  const std::vector<int> last = shape_of(p.spec).back();
  out_shape.insert(out_shape.end(), last.begin(), last.end());
  p.dout = Tensor(out_shape);
  testsup::fill_uniform(p.dout, rng);
  return p;
}

void check_probe(Probe& p) {
  Gradients g = p.grads();
  auto f = [&] { return p.loss(); };
  for (std::size_t li = 0; li < p.spec.layers.size(); ++li) {
    if (p.params.weights[li].numel() == 0) continue;
    CHECK(max_grad_err(f, p.params.weights[li].data, g.dweights[li].data) < kTol);
    CHECK(max_grad_err(f, p.params.biases[li].data, g.dbiases[li].data) < kTol);
  }
  CHECK(max_grad_err(f, p.input.data, g.dinput.data) < kTol);
}

}  // namespace

TEST_CASE("gradcheck: fully connected (relu, sigmoid, none)") {
  for (Activation act : {Activation::relu, Activation::sigmoid, Activation::none}) {
    NetworkSpec spec;
    spec.input_shape = {9};
    spec.layers = {LayerSpec::dense(6, act), LayerSpec::dense(4, Activation::sigmoid)};
    Probe p = make_probe(spec, 11 + static_cast<int>(act));
    check_probe(p);
  }
}

TEST_CASE("gradcheck: conv2d same, 5x2 kernel, stride 1") {
  NetworkSpec spec;
  spec.input_shape = {7, 4, 2};
  spec.layers = {LayerSpec::conv(3, 5, 2, 1, 1, Padding::same, Activation::relu)};
  Probe p = make_probe(spec, 21);
  check_probe(p);
}

TEST_CASE("gradcheck: conv2d same, 3x3 kernel, stride (2,1)") {
  NetworkSpec spec;
  spec.input_shape = {7, 4, 2};
  spec.layers = {LayerSpec::conv(4, 3, 3, 2, 1, Padding::same, Activation::sigmoid)};
  Probe p = make_probe(spec, 22);
  check_probe(p);
}

TEST_CASE("gradcheck: conv2d valid") {
  NetworkSpec spec;
  spec.input_shape = {6, 5, 2};
  spec.layers = {LayerSpec::conv(3, 3, 2, 2, 2, Padding::valid, Activation::none)};
  Probe p = make_probe(spec, 23);
  check_probe(p);
}

TEST_CASE("gradcheck: conv2d_transpose same, 5x2 kernel") {
  NetworkSpec spec;
  spec.input_shape = {7, 4, 3};
  spec.layers = {LayerSpec::conv_transpose(2, 5, 2, 1, 1, Padding::same, Activation::relu)};
  Probe p = make_probe(spec, 24);
  check_probe(p);
}

TEST_CASE("gradcheck: conv2d_transpose with stride 2") {
  NetworkSpec spec;
  spec.input_shape = {3, 2, 2};
  spec.layers = {LayerSpec::conv_transpose(2, 3, 2, 2, 2, Padding::same, Activation::none)};
  Probe p = make_probe(spec, 25);
  check_probe(p);
}

TEST_CASE("gradcheck: max_pool") {
  NetworkSpec spec;
  spec.input_shape = {4, 4, 3};
  spec.layers = {LayerSpec::pool(2, 2)};
  Probe p = make_probe(spec, 26);
  check_probe(p);
}

TEST_CASE("gradcheck: dropout (train mode, fixed mask)") {
  NetworkSpec spec;
  spec.input_shape = {12};
  spec.layers = {LayerSpec::dropout_layer(0.25)};
  Probe p = make_probe(spec, 27);
  check_probe(p);
}

TEST_CASE("gradcheck: flatten + reshape + full stack") {
  NetworkSpec spec;
  spec.input_shape = {4, 2, 2};
  spec.layers = {
      LayerSpec::conv(3, 3, 2, 1, 1, Padding::same, Activation::relu),
      LayerSpec::flatten(),
      LayerSpec::dense(8, Activation::relu),
      LayerSpec::reshape({4, 2, 1}),
      LayerSpec::conv_transpose(2, 3, 2, 1, 1, Padding::same, Activation::sigmoid),
  };
  Probe p = make_probe(spec, 28);
  check_probe(p);
}

TEST_CASE("gradcheck: bce loss") {
  Rng rng(31);
  Tensor pred({4, 6}), target({4, 6});
  for (double& v : pred.data) v = rng.uniform(0.1, 0.9);
  for (double& v : target.data) v = rng.uniform(0.0, 1.0);
  LossGrad lg = loss_bce(pred, target);
  auto f = [&] { return loss_bce(pred, target).value; };
  CHECK(max_grad_err(f, pred.data, lg.grad.data) < 1e-6);
}

TEST_CASE("bce closed forms") {
  Tensor p({1, 1}), t({1, 1});
  p.data = {0.5};
  t.data = {0.5};
  CHECK(loss_bce(p, t).value == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  p.data = {1.0 - 1e-9};
  t.data = {1.0};
  CHECK(loss_bce(p, t).value < 1e-6);
}

TEST_CASE("gradcheck: cce loss") {
  Rng rng(32);
  Tensor scores({5, 2}), target({5, 2});
  for (double& v : scores.data) v = rng.uniform(0.1, 0.9);
  for (int r = 0; r < 5; ++r) {
    int hot = static_cast<int>(rng.below(2));
    target.data[2 * r + hot] = 1.0;
  }
  LossGrad lg = loss_cce(scores, target);
  auto f = [&] { return loss_cce(scores, target).value; };
  CHECK(max_grad_err(f, scores.data, lg.grad.data) < 1e-6);
}

TEST_CASE("cce closed forms") {
  Tensor s({1, 2}), t({1, 2});
  s.data = {0.7, 0.7};
  t.data = {1.0, 0.0};
  CHECK(loss_cce(s, t).value == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  s.data = {1.0, 1e-12};
  CHECK(loss_cce(s, t).value < 1e-6);
}

TEST_CASE("gradcheck: kl divergence") {
  Rng rng(33);
  Tensor mu({4, 2}), logvar({4, 2});
  testsup::fill_uniform(mu, rng);
  testsup::fill_uniform(logvar, rng);
  KlGrad kg = kl_standard_normal(mu, logvar);
  auto f = [&] { return kl_standard_normal(mu, logvar).value; };
  CHECK(max_grad_err(f, mu.data, kg.dmu.data) < 1e-6);
  CHECK(max_grad_err(f, logvar.data, kg.dlogvar.data) < 1e-6);
}

TEST_CASE("kl closed forms and positivity") {
  Tensor mu({1, 2}), logvar({1, 2});
  CHECK(kl_standard_normal(mu, logvar).value == doctest::Approx(0.0));
  mu.data = {1.0, 0.0};
  CHECK(kl_standard_normal(mu, logvar).value == doctest::Approx(0.5).epsilon(1e-12));
  Rng rng(34);
  for (int trial = 0; trial < 50; ++trial) {
    testsup::fill_uniform(mu, rng, -2, 2);
    testsup::fill_uniform(logvar, rng, -2, 2);
    CHECK(kl_standard_normal(mu, logvar).value >= 0.0);
  }
}

TEST_CASE("reparameterize: determinism, limit and monte carlo mean") {
  Tensor mu({1, 2}), logvar({1, 2});
  mu.data = {0.3, -0.7};
  logvar.data = {-30.0, -30.0};
  Rng r1(5), r2(5);
  Tensor z1 = reparameterize(mu, logvar, r1, nullptr);
  Tensor z2 = reparameterize(mu, logvar, r2, nullptr);
  CHECK(z1.data == z2.data);
  CHECK(rel_err(z1.data[0], 0.3) < 1e-6);   // logvar -> -inf limit: z = mu
  CHECK(rel_err(z1.data[1], -0.7) < 1e-6);

  logvar.data = {0.0, 0.0};
  const int n = 100000;
  double sum = 0.0;
  Rng rng(6);
  for (int i = 0; i < n; ++i) sum += reparameterize(mu, logvar, rng, nullptr).data[0];
  double mean = sum / n;
  // sigma = 1, so the mean lies within 3 sigma/sqrt(n) of mu
  CHECK(std::fabs(mean - 0.3) < 3.0 / std::sqrt(static_cast<double>(n)));
}
