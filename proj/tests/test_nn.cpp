#include <doctest.h>

#include <cmath>
#include <set>

#include "elemvae/nn/losses.hpp"
#include "elemvae/nn/network.hpp"
#include "elemvae/nn/optimizer.hpp"
#include "elemvae/nn/train.hpp"
#include "test_support.hpp"

using namespace elemvae::nn;

TEST_CASE("shape algebra matches the model architectures") {
  NetworkSpec conv_enc;
  conv_enc.input_shape = {7, 4, 1};
  conv_enc.layers = {
      LayerSpec::conv(256, 5, 2, 1, 1, Padding::same, Activation::relu),
      LayerSpec::conv(32, 5, 2, 1, 1, Padding::same, Activation::relu),
      LayerSpec::flatten(),
      LayerSpec::dense(896, Activation::relu),
  };
  auto shapes = shape_of(conv_enc);
  CHECK(shapes[0] == std::vector<int>{7, 4, 256});
  CHECK(shapes[1] == std::vector<int>{7, 4, 32});
  CHECK(shapes[2] == std::vector<int>{896});
  CHECK(shapes[3] == std::vector<int>{896});

  NetworkSpec strided;
  strided.input_shape = {7, 4, 1};
  strided.layers = {LayerSpec::conv(1, 3, 3, 2, 1, Padding::same, Activation::none)};
  CHECK(shape_of(strided)[0] == std::vector<int>{4, 4, 1});

  NetworkSpec bad;
  bad.input_shape = {7};
  bad.layers = {LayerSpec::conv(1, 3, 3, 1, 1, Padding::same, Activation::none)};
  CHECK_THROWS(shape_of(bad));

  NetworkSpec bad_reshape;
  bad_reshape.input_shape = {8};
  bad_reshape.layers = {LayerSpec::reshape({3, 3})};
  CHECK_THROWS(shape_of(bad_reshape));
}

TEST_CASE("init_parameters: deterministic, zero biases, documented shapes") {
  NetworkSpec spec;
  spec.input_shape = {2};
  spec.layers = {LayerSpec::dense(32, Activation::relu), LayerSpec::dense(2)};
  ParameterStore a = init_parameters(spec, 42);
  ParameterStore b = init_parameters(spec, 42);
  ParameterStore c = init_parameters(spec, 43);
  CHECK(a.weights[0].shape == std::vector<int>{2, 32});
  CHECK(a.weights[0].data == b.weights[0].data);
  CHECK(a.weights[0].data != c.weights[0].data);
  for (double v : a.biases[0].data) CHECK(v == 0.0);
  // glorot bound
  double limit = std::sqrt(6.0 / (2 + 32));
  for (double v : a.weights[0].data) CHECK(std::fabs(v) <= limit);
}

TEST_CASE("optimizers on the 1-D quadratic f(w) = w^2") {
  auto run = [](const OptimizerSpec& spec, int steps) {
    Optimizer opt(spec);
    Tensor w({1});
    w.data = {1.0};
    Tensor g({1});
    for (int s = 0; s < steps; ++s) {
      g.data[0] = 2.0 * w.data[0];
      opt.step({&w}, {&g});
    }
    return w.data[0];
  };
  CHECK(std::fabs(run(OptimizerSpec::adam(0.01), 500)) < 0.01);
  CHECK(std::fabs(run(OptimizerSpec::rmsprop(0.005), 500)) < 0.05);
  // adadelta carries no tuned learning rate yet converges on its own
  CHECK(std::fabs(run(OptimizerSpec::adadelta(), 500)) < 0.01);
  // the stock rates still descend, just more slowly
  CHECK(std::fabs(run(OptimizerSpec::adam(), 1500)) < 0.1);

  Optimizer opt{OptimizerSpec::adam()};
  Tensor w({3}), g({3});
  w.data = {1.0, -2.0, 3.0};
  Tensor before = w;
  opt.step({&w}, {&g});  // zero gradient
  CHECK(w.data == before.data);
}

TEST_CASE("optimizer spec validation") {
  OptimizerSpec bad = OptimizerSpec::adam();
  bad.learning_rate = 0.0;
  CHECK_THROWS(Optimizer{bad});
  bad = OptimizerSpec::adam();
  bad.decay2 = 1.0;
  CHECK_THROWS(Optimizer{bad});
}

TEST_CASE("split_dataset: entity and row granularity") {
  std::vector<int> labels;
  for (int dup = 0; dup < 3; ++dup)
    for (int z = 1; z <= 118; ++z) labels.push_back(z);

  Split s = split_dataset(labels, 0.67, 9, SplitGranularity::entity);
  std::set<int> train_labels, test_labels;
  for (int r : s.train_rows) train_labels.insert(labels[r]);
  for (int r : s.test_rows) test_labels.insert(labels[r]);
  CHECK(train_labels.size() == 79);  // round(0.67 * 118)
  for (int l : train_labels) CHECK_FALSE(test_labels.count(l));
  CHECK(s.train_rows.size() + s.test_rows.size() == labels.size());

  Split again = split_dataset(labels, 0.67, 9, SplitGranularity::entity);
  CHECK(again.train_rows == s.train_rows);

  Split rows = split_dataset(labels, 0.5, 1, SplitGranularity::row);
  CHECK(rows.train_rows.size() == 177);
}

TEST_CASE("dropout: eval identity, train expectation via inverted scaling") {
  NetworkSpec spec;
  spec.input_shape = {8};
  spec.layers = {LayerSpec::dropout_layer(0.25)};
  ParameterStore params = init_parameters(spec, 1);
  Tensor x({1, 8});
  for (int i = 0; i < 8; ++i) x.data[i] = i + 1.0;

  ForwardTrace eval_trace = forward(spec, params, x, Mode::eval);
  CHECK(eval_trace.output().data == x.data);

  Rng rng(77);
  std::vector<double> mean(8, 0.0);
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    ForwardTrace tr = forward(spec, params, x, Mode::train, &rng);
    for (int i = 0; i < 8; ++i) mean[i] += tr.output().data[i];
  }
  for (int i = 0; i < 8; ++i) CHECK(mean[i] / trials == doctest::Approx(x.data[i]).epsilon(0.02));
}

TEST_CASE("train_supervised: identity task improves, determinism, zero epochs") {
  NetworkSpec spec;
  spec.input_shape = {7};
  spec.layers = {LayerSpec::dense(16, Activation::relu), LayerSpec::dense(7, Activation::sigmoid)};

  Rng rng(5);
  Tensor x({10, 7});
  for (double& v : x.data) v = rng.uniform(0.05, 0.95);
  std::vector<int> labels(10);
  for (int i = 0; i < 10; ++i) labels[i] = i;
  Split split = split_dataset(labels, 0.7, 3, SplitGranularity::row);

  TrainConfig config;
  config.epochs = 0;
  config.seed = 4;
  ParameterStore params = init_parameters(spec, 2);
  ParameterStore before = params;
  History h0 = train_supervised(spec, params, x, x, split, SupervisedLoss::bce,
                                OptimizerSpec::adam(), config);
  CHECK(h0.empty());
  CHECK(params.weights[0].data == before.weights[0].data);

  config.epochs = 5;
  config.batch_size = 4;
  History h1 = train_supervised(spec, params, x, x, split, SupervisedLoss::bce,
                                OptimizerSpec::adam(), config);
  for (std::size_t e = 1; e < h1.size(); ++e) CHECK(h1[e].train_loss < h1[e - 1].train_loss);

  ParameterStore p2 = init_parameters(spec, 2);
  History h2 = train_supervised(spec, p2, x, x, split, SupervisedLoss::bce, OptimizerSpec::adam(),
                                config);
  CHECK(h2.size() == h1.size());
  for (std::size_t e = 0; e < h1.size(); ++e) {
    CHECK(h1[e].train_loss == h2[e].train_loss);  // bit-identical history
    CHECK(h1[e].test_loss == h2[e].test_loss);
  }
}
