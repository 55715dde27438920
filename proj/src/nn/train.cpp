#include "elemvae/nn/train.hpp"

#include <algorithm>
#include <cmath>

#include "elemvae/nn/losses.hpp"

namespace elemvae::nn {

Split split_dataset(const std::vector<int>& row_labels, double fraction, std::uint64_t seed,
                    SplitGranularity granularity) {
  if (fraction <= 0.0 || fraction >= 1.0)
    throw std::invalid_argument("split: fraction must be in (0,1)");
  int n = static_cast<int>(row_labels.size());
  Rng rng(seed);
  Split split;
  if (granularity == SplitGranularity::row) {
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    rng.shuffle(idx);
    int n_train = static_cast<int>(std::lround(fraction * n));
    n_train = std::clamp(n_train, 1, n - 1);
    split.train_rows.assign(idx.begin(), idx.begin() + n_train);
    split.test_rows.assign(idx.begin() + n_train, idx.end());
  } else {
    std::vector<int> labels;  // unique, in first-appearance order
    for (int l : row_labels)
      if (std::find(labels.begin(), labels.end(), l) == labels.end()) labels.push_back(l);
    rng.shuffle(labels);
    int n_train = static_cast<int>(std::lround(fraction * labels.size()));
    n_train = std::clamp(n_train, 1, static_cast<int>(labels.size()) - 1);
    std::vector<int> train_labels(labels.begin(), labels.begin() + n_train);
    for (int i = 0; i < n; ++i) {
      bool in_train = std::find(train_labels.begin(), train_labels.end(), row_labels[i]) !=
                      train_labels.end();
      (in_train ? split.train_rows : split.test_rows).push_back(i);
    }
  }
  return split;
}

Tensor gather_rows(const Tensor& t, const std::vector<int>& rows) {
  long long stride = t.numel() / t.shape[0];
  std::vector<int> shape = t.shape;
  shape[0] = static_cast<int>(rows.size());
  Tensor out(shape);
  for (std::size_t i = 0; i < rows.size(); ++i)
    std::copy_n(t.ptr() + rows[i] * stride, stride, out.ptr() + i * stride);
  return out;
}

namespace {
LossGrad eval_loss(SupervisedLoss loss, const Tensor& pred, const Tensor& target) {
  return loss == SupervisedLoss::bce ? loss_bce(pred, target) : loss_cce(pred, target);
}
}  // namespace

History train_supervised(const NetworkSpec& spec, ParameterStore& params, const Tensor& inputs,
                         const Tensor& targets, const Split& split, SupervisedLoss loss,
                         const OptimizerSpec& opt, const TrainConfig& config) {
  config.validate();
  Optimizer optimizer(opt);
  Rng rng = Rng::stream(config.seed, 1);

  std::vector<Tensor*> param_ptrs;
  for (std::size_t i = 0; i < params.weights.size(); ++i) {
    if (params.weights[i].numel() == 0) continue;
    param_ptrs.push_back(&params.weights[i]);
    param_ptrs.push_back(&params.biases[i]);
  }

  Tensor test_x, test_y;
  if (!split.test_rows.empty()) {
    test_x = gather_rows(inputs, split.test_rows);
    test_y = gather_rows(targets, split.test_rows);
  }

  std::vector<int> order = split.train_rows;
  History history;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    long long seen = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      std::size_t end = std::min(order.size(), start + config.batch_size);
      std::vector<int> batch(order.begin() + start, order.begin() + end);
      Tensor x = gather_rows(inputs, batch);
      Tensor y = gather_rows(targets, batch);

      ForwardTrace trace = forward(spec, params, x, Mode::train, &rng);
      LossGrad lg = eval_loss(loss, trace.output(), y);
      if (!std::isfinite(lg.value))
        throw DivergenceError("training diverged at epoch " + std::to_string(epoch));
      loss_sum += lg.value * static_cast<double>(batch.size());
      seen += static_cast<long long>(batch.size());

      Gradients grads = backward(spec, params, trace, lg.grad, false);
      std::vector<const Tensor*> grad_ptrs;
      for (std::size_t i = 0; i < params.weights.size(); ++i) {
        if (params.weights[i].numel() == 0) continue;
        grad_ptrs.push_back(&grads.dweights[i]);
        grad_ptrs.push_back(&grads.dbiases[i]);
      }
      optimizer.step(param_ptrs, grad_ptrs);
    }

    EpochStats stats;
    stats.train_loss = seen ? loss_sum / static_cast<double>(seen) : 0.0;
    if (!split.test_rows.empty()) {
      ForwardTrace trace = forward(spec, params, test_x, Mode::eval);
      stats.test_loss = eval_loss(loss, trace.output(), test_y).value;
      if (!std::isfinite(stats.test_loss))
        throw DivergenceError("test loss diverged at epoch " + std::to_string(epoch));
    }
    history.push_back(stats);
  }
  return history;
}

}  // namespace elemvae::nn
