#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "elemvae/nn/network.hpp"
#include "elemvae/nn/optimizer.hpp"

namespace elemvae::nn {

enum class SplitGranularity { row, entity };

struct TrainConfig {
  double beta = 0.03;  // KL weight; ignored by plain supervised training
  int epochs = 20;
  int batch_size = 32;
  double split_fraction = 0.67;
  std::uint64_t seed = 0;
  SplitGranularity granularity = SplitGranularity::row;

  void validate() const {
    if (beta < 0.0) throw std::invalid_argument("train: beta must be >= 0");
    if (epochs < 0) throw std::invalid_argument("train: epochs must be >= 0");
    if (batch_size < 1) throw std::invalid_argument("train: batch size must be >= 1");
    if (split_fraction <= 0.0 || split_fraction >= 1.0)
      throw std::invalid_argument("train: split fraction must be in (0,1)");
  }
};

struct Split {
  std::vector<int> train_rows;
  std::vector<int> test_rows;
};

/// Deterministic train/test split. Entity granularity keeps all rows with the
/// same label on one side; the train side gets round(fraction * n) labels
/// (or rows, in row granularity).
Split split_dataset(const std::vector<int>& row_labels, double fraction, std::uint64_t seed,
                    SplitGranularity granularity);

struct EpochStats {
  double train_loss = 0.0;
  double test_loss = 0.0;
};

using History = std::vector<EpochStats>;

struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SupervisedLoss { bce, cce };

/// Minibatch training of a plain feed-forward network. Deterministic for a
/// fixed (spec, seed, data); throws DivergenceError on non-finite loss.
History train_supervised(const NetworkSpec& spec, ParameterStore& params, const Tensor& inputs,
                         const Tensor& targets, const Split& split, SupervisedLoss loss,
                         const OptimizerSpec& opt, const TrainConfig& config);

/// Gather rows of a batched tensor into a new tensor (same per-sample shape).
Tensor gather_rows(const Tensor& t, const std::vector<int>& rows);

}  // namespace elemvae::nn
