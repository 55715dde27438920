#pragma once

#include <string>
#include <vector>

#include "elemvae/nn/tensor.hpp"

namespace elemvae::nn {

enum class OptAlgorithm { adam, rmsprop, adadelta };

struct OptimizerSpec {
  OptAlgorithm algorithm = OptAlgorithm::adam;
  double learning_rate = 1e-3;
  double decay1 = 0.9;    // adam beta1 / rmsprop rho / adadelta rho
  double decay2 = 0.999;  // adam beta2 only
  double epsilon = 1e-8;

  static OptimizerSpec adam(double lr = 1e-3);
  static OptimizerSpec rmsprop(double lr = 1e-3);
  static OptimizerSpec adadelta(double lr = 1.0);

  void validate() const;
};

/// Stateful first-order optimizer over an arbitrary list of tensors.
/// Tensors must be passed in the same order on every step.
class Optimizer {
 public:
  explicit Optimizer(OptimizerSpec spec);

  void step(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads);

  const OptimizerSpec& spec() const { return spec_; }

 private:
  OptimizerSpec spec_;
  long long t_ = 0;
  std::vector<std::vector<double>> slot1_;  // first moment / sq-grad accumulator
  std::vector<std::vector<double>> slot2_;  // second moment / sq-delta accumulator
};

OptAlgorithm opt_algorithm_from_string(const std::string& name);
const char* to_string(OptAlgorithm a);

}  // namespace elemvae::nn
