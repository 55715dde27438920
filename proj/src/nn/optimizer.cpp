#include "elemvae/nn/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace elemvae::nn {

OptimizerSpec OptimizerSpec::adam(double lr) {
  return {OptAlgorithm::adam, lr, 0.9, 0.999, 1e-8};
}

OptimizerSpec OptimizerSpec::rmsprop(double lr) {
  return {OptAlgorithm::rmsprop, lr, 0.9, 0.0, 1e-8};
}

OptimizerSpec OptimizerSpec::adadelta(double lr) {
  return {OptAlgorithm::adadelta, lr, 0.95, 0.0, 1e-6};
}

void OptimizerSpec::validate() const {
  if (learning_rate <= 0.0) throw std::invalid_argument("optimizer: learning rate must be > 0");
  if (decay1 <= 0.0 || decay1 >= 1.0)
    throw std::invalid_argument("optimizer: decay must be in (0,1)");
  if (algorithm == OptAlgorithm::adam && (decay2 <= 0.0 || decay2 >= 1.0))
    throw std::invalid_argument("optimizer: adam second decay must be in (0,1)");
  if (epsilon <= 0.0) throw std::invalid_argument("optimizer: epsilon must be > 0");
}

Optimizer::Optimizer(OptimizerSpec spec) : spec_(spec) { spec_.validate(); }

void Optimizer::step(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads) {
  if (params.size() != grads.size())
    throw std::invalid_argument("optimizer: params/grads size mismatch");
  if (slot1_.empty()) {
    slot1_.resize(params.size());
    slot2_.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      slot1_[i].assign(params[i]->data.size(), 0.0);
      slot2_[i].assign(params[i]->data.size(), 0.0);
    }
  }
  if (slot1_.size() != params.size())
    throw std::invalid_argument("optimizer: tensor list changed between steps");
  ++t_;

  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i];
    const Tensor& g = *grads[i];
    if (p.data.size() != g.data.size())
      throw std::invalid_argument("optimizer: parameter/gradient shape mismatch");
    std::vector<double>& s1 = slot1_[i];
    std::vector<double>& s2 = slot2_[i];
    switch (spec_.algorithm) {
      case OptAlgorithm::adam: {
        double c1 = 1.0 - std::pow(spec_.decay1, static_cast<double>(t_));
        double c2 = 1.0 - std::pow(spec_.decay2, static_cast<double>(t_));
        for (std::size_t k = 0; k < p.data.size(); ++k) {
          s1[k] = spec_.decay1 * s1[k] + (1.0 - spec_.decay1) * g.data[k];
          s2[k] = spec_.decay2 * s2[k] + (1.0 - spec_.decay2) * g.data[k] * g.data[k];
          double mhat = s1[k] / c1;
          double vhat = s2[k] / c2;
          p.data[k] -= spec_.learning_rate * mhat / (std::sqrt(vhat) + spec_.epsilon);
        }
        break;
      }
      case OptAlgorithm::rmsprop: {
        for (std::size_t k = 0; k < p.data.size(); ++k) {
          s1[k] = spec_.decay1 * s1[k] + (1.0 - spec_.decay1) * g.data[k] * g.data[k];
          p.data[k] -= spec_.learning_rate * g.data[k] / (std::sqrt(s1[k]) + spec_.epsilon);
        }
        break;
      }
      case OptAlgorithm::adadelta: {
        for (std::size_t k = 0; k < p.data.size(); ++k) {
          s1[k] = spec_.decay1 * s1[k] + (1.0 - spec_.decay1) * g.data[k] * g.data[k];
          double delta = -std::sqrt(s2[k] + spec_.epsilon) / std::sqrt(s1[k] + spec_.epsilon) *
                         g.data[k];
          s2[k] = spec_.decay1 * s2[k] + (1.0 - spec_.decay1) * delta * delta;
          p.data[k] += spec_.learning_rate * delta;
        }
        break;
      }
    }
  }
}

OptAlgorithm opt_algorithm_from_string(const std::string& name) {
  if (name == "adam") return OptAlgorithm::adam;
  if (name == "rmsprop") return OptAlgorithm::rmsprop;
  if (name == "adadelta") return OptAlgorithm::adadelta;
  throw std::invalid_argument("unknown optimizer: " + name);
}

const char* to_string(OptAlgorithm a) {
  switch (a) {
    case OptAlgorithm::adam: return "adam";
    case OptAlgorithm::rmsprop: return "rmsprop";
    case OptAlgorithm::adadelta: return "adadelta";
  }
  return "?";
}

}  // namespace elemvae::nn
