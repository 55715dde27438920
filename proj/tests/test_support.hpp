#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "elemvae/nn/rng.hpp"
#include "elemvae/nn/tensor.hpp"

namespace testsup {

inline void fill_uniform(elemvae::nn::Tensor& t, elemvae::nn::Rng& rng, double lo = -1.0,
                         double hi = 1.0) {
  for (double& v : t.data) v = rng.uniform(lo, hi);
}

inline double rel_err(double a, double b) {
  double scale = std::max({std::fabs(a), std::fabs(b), 1e-6});
  return std::fabs(a - b) / scale;
}

/// central finite difference of a scalar function w.r.t. one entry
inline double numeric_grad(const std::function<double()>& f, double& param, double eps = 1e-5) {
  double orig = param;
  param = orig + eps;
  double fp = f();
  param = orig - eps;
  double fm = f();
  param = orig;
  return (fp - fm) / (2.0 * eps);
}

/// max relative error between an analytic gradient tensor and finite
/// differences of f over every entry of `values`
inline double max_grad_err(const std::function<double()>& f, std::vector<double>& values,
                           const std::vector<double>& analytic, double eps = 1e-5) {
  double worst = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    double num = numeric_grad(f, values[i], eps);
    worst = std::max(worst, rel_err(analytic[i], num));
  }
  return worst;
}

}  // namespace testsup
