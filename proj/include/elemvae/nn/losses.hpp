#pragma once

#include "elemvae/nn/rng.hpp"
#include "elemvae/nn/tensor.hpp"

namespace elemvae::nn {

struct LossGrad {
  double value = 0.0;
  Tensor grad;  // w.r.t. the prediction
};

/// Binary cross-entropy, summed over features and averaged over the batch.
/// Predictions are clamped to [1e-7, 1 - 1e-7] before the logs.
LossGrad loss_bce(const Tensor& prediction, const Tensor& target);

/// Categorical cross-entropy over sigmoid scores renormalized to sum 1
/// per sample; averaged over the batch.
LossGrad loss_cce(const Tensor& scores, const Tensor& one_hot_target);

struct KlGrad {
  double value = 0.0;
  Tensor dmu;
  Tensor dlogvar;
};

/// KL(N(mu, diag(exp(logvar))) || N(0, I)), summed over latent dims and
/// averaged over the batch.
KlGrad kl_standard_normal(const Tensor& mu, const Tensor& logvar);

/// z = mu + exp(logvar/2) * eps with eps ~ N(0, I). eps is written to
/// `epsilon` for the backward pass (gradients flow to mu and logvar only).
Tensor reparameterize(const Tensor& mu, const Tensor& logvar, Rng& rng, Tensor* epsilon);

}  // namespace elemvae::nn
