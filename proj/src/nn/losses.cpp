#include "elemvae/nn/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace elemvae::nn {

namespace {
constexpr double kBceEps = 1e-7;

void check_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (a.shape != b.shape)
    throw std::invalid_argument(std::string(what) + ": shape mismatch " +
                                shape_to_string(a.shape) + " vs " + shape_to_string(b.shape));
}
}  // namespace

LossGrad loss_bce(const Tensor& prediction, const Tensor& target) {
  check_same_shape(prediction, target, "loss_bce");
  int n = prediction.shape.empty() ? 1 : prediction.shape[0];
  LossGrad out;
  out.grad = Tensor(prediction.shape);
  double sum = 0.0;
  for (long long i = 0; i < prediction.numel(); ++i) {
    double p = prediction.data[i];
    p = p < kBceEps ? kBceEps : (p > 1.0 - kBceEps ? 1.0 - kBceEps : p);
    double t = target.data[i];
    sum += -(t * std::log(p) + (1.0 - t) * std::log(1.0 - p));
    out.grad.data[i] = (p - t) / (p * (1.0 - p)) / n;
  }
  out.value = sum / n;
  return out;
}

LossGrad loss_cce(const Tensor& scores, const Tensor& one_hot_target) {
  check_same_shape(scores, one_hot_target, "loss_cce");
  if (scores.shape.size() != 2) throw std::invalid_argument("loss_cce: expects (batch, classes)");
  int n = scores.shape[0], c = scores.shape[1];
  LossGrad out;
  out.grad = Tensor(scores.shape);
  double sum = 0.0;
  for (int r = 0; r < n; ++r) {
    const double* s = scores.ptr() + 1LL * r * c;
    const double* t = one_hot_target.ptr() + 1LL * r * c;
    double total = 0.0;
    for (int k = 0; k < c; ++k) total += s[k];
    if (total <= 0.0) throw std::invalid_argument("loss_cce: non-positive score sum");
    for (int k = 0; k < c; ++k) {
      double p = s[k] / total;
      if (t[k] > 0.0) sum += -t[k] * std::log(p < 1e-12 ? 1e-12 : p);
      // d/ds_k of -sum_i t_i (ln s_i - ln total); one-hot targets sum to 1
      out.grad.data[1LL * r * c + k] = (1.0 / total - (s[k] > 0.0 ? t[k] / s[k] : 0.0)) / n;
    }
  }
  out.value = sum / n;
  return out;
}

KlGrad kl_standard_normal(const Tensor& mu, const Tensor& logvar) {
  check_same_shape(mu, logvar, "kl_standard_normal");
  int n = mu.shape.empty() ? 1 : mu.shape[0];
  KlGrad out;
  out.dmu = Tensor(mu.shape);
  out.dlogvar = Tensor(logvar.shape);
  double sum = 0.0;
  for (long long i = 0; i < mu.numel(); ++i) {
    double m = mu.data[i], lv = logvar.data[i];
    double ev = std::exp(lv);
    sum += -0.5 * (1.0 + lv - m * m - ev);
    out.dmu.data[i] = m / n;
    out.dlogvar.data[i] = 0.5 * (ev - 1.0) / n;
  }
  out.value = sum / n;
  return out;
}

Tensor reparameterize(const Tensor& mu, const Tensor& logvar, Rng& rng, Tensor* epsilon) {
  check_same_shape(mu, logvar, "reparameterize");
  Tensor z(mu.shape);
  Tensor eps(mu.shape);
  for (long long i = 0; i < mu.numel(); ++i) {
    eps.data[i] = rng.normal();
    z.data[i] = mu.data[i] + std::exp(0.5 * logvar.data[i]) * eps.data[i];
  }
  if (epsilon) *epsilon = std::move(eps);
  return z;
}

}  // namespace elemvae::nn
