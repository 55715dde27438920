#include "elemvae/bvae.hpp"

#include <algorithm>
#include <cmath>

#include "elemvae/nn/losses.hpp"

namespace elemvae::bvae {

using nn::Activation;
using nn::LayerSpec;
using nn::Mode;
using nn::NetworkSpec;
using nn::Padding;
using nn::Tensor;

std::vector<std::string> BvaeSpec::encoder_shape_chain() const {
  std::vector<std::string> chain;
  for (const std::vector<int>& s : nn::shape_of(encoder)) chain.push_back(nn::shape_to_string(s));
  chain.push_back("2+2");
  return chain;
}

BvaeSpec conv_bvae_spec() {
  BvaeSpec s;
  s.encoder.input_shape = {7, 4, 1};
  s.encoder.layers = {
      LayerSpec::conv(256, 5, 2, 1, 1, Padding::same, Activation::relu),
      LayerSpec::conv(32, 5, 2, 1, 1, Padding::same, Activation::relu),
      LayerSpec::flatten(),
      LayerSpec::dense(896, Activation::relu),
  };
  s.mu_head.input_shape = {896};
  s.mu_head.layers = {LayerSpec::dense(kLatentDim)};
  s.logvar_head = s.mu_head;
  s.decoder.input_shape = {kLatentDim};
  s.decoder.layers = {
      LayerSpec::dense(32, Activation::relu),
      LayerSpec::dense(896, Activation::relu),
      LayerSpec::reshape({7, 4, 32}),
      LayerSpec::conv_transpose(32, 5, 2, 1, 1, Padding::same, Activation::relu),
      LayerSpec::conv_transpose(256, 5, 2, 1, 1, Padding::same, Activation::relu),
      LayerSpec::conv_transpose(1, 5, 2, 1, 1, Padding::same, Activation::sigmoid),
  };
  return s;
}

BvaeSpec dense_bvae_spec(int input_dim, const std::vector<int>& hidden) {
  if (input_dim < 1) throw std::invalid_argument("dense_bvae_spec: input_dim must be >= 1");
  if (hidden.empty()) throw std::invalid_argument("dense_bvae_spec: needs at least one hidden layer");
  BvaeSpec s;
  s.encoder.input_shape = {input_dim};
  for (int units : hidden) s.encoder.layers.push_back(LayerSpec::dense(units, Activation::relu));
  int trunk_out = hidden.back();
  s.mu_head.input_shape = {trunk_out};
  s.mu_head.layers = {LayerSpec::dense(kLatentDim)};
  s.logvar_head = s.mu_head;
  s.decoder.input_shape = {kLatentDim};
  for (std::size_t i = hidden.size(); i-- > 0;)
    s.decoder.layers.push_back(LayerSpec::dense(hidden[i], Activation::relu));
  s.decoder.layers.push_back(LayerSpec::dense(input_dim, Activation::sigmoid));
  return s;
}

std::vector<Tensor*> BvaeParams::all() {
  std::vector<Tensor*> out;
  for (nn::ParameterStore* store : {&encoder, &mu_head, &logvar_head, &decoder})
    for (std::size_t i = 0; i < store->weights.size(); ++i) {
      if (store->weights[i].numel() == 0) continue;
      out.push_back(&store->weights[i]);
      out.push_back(&store->biases[i]);
    }
  return out;
}

bool BvaeParams::all_finite() const {
  return encoder.all_finite() && mu_head.all_finite() && logvar_head.all_finite() &&
         decoder.all_finite();
}

namespace {

std::vector<const Tensor*> gradient_list(const nn::Gradients& ge, const nn::Gradients& gmu,
                                         const nn::Gradients& glv, const nn::Gradients& gd,
                                         const BvaeParams& params) {
  std::vector<const Tensor*> out;
  auto add = [&](const nn::Gradients& g, const nn::ParameterStore& store) {
    for (std::size_t i = 0; i < store.weights.size(); ++i) {
      if (store.weights[i].numel() == 0) continue;
      out.push_back(&g.dweights[i]);
      out.push_back(&g.dbiases[i]);
    }
  };
  add(ge, params.encoder);
  add(gmu, params.mu_head);
  add(glv, params.logvar_head);
  add(gd, params.decoder);
  return out;
}

struct VaeBatchResult {
  double total = 0.0, recon = 0.0, kl = 0.0;
};

}  // namespace

TrainedBvae train_bvae(const feat::FeatureMatrix& matrix, const BvaeSpec& spec,
                       const nn::OptimizerSpec& opt, const nn::TrainConfig& config) {
  config.validate();
  for (double v : matrix.data)
    if (v < 0.0 || v > 1.0)
      throw std::invalid_argument("train_bvae: matrix entries must lie in [0,1]");

  TrainedBvae model;
  model.spec = spec;
  model.config = config;
  model.optimizer = opt;
  model.recipe = matrix.recipe;
  model.divisors = matrix.divisors;
  model.seed = config.seed;

  Tensor inputs = matrix.tensor();
  model.input_shape.assign(inputs.shape.begin() + 1, inputs.shape.end());
  if (model.input_shape != spec.encoder.input_shape)
    throw std::invalid_argument("train_bvae: matrix shape does not match encoder input");

  model.params.encoder = nn::init_parameters(spec.encoder, nn::Rng::stream(config.seed, 10).bits());
  model.params.mu_head = nn::init_parameters(spec.mu_head, nn::Rng::stream(config.seed, 11).bits());
  model.params.logvar_head =
      nn::init_parameters(spec.logvar_head, nn::Rng::stream(config.seed, 12).bits());
  model.params.decoder = nn::init_parameters(spec.decoder, nn::Rng::stream(config.seed, 13).bits());

  nn::Split split = nn::split_dataset(matrix.row_entities, config.split_fraction, config.seed,
                                      config.granularity);
  nn::Optimizer optimizer(opt);
  nn::Rng rng = nn::Rng::stream(config.seed, 2);

  std::vector<Tensor*> param_ptrs = model.params.all();

  Tensor test_x;
  if (!split.test_rows.empty()) test_x = nn::gather_rows(inputs, split.test_rows);

  auto run_batch = [&](const Tensor& x, bool learn) -> VaeBatchResult {
    int n = x.shape[0];
    nn::ForwardTrace te = nn::forward(spec.encoder, model.params.encoder, x,
                                      learn ? Mode::train : Mode::eval, &rng);
    const Tensor& h = te.output();
    nn::ForwardTrace tmu = nn::forward(spec.mu_head, model.params.mu_head, h, Mode::eval);
    nn::ForwardTrace tlv = nn::forward(spec.logvar_head, model.params.logvar_head, h, Mode::eval);
    const Tensor& mu = tmu.output();
    const Tensor& logvar = tlv.output();

    Tensor eps;
    Tensor z = learn ? nn::reparameterize(mu, logvar, rng, &eps) : mu;

    nn::ForwardTrace td = nn::forward(spec.decoder, model.params.decoder, z,
                                      learn ? Mode::train : Mode::eval, &rng);
    Tensor target = x;
    target.shape = td.output().shape;  // same element count, decoder layout
    nn::LossGrad recon = nn::loss_bce(td.output(), target);
    nn::KlGrad kl = nn::kl_standard_normal(mu, logvar);

    VaeBatchResult res;
    res.recon = recon.value;
    res.kl = kl.value;
    res.total = recon.value + config.beta * kl.value;
    if (!learn) return res;

    nn::Gradients gd = nn::backward(spec.decoder, model.params.decoder, td, recon.grad);
    Tensor dmu = gd.dinput;  // dz/dmu = 1
    Tensor dlv(logvar.shape);
    for (long long i = 0; i < dlv.numel(); ++i)
      dlv.data[i] = gd.dinput.data[i] * 0.5 * std::exp(0.5 * logvar.data[i]) * eps.data[i];
    if (config.beta > 0.0) {
      for (long long i = 0; i < dmu.numel(); ++i) dmu.data[i] += config.beta * kl.dmu.data[i];
      for (long long i = 0; i < dlv.numel(); ++i) dlv.data[i] += config.beta * kl.dlogvar.data[i];
    }
    nn::Gradients gmu = nn::backward(spec.mu_head, model.params.mu_head, tmu, dmu);
    nn::Gradients glv = nn::backward(spec.logvar_head, model.params.logvar_head, tlv, dlv);
    Tensor dh = gmu.dinput;
    for (long long i = 0; i < dh.numel(); ++i) dh.data[i] += glv.dinput.data[i];
    nn::Gradients ge = nn::backward(spec.encoder, model.params.encoder, te, dh, false);

    optimizer.step(param_ptrs, gradient_list(ge, gmu, glv, gd, model.params));
    (void)n;
    return res;
  };

  std::vector<int> order = split.train_rows;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double total = 0.0, recon = 0.0, klsum = 0.0;
    long long seen = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      std::size_t end = std::min(order.size(), start + config.batch_size);
      std::vector<int> batch(order.begin() + start, order.begin() + end);
      Tensor x = nn::gather_rows(inputs, batch);
      VaeBatchResult res = run_batch(x, true);
      if (!std::isfinite(res.total))
        throw nn::DivergenceError("bvae training diverged at epoch " + std::to_string(epoch));
      double w = static_cast<double>(batch.size());
      total += res.total * w;
      recon += res.recon * w;
      klsum += res.kl * w;
      seen += batch.size();
    }
    BvaeEpochStats stats;
    stats.train_total = total / static_cast<double>(seen);
    stats.train_recon = recon / static_cast<double>(seen);
    stats.train_kl = klsum / static_cast<double>(seen);
    if (!split.test_rows.empty()) {
      VaeBatchResult res = run_batch(test_x, false);
      stats.test_total = res.total;
      if (!std::isfinite(res.total))
        throw nn::DivergenceError("bvae test loss diverged at epoch " + std::to_string(epoch));
    }
    model.history.push_back(stats);
  }
  return model;
}

LatentPoint encode(const TrainedBvae& model, const std::vector<double>& features) {
  std::vector<int> shape{1};
  shape.insert(shape.end(), model.input_shape.begin(), model.input_shape.end());
  if (Tensor::numel_of(shape) != static_cast<long long>(features.size()))
    throw std::invalid_argument("encode: feature vector does not match the model's recipe");
  Tensor x(shape, features);
  nn::ForwardTrace te = nn::forward(model.spec.encoder, model.params.encoder, x, Mode::eval);
  nn::ForwardTrace tmu = nn::forward(model.spec.mu_head, model.params.mu_head, te.output(), Mode::eval);
  nn::ForwardTrace tlv =
      nn::forward(model.spec.logvar_head, model.params.logvar_head, te.output(), Mode::eval);
  LatentPoint p;
  for (int d = 0; d < kLatentDim; ++d) {
    p.mu[d] = tmu.output().data[d];
    p.logvar[d] = tlv.output().data[d];
  }
  return p;
}

std::vector<double> decode(const TrainedBvae& model, const double z[kLatentDim]) {
  Tensor zt({1, kLatentDim});
  zt.data = {z[0], z[1]};
  nn::ForwardTrace td = nn::forward(model.spec.decoder, model.params.decoder, zt, Mode::eval);
  return td.output().data;
}

Reconstruction round_to_configuration(const TrainedBvae& model,
                                      const std::vector<double>& decoded) {
  if (model.recipe.variant != feat::Variant::image28 || model.recipe.transposed)
    throw std::invalid_argument("reconstruction requires an image28-trained model");
  Reconstruction rec;
  rec.grid = feat::round_decoded_image(decoded, model.divisors);
  if (std::optional<elements::ElectronConfiguration> cfg = feat::grid_to_config(rec.grid)) {
    rec.physical = true;
    rec.config = *cfg;
  }
  return rec;
}

Reconstruction reconstruct_config(const TrainedBvae& model, const std::vector<double>& features) {
  LatentPoint p = encode(model, features);
  return round_to_configuration(model, decode(model, p.mu));
}

}  // namespace elemvae::bvae
