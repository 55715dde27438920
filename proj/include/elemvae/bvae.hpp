#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "elemvae/featurize.hpp"
#include "elemvae/nn/network.hpp"
#include "elemvae/nn/optimizer.hpp"
#include "elemvae/nn/train.hpp"

namespace elemvae::bvae {

constexpr int kLatentDim = 2;

/// Encoder trunk feeding two parallel 2-unit heads (mu, logvar), mirrored by
/// a decoder ending in a sigmoid.
struct BvaeSpec {
  nn::NetworkSpec encoder;              // trunk
  nn::NetworkSpec mu_head, logvar_head; // single dense(2) each
  nn::NetworkSpec decoder;

  /// trunk output shapes followed by the "2+2" head pair
  std::vector<std::string> encoder_shape_chain() const;
};

/// The convolutional model: conv(256) conv(32) flatten(896) dense(896)
/// -> 2+2; decoder dense(32) dense(896) reshape(7,4,32) and three
/// transposed convs back to 7x4x1, all kernels 5x2 stride 1 'same'.
BvaeSpec conv_bvae_spec();

/// Dense encoder stack (relu) with mirrored decoder, sigmoid output.
BvaeSpec dense_bvae_spec(int input_dim, const std::vector<int>& hidden);

struct LatentPoint {
  double mu[kLatentDim] = {0, 0};
  double logvar[kLatentDim] = {0, 0};
};

struct BvaeEpochStats {
  double train_total = 0.0;
  double train_recon = 0.0;
  double train_kl = 0.0;
  double test_total = 0.0;
};

struct BvaeParams {
  nn::ParameterStore encoder, mu_head, logvar_head, decoder;

  std::vector<nn::Tensor*> all();
  bool all_finite() const;
};

struct TrainedBvae {
  BvaeSpec spec;
  BvaeParams params;
  nn::TrainConfig config;
  nn::OptimizerSpec optimizer;
  std::vector<BvaeEpochStats> history;
  feat::Recipe recipe;       // how the training matrix was built
  std::vector<double> divisors;
  std::vector<int> input_shape;  // per-sample
  std::uint64_t seed = 0;
};

/// Minimize BCE + beta*KL with reparameterized sampling. Deterministic for a
/// fixed seed; throws nn::DivergenceError on non-finite loss.
TrainedBvae train_bvae(const feat::FeatureMatrix& matrix, const BvaeSpec& spec,
                       const nn::OptimizerSpec& opt, const nn::TrainConfig& config);

/// Deterministic encoding (mu and logvar, no sampling) of one feature row.
LatentPoint encode(const TrainedBvae& model, const std::vector<double>& features);

/// Decoder forward pass at a latent point.
std::vector<double> decode(const TrainedBvae& model, const double z[kLatentDim]);

struct Reconstruction {
  feat::RealignedGrid grid;  // rounded, capacity-clamped cells
  bool physical = false;     // grid maps back to real orbitals
  elements::ElectronConfiguration config;  // meaningful when physical
};

/// decode -> denormalize -> round half-to-even -> clamp to capacity ->
/// invert the realignment. Requires an image28-trained model.
Reconstruction reconstruct_config(const TrainedBvae& model, const std::vector<double>& features);
Reconstruction round_to_configuration(const TrainedBvae& model, const std::vector<double>& decoded);

/// Versioned checkpoint container (JSON header + raw little-endian doubles);
/// round-trips bit-exactly.
void save_model(const std::string& path, const TrainedBvae& model);
TrainedBvae load_model(const std::string& path);

}  // namespace elemvae::bvae
