#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "elemvae/bvae.hpp"

using namespace elemvae;
using namespace elemvae::bvae;

namespace {
const elements::ElementTable& table() {
  static elements::ElementTable t = elements::ElementTable::load_file("data/elements.csv");
  return t;
}

feat::FeatureMatrix small_matrix(int dup = 4) {
  feat::Recipe r;
  r.variant = feat::Variant::shell7;
  r.duplication = dup;
  return feat::build_feature_matrix(table(), r);
}

nn::TrainConfig quick_config(int epochs, std::uint64_t seed) {
  nn::TrainConfig c;
  c.epochs = epochs;
  c.batch_size = 32;
  c.seed = seed;
  return c;
}
}  // namespace

TEST_CASE("conv spec: shape chain ends at 896 and mirrors back to 7x4x1") {
  BvaeSpec spec = conv_bvae_spec();
  auto enc_shapes = nn::shape_of(spec.encoder);
  CHECK(enc_shapes[2] == std::vector<int>{896});  // Flatten(896 = 7x4x32)
  CHECK(enc_shapes[3] == std::vector<int>{896});
  CHECK(spec.encoder_shape_chain().back() == "2+2");
  auto dec_shapes = nn::shape_of(spec.decoder);
  CHECK(dec_shapes.back() == std::vector<int>{7, 4, 1});
  CHECK(nn::shape_of(spec.mu_head).back() == std::vector<int>{2});

  // parameter count is fixed by the shape algebra
  nn::ParameterStore enc = nn::init_parameters(spec.encoder, 0);
  long long expected_conv1 = 5LL * 2 * 1 * 256 + 256;
  long long expected_conv2 = 5LL * 2 * 256 * 32 + 32;
  long long expected_dense = 896LL * 896 + 896;
  CHECK(enc.count() == expected_conv1 + expected_conv2 + expected_dense);
}

TEST_CASE("dense specs: appendix models 2 and 3") {
  BvaeSpec m2 = dense_bvae_spec(7, {256, 32});
  CHECK(nn::shape_of(m2.encoder).back() == std::vector<int>{32});
  CHECK(nn::shape_of(m2.decoder).back() == std::vector<int>{7});
  BvaeSpec m3 = dense_bvae_spec(118, {128, 16});
  CHECK(nn::shape_of(m3.decoder).back() == std::vector<int>{118});
  BvaeSpec m5 = dense_bvae_spec(5, {64, 16});
  CHECK(nn::shape_of(m5.decoder).back() == std::vector<int>{5});
  CHECK_THROWS(dense_bvae_spec(0, {8}));
}

TEST_CASE("train_bvae: loss decreases, identical seeds give identical models") {
  feat::FeatureMatrix m = small_matrix();
  BvaeSpec spec = dense_bvae_spec(7, {32, 8});
  TrainedBvae a = train_bvae(m, spec, nn::OptimizerSpec::rmsprop(), quick_config(12, 3));
  CHECK(a.history.size() == 12);
  CHECK(a.history.back().train_total < a.history.front().train_total);

  TrainedBvae b = train_bvae(m, spec, nn::OptimizerSpec::rmsprop(), quick_config(12, 3));
  CHECK(a.params.encoder.weights[0].data == b.params.encoder.weights[0].data);
  CHECK(a.history.back().train_total == b.history.back().train_total);

  // beta = 0 excludes the KL term but the run still goes through
  nn::TrainConfig c0 = quick_config(3, 4);
  c0.beta = 0.0;
  TrainedBvae z = train_bvae(m, spec, nn::OptimizerSpec::rmsprop(), c0);
  CHECK(z.history.size() == 3);
}

TEST_CASE("train_bvae rejects out-of-range inputs") {
  feat::FeatureMatrix m = small_matrix();
  for (double& v : m.data) v *= 2.0;  // push entries above 1
  CHECK_THROWS(train_bvae(m, dense_bvae_spec(7, {8}), nn::OptimizerSpec::rmsprop(),
                          quick_config(1, 1)));
}

TEST_CASE("encode: deterministic and duplication-invariant") {
  feat::FeatureMatrix m = small_matrix();
  TrainedBvae model =
      train_bvae(m, dense_bvae_spec(7, {32, 8}), nn::OptimizerSpec::rmsprop(), quick_config(6, 5));
  std::vector<double> row0(m.data.begin(), m.data.begin() + 7);
  std::vector<double> row_dup(m.data.begin() + 7LL * 118, m.data.begin() + 7LL * 118 + 7);
  CHECK(row0 == row_dup);
  LatentPoint p1 = encode(model, row0);
  LatentPoint p2 = encode(model, row_dup);
  CHECK(p1.mu[0] == p2.mu[0]);
  CHECK(p1.mu[1] == p2.mu[1]);
  CHECK(std::isfinite(p1.logvar[0]));
  CHECK_THROWS(encode(model, std::vector<double>(5, 0.0)));  // recipe mismatch
}

TEST_CASE("decode: bounded outputs, shape, continuity") {
  feat::FeatureMatrix m = small_matrix();
  TrainedBvae model =
      train_bvae(m, dense_bvae_spec(7, {32, 8}), nn::OptimizerSpec::rmsprop(), quick_config(6, 6));
  double z[2] = {0.3, -0.4};
  std::vector<double> out = decode(model, z);
  CHECK(out.size() == 7);
  for (double v : out) {
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
  double z2[2] = {0.301, -0.4};
  std::vector<double> out2 = decode(model, z2);
  double diff = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) diff = std::max(diff, std::fabs(out[i] - out2[i]));
  CHECK(diff < 0.05);  // small latent step, small output step
}

TEST_CASE("checkpoint round trip is bit-exact") {
  feat::FeatureMatrix m = small_matrix();
  TrainedBvae model =
      train_bvae(m, dense_bvae_spec(7, {16, 8}), nn::OptimizerSpec::rmsprop(), quick_config(4, 7));
  const std::string path = "test_ckpt.bin";
  save_model(path, model);
  TrainedBvae loaded = load_model(path);
  CHECK(loaded.params.encoder.weights[0].data == model.params.encoder.weights[0].data);
  CHECK(loaded.params.decoder.biases[1].data == model.params.decoder.biases[1].data);
  CHECK(loaded.recipe == model.recipe);
  CHECK(loaded.config.beta == model.config.beta);
  CHECK(loaded.history.size() == model.history.size());

  // saving the loaded model reproduces the file byte for byte
  const std::string path2 = "test_ckpt2.bin";
  save_model(path2, loaded);
  std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
  std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  CHECK(s1 == s2);
  CHECK(!s1.empty());

  // encodings agree
  std::vector<double> row0(m.data.begin(), m.data.begin() + 7);
  LatentPoint a = encode(model, row0);
  LatentPoint b = encode(loaded, row0);
  CHECK(a.mu[0] == b.mu[0]);
  CHECK(a.logvar[1] == b.logvar[1]);
  std::remove(path.c_str());
  std::remove(path2.c_str());
}

TEST_CASE("reconstruction rounding on an image model") {
  feat::Recipe r;
  r.variant = feat::Variant::image28;
  feat::FeatureMatrix m = feat::build_feature_matrix(table(), r);
  BvaeSpec spec = conv_bvae_spec();
  nn::TrainConfig c = quick_config(1, 8);
  TrainedBvae model = train_bvae(m, spec, nn::OptimizerSpec::adam(), c);
  std::vector<double> feats = feat::featurize_one(table().by_z(1), m);
  Reconstruction rec = reconstruct_config(model, feats);
  CHECK(rec.grid.total() >= 0);  // untrained net: only the mechanics are checked here
  TrainedBvae dense = train_bvae(small_matrix(1), dense_bvae_spec(7, {8}),
                                 nn::OptimizerSpec::rmsprop(), quick_config(1, 9));
  CHECK_THROWS(reconstruct_config(dense, std::vector<double>(7, 0.0)));
}
