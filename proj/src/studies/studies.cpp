#include "elemvae/studies.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace elemvae::studies {

using elements::ElementRecord;
using nn::Tensor;

GeneratedSet generate_candidates(const latent::GridDecode& grid, const latent::LatentMap& real_map,
                                 const FilterBand& band, const ElementTable& table) {
  if (band.lo < 0.0 || band.lo >= band.hi)
    throw std::invalid_argument("filter band must satisfy 0 <= lo < hi");
  GeneratedSet out;
  out.band = band;

  std::vector<feat::RealignedGrid> real_images;
  for (const ElementRecord& rec : table.records())
    real_images.push_back(feat::realign_subshells(rec.config));

  double lo = band.lo * band.sigma_scale, hi = band.hi * band.sigma_scale;
  std::vector<feat::RealignedGrid> seen;
  for (const latent::GridCell& cell : grid.cells) {
    double nearest = std::numeric_limits<double>::infinity();
    for (int i = 0; i < real_map.size(); ++i)
      nearest = std::min(nearest, std::hypot(cell.x - real_map.xs[i], cell.y - real_map.ys[i]));
    if (nearest < lo || nearest > hi) continue;
    ++out.before_dedup;
    if (std::find(seen.begin(), seen.end(), cell.rounded) != seen.end()) continue;
    seen.push_back(cell.rounded);

    GeneratedPoint p;
    p.i = cell.i;
    p.j = cell.j;
    p.x = cell.x;
    p.y = cell.y;
    p.nearest_real = nearest;
    p.decoded = cell.decoded;
    p.rounded = cell.rounded;
    p.physical = cell.physical;
    p.config = cell.config;
    p.exact_match =
        std::find(real_images.begin(), real_images.end(), cell.rounded) != real_images.end();
    out.points.push_back(std::move(p));
  }
  return out;
}

bool oracle_real_like(const ElectronConfiguration& config, bool physical,
                      const ElementTable& table, bool actual_disjunction) {
  if (!physical) return false;
  if (elements::is_madelung_consistent(config)) return true;
  if (!actual_disjunction) return false;
  for (const ElementRecord& rec : table.records())
    if (rec.config == config) return true;
  return false;
}

OracleResult madelung_oracle_classify(
    const std::vector<std::pair<ElectronConfiguration, bool>>& configs,
    const std::vector<bool>& truth_is_real, const ElementTable& table, bool actual_disjunction) {
  if (configs.size() != truth_is_real.size())
    throw std::invalid_argument("madelung_oracle_classify: configs/truth size mismatch");
  OracleResult res;
  int correct = 0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    bool rl = oracle_real_like(configs[i].first, configs[i].second, table, actual_disjunction);
    res.real_like.push_back(rl);
    if (rl == truth_is_real[i]) ++correct;
  }
  res.accuracy = configs.empty() ? 0.0 : static_cast<double>(correct) / configs.size();
  return res;
}

nn::NetworkSpec classifier_spec() {
  using nn::Activation;
  using nn::LayerSpec;
  using nn::Padding;
  nn::NetworkSpec spec;
  spec.input_shape = {7, 4, 1};
  spec.layers = {
      LayerSpec::conv(16, 3, 3, 2, 1, Padding::same, Activation::relu),
      LayerSpec::conv(8, 3, 3, 2, 1, Padding::same, Activation::relu),
      LayerSpec::pool(2, 4),
      LayerSpec::dropout_layer(0.25),
      LayerSpec::flatten(),
      LayerSpec::dense(2, Activation::sigmoid),
  };
  return spec;
}

ClassificationDataset build_classification_dataset(const ElementTable& table,
                                                   const GeneratedSet& generated,
                                                   const std::vector<double>& divisors,
                                                   std::uint64_t seed) {
  if (generated.points.empty())
    throw std::invalid_argument("build_classification_dataset: empty generated set");
  int n_real = static_cast<int>(table.size());
  int n_art = static_cast<int>(generated.points.size());
  int rows = n_real + n_art;

  ClassificationDataset ds;
  ds.x = Tensor({rows, 7, 4, 1});
  ds.y = Tensor({rows, 2});
  ds.is_real.resize(rows);
  ds.entity.resize(rows);

  // real rows keep their original (not encoded-decoded) inputs
  for (int r = 0; r < n_real; ++r) {
    feat::RealignedGrid img = feat::realign_subshells(table.records()[r].config);
    for (int c = 0; c < 28; ++c) ds.x.data[1LL * r * 28 + c] = img.cells[c] / divisors[c];
    ds.y.data[1LL * r * 2 + 0] = 1.0;
    ds.is_real[r] = 1;
    ds.entity[r] = table.records()[r].z;
  }
  for (int a = 0; a < n_art; ++a) {
    int r = n_real + a;
    const feat::RealignedGrid& img = generated.points[a].rounded;
    for (int c = 0; c < 28; ++c) ds.x.data[1LL * r * 28 + c] = img.cells[c] / divisors[c];
    ds.y.data[1LL * r * 2 + 1] = 1.0;
    ds.is_real[r] = 0;
    ds.entity[r] = a;
  }

  // stratified 60/40: split each class independently, then merge
  std::vector<int> real_rows(n_real), art_rows(n_art);
  for (int r = 0; r < n_real; ++r) real_rows[r] = r;
  for (int a = 0; a < n_art; ++a) art_rows[a] = n_real + a;
  nn::Split real_split = nn::split_dataset(real_rows, 0.6, seed, nn::SplitGranularity::row);
  nn::Split art_split = nn::split_dataset(art_rows, 0.6, seed + 1, nn::SplitGranularity::row);
  auto remap = [](const std::vector<int>& idx, const std::vector<int>& rows_of) {
    std::vector<int> out;
    for (int i : idx) out.push_back(rows_of[i]);
    return out;
  };
  ds.split.train_rows = remap(real_split.train_rows, real_rows);
  std::vector<int> art_train = remap(art_split.train_rows, art_rows);
  ds.split.train_rows.insert(ds.split.train_rows.end(), art_train.begin(), art_train.end());
  ds.split.test_rows = remap(real_split.test_rows, real_rows);
  std::vector<int> art_test = remap(art_split.test_rows, art_rows);
  ds.split.test_rows.insert(ds.split.test_rows.end(), art_test.begin(), art_test.end());
  return ds;
}

StudyReport run_classification_study(const ElementTable& table, const bvae::TrainedBvae& model,
                                     const FilterBand& band, std::uint64_t seed,
                                     int classifier_epochs, int grid_n) {
  if (model.recipe.variant != feat::Variant::image28 || model.recipe.transposed)
    throw std::invalid_argument("classification study requires an image28-trained model");
  latent::LatentMap real_map = latent::encode_elements(model, table);
  latent::GridDecode grid = latent::decode_grid(model, latent::map_bounds(real_map), grid_n);
  GeneratedSet gen = generate_candidates(grid, real_map, band, table);
  if (gen.points.empty())
    throw std::runtime_error("classification study: the filter band kept no grid points");

  ClassificationDataset ds = build_classification_dataset(table, gen, model.divisors, seed);
  bool single_class = ds.split.train_rows.empty() || ds.split.test_rows.empty();
  if (single_class) throw std::runtime_error("classification study: degenerate split");

  nn::NetworkSpec cls = classifier_spec();
  nn::ParameterStore params = nn::init_parameters(cls, nn::Rng::stream(seed, 20).bits());
  nn::TrainConfig config;
  config.epochs = classifier_epochs;
  config.batch_size = 32;
  config.seed = seed;
  nn::History hist = nn::train_supervised(cls, params, ds.x, ds.y, ds.split,
                                          nn::SupervisedLoss::cce, nn::OptimizerSpec::adadelta(),
                                          config);
  (void)hist;

  StudyReport report;
  report.real_rows = static_cast<int>(table.size());
  report.artificial_rows = static_cast<int>(gen.points.size());
  report.band = band;
  report.seed = seed;
  report.epochs = classifier_epochs;
  for (const GeneratedPoint& p : gen.points) report.exact_matches += p.exact_match ? 1 : 0;

  // test-set metrics
  Tensor test_x = nn::gather_rows(ds.x, ds.split.test_rows);
  nn::ForwardTrace trace = nn::forward(cls, params, test_x, nn::Mode::eval);
  const Tensor& scores = trace.output();
  int correct = 0, art_total = 0, art_correct = 0, art_total_ne = 0, art_correct_ne = 0;
  for (std::size_t t = 0; t < ds.split.test_rows.size(); ++t) {
    int row = ds.split.test_rows[t];
    bool pred_real = scores.data[2 * t] >= scores.data[2 * t + 1];
    bool is_real = ds.is_real[row] == 1;
    if (pred_real == is_real) ++correct;
    if (is_real && !pred_real) report.false_negative_zs.push_back(ds.entity[row]);
    if (!is_real) {
      ++art_total;
      bool exact = gen.points[ds.entity[row]].exact_match;
      if (!pred_real) ++art_correct;
      if (pred_real) ++report.false_positives;
      if (!exact) {
        ++art_total_ne;
        if (!pred_real) ++art_correct_ne;
      }
    }
  }
  report.test_accuracy = static_cast<double>(correct) / ds.split.test_rows.size();
  report.artificial_accuracy = art_total ? static_cast<double>(art_correct) / art_total : 0.0;
  report.artificial_accuracy_excl_exact =
      art_total_ne ? static_cast<double>(art_correct_ne) / art_total_ne : 0.0;
  std::sort(report.false_negative_zs.begin(), report.false_negative_zs.end());

  // Madelung-oracle baseline on the artificial set (truth: all artificial)
  std::vector<std::pair<ElectronConfiguration, bool>> all_configs, ne_configs;
  for (const GeneratedPoint& p : gen.points) {
    all_configs.push_back({p.config, p.physical});
    if (!p.exact_match) ne_configs.push_back({p.config, p.physical});
  }
  report.oracle_accuracy_all =
      madelung_oracle_classify(all_configs, std::vector<bool>(all_configs.size(), false), table)
          .accuracy;
  report.oracle_accuracy_excl_exact =
      madelung_oracle_classify(ne_configs, std::vector<bool>(ne_configs.size(), false), table)
          .accuracy;

  // and on the real configurations (truth: all real)
  std::vector<std::pair<ElectronConfiguration, bool>> real_configs;
  for (const ElementRecord& rec : table.records()) real_configs.push_back({rec.config, true});
  report.oracle_real_accuracy =
      madelung_oracle_classify(real_configs, std::vector<bool>(real_configs.size(), true), table)
          .accuracy;
  return report;
}

DualRepReport run_dual_representation(const ElementTable& table, int duplication,
                                      std::uint64_t seed, int epochs) {
  feat::FeatureMatrix matrix = feat::transpose_for_variables(table, duplication);
  bvae::BvaeSpec spec = bvae::dense_bvae_spec(matrix.cols, {128, 16});
  nn::TrainConfig config;
  config.beta = 0.03;
  config.epochs = epochs;
  config.batch_size = 32;
  config.split_fraction = 0.67;
  config.seed = seed;
  config.granularity = nn::SplitGranularity::row;
  bvae::TrainedBvae model = bvae::train_bvae(matrix, spec, nn::OptimizerSpec::rmsprop(), config);

  DualRepReport report;
  report.seed = seed;
  // encode the 19 base rows (first duplication block)
  for (int o = 0; o < elements::kNumOrbitals; ++o) {
    std::vector<double> row(matrix.data.begin() + 1LL * o * matrix.cols,
                            matrix.data.begin() + 1LL * (o + 1) * matrix.cols);
    bvae::LatentPoint p = bvae::encode(model, row);
    report.orbital.push_back(elements::orbital_list()[o].name());
    report.x.push_back(p.mu[0]);
    report.y.push_back(p.mu[1]);
  }

  double cx = 0.0, cy = 0.0;
  for (int o = 0; o < 19; ++o) {
    cx += report.x[o];
    cy += report.y[o];
  }
  cx /= 19.0;
  cy /= 19.0;
  double spread = 0.0;
  for (int o = 0; o < 19; ++o)
    for (int p = o + 1; p < 19; ++p)
      spread = std::max(spread, std::hypot(report.x[o] - report.x[p], report.y[o] - report.y[p]));
  if (spread < 1e-6) {
    report.collapsed = true;
    return report;
  }

  constexpr double kTwoPi = 2.0 * 3.14159265358979323846;
  for (int o = 0; o < 19; ++o) {
    double a = std::atan2(report.y[o] - cy, report.x[o] - cx);
    if (a < 0) a += kTwoPi;
    report.angle.push_back(a);
  }

  // madelung rank per orbital (table order index -> rank in the sequence)
  std::vector<int> madelung_rank(19);
  for (int r = 0; r < 19; ++r)
    madelung_rank[elements::orbital_index(elements::madelung_sequence()[r])] = r;

  // orbitals in angular order
  std::vector<int> order(19);
  for (int o = 0; o < 19; ++o) order[o] = o;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return report.angle[a] < report.angle[b]; });

  double best = -2.0;
  std::vector<int> best_seq;
  for (int orientation = 0; orientation < 2; ++orientation) {
    std::vector<int> cyc = order;
    if (orientation) std::reverse(cyc.begin(), cyc.end());
    for (int shift = 0; shift < 19; ++shift) {
      std::vector<double> pos(19), rank(19);
      for (int s = 0; s < 19; ++s) {
        int o = cyc[(shift + s) % 19];
        pos[s] = s;
        rank[s] = madelung_rank[o];
      }
      double tau = latent::kendall_tau(pos, rank);
      if (tau > best) {
        best = tau;
        best_seq.resize(19);
        for (int s = 0; s < 19; ++s) best_seq[s] = cyc[(shift + s) % 19];
      }
    }
  }
  report.best_tau = best;
  report.exact_match = best >= 1.0 - 1e-12;
  for (int o : best_seq) report.angular_order.push_back(elements::orbital_list()[o].name());

  // angular gaps between Madelung-consecutive orbitals
  std::vector<std::pair<std::string, double>> gaps;
  for (int r = 0; r + 1 < 19; ++r) {
    int a = elements::orbital_index(elements::madelung_sequence()[r]);
    int b = elements::orbital_index(elements::madelung_sequence()[r + 1]);
    double d = std::abs(report.angle[a] - report.angle[b]);
    if (d > kTwoPi / 2) d = kTwoPi - d;
    gaps.push_back({elements::madelung_sequence()[r].name() + "-" +
                        elements::madelung_sequence()[r + 1].name(),
                    d});
  }
  std::stable_sort(gaps.begin(), gaps.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  report.gap_ranking = gaps;
  for (std::size_t g = 0; g < gaps.size(); ++g)
    if (gaps[g].first == "5s-4d") report.gap_rank_5s4d = static_cast<int>(g) + 1;
  return report;
}

MendeleevReport run_mendeleev_study(const ElementTable& table, int cutoff_year,
                                    const std::vector<std::string>& holdout_symbols,
                                    std::uint64_t seed, const nn::TrainConfig& train_config) {
  std::set<int> known;
  for (const ElementRecord& rec : table.records()) {
    if (!rec.discovery_year)
      throw std::invalid_argument("mendeleev study: missing discovery year for " + rec.symbol);
    if (*rec.discovery_year <= cutoff_year) known.insert(rec.z);
  }
  std::vector<int> holdout_zs;
  for (const std::string& sym : holdout_symbols) {
    bool found = false;
    for (const ElementRecord& rec : table.records())
      if (rec.symbol == sym) {
        if (known.count(rec.z))
          throw std::invalid_argument("mendeleev study: holdout " + sym +
                                      " is inside the training subset");
        holdout_zs.push_back(rec.z);
        found = true;
      }
    if (!found) throw std::invalid_argument("mendeleev study: unknown symbol " + sym);
  }

  ElementTable training = table.subset(known);
  feat::Recipe recipe;
  recipe.variant = feat::Variant::image28;
  recipe.norm = feat::NormMode::total;
  recipe.duplication = 100;
  feat::FeatureMatrix matrix = feat::build_feature_matrix(training, recipe);

  nn::TrainConfig config = train_config;
  config.seed = seed;
  bvae::TrainedBvae model =
      bvae::train_bvae(matrix, bvae::conv_bvae_spec(), nn::OptimizerSpec::adam(), config);

  latent::LatentMap known_map = latent::encode_elements(model, training);

  // the smallest symmetric delta with both neighbors known
  auto neighbor_delta = [&](int z) -> int {
    for (int d = 1; d < elements::kNumElements; ++d)
      if (known.count(z - d) && known.count(z + d)) return d;
    return 0;
  };
  auto midpoint_distance = [&](int z, double px, double py, int d) {
    int lo = known_map.index_of(z - d), hi = known_map.index_of(z + d);
    double mx = 0.5 * (known_map.xs[lo] + known_map.xs[hi]);
    double my = 0.5 * (known_map.ys[lo] + known_map.ys[hi]);
    return std::hypot(px - mx, py - my);
  };

  // null distribution over the training elements themselves
  std::vector<double> null_dist;
  for (int i = 0; i < known_map.size(); ++i) {
    int z = known_map.zs[i];
    int d = neighbor_delta(z);
    if (d == 0) continue;
    null_dist.push_back(midpoint_distance(z, known_map.xs[i], known_map.ys[i], d));
  }
  std::sort(null_dist.begin(), null_dist.end());

  MendeleevReport report;
  report.cutoff_year = cutoff_year;
  report.training_size = static_cast<int>(training.size());
  for (const ElementRecord& rec : training.records()) report.training_zs.push_back(rec.z);
  report.seed = seed;

  for (int z : holdout_zs) {
    const ElementRecord& rec = table.by_z(z);
    std::vector<double> feats = feat::featurize_one(rec, model.recipe, model.divisors);
    bvae::LatentPoint p = bvae::encode(model, feats);
    MendeleevHoldout h;
    h.z = z;
    h.symbol = rec.symbol;
    h.x = p.mu[0];
    h.y = p.mu[1];
    h.delta = neighbor_delta(z);
    if (h.delta == 0) throw std::runtime_error("mendeleev study: no symmetric neighbors for " +
                                               rec.symbol);
    h.midpoint_distance = midpoint_distance(z, h.x, h.y, h.delta);
    std::size_t below = std::upper_bound(null_dist.begin(), null_dist.end(),
                                         h.midpoint_distance) -
                        null_dist.begin();
    h.percentile = null_dist.empty() ? 100.0 : 100.0 * below / null_dist.size();
    report.holdouts.push_back(h);
  }
  return report;
}

}  // namespace elemvae::studies
