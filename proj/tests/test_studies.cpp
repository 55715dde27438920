#include <doctest.h>

#include "elemvae/studies.hpp"

using namespace elemvae;
using namespace elemvae::studies;

namespace {
const elements::ElementTable& table() {
  static elements::ElementTable t = elements::ElementTable::load_file("data/elements.csv");
  return t;
}

latent::GridCell cell_at(double x, double y, const feat::RealignedGrid& img) {
  latent::GridCell c;
  c.x = x;
  c.y = y;
  c.rounded = img;
  c.decoded.assign(28, 0.0);
  if (auto cfg = feat::grid_to_config(img)) {
    c.physical = true;
    c.config = *cfg;
  }
  c.z_estimate = img.total();
  return c;
}
}  // namespace

TEST_CASE("classifier_spec: shape chain 7x4x1 -> ... -> Flatten(8) -> 2") {
  nn::NetworkSpec spec = classifier_spec();
  auto shapes = nn::shape_of(spec);
  CHECK(shapes[0] == std::vector<int>{4, 4, 16});
  CHECK(shapes[1] == std::vector<int>{2, 4, 8});
  CHECK(shapes[2] == std::vector<int>{1, 1, 8});
  CHECK(shapes[4] == std::vector<int>{8});
  CHECK(shapes.back() == std::vector<int>{2});
}

TEST_CASE("generate_candidates: band filter, dedup, exact matches") {
  latent::LatentMap real;
  real.zs = {1};
  real.xs = {0.0};
  real.ys = {0.0};
  real.logvar1 = {0};
  real.logvar2 = {0};

  feat::RealignedGrid h_img = feat::realign_subshells(table().by_z(1).config);
  feat::RealignedGrid other;
  other.at(1, feat::Subshell::s) = 2;  // not any element's image: 1d is unphysical
  other.at(1, feat::Subshell::d) = 3;
  feat::RealignedGrid third;
  third.at(1, feat::Subshell::s) = 1;
  third.at(2, feat::Subshell::s) = 2;  // li-like

  latent::GridDecode grid;
  grid.n = 2;
  grid.cells = {
      cell_at(0.05, 0.0, h_img),   // too close -> dropped
      cell_at(0.3, 0.0, h_img),    // kept, exact match with H
      cell_at(0.0, 0.5, other),    // kept
      cell_at(0.5, 0.0, other),    // duplicate image -> deduped
      cell_at(0.0, 0.9, third),    // too far -> dropped
  };

  FilterBand band;  // [0.2, 0.7] * sigma
  GeneratedSet gen = generate_candidates(grid, real, band, table());
  CHECK(gen.before_dedup == 3);
  CHECK(gen.points.size() == 2);
  for (const GeneratedPoint& p : gen.points) {
    CHECK(p.nearest_real >= band.lo);
    CHECK(p.nearest_real <= band.hi);
  }
  CHECK(gen.points[0].exact_match);
  CHECK_FALSE(gen.points[1].exact_match);
  // no two members share a rounded image
  CHECK_FALSE(gen.points[0].rounded == gen.points[1].rounded);

  FilterBand empty_band;
  empty_band.lo = 0.0;
  empty_band.hi = 1e-9;
  GeneratedSet none = generate_candidates(grid, real, empty_band, table());
  CHECK(none.points.empty());

  FilterBand bad;
  bad.lo = 0.5;
  bad.hi = 0.2;
  CHECK_THROWS(generate_candidates(grid, real, bad, table()));
}

TEST_CASE("madelung oracle: real configurations are always real-like") {
  std::vector<std::pair<elements::ElectronConfiguration, bool>> configs;
  for (const elements::ElementRecord& rec : table().records())
    configs.push_back({rec.config, true});
  OracleResult res =
      madelung_oracle_classify(configs, std::vector<bool>(configs.size(), true), table());
  CHECK(res.accuracy == 1.0);

  // rule-made configurations are real-like by construction
  for (int z : {5, 24, 57, 103})
    CHECK(oracle_real_like(elements::madelung_fill(z), true, table()));

  // pure-rule mode flags nature's violators
  CHECK(oracle_real_like(table().by_z(24).config, true, table(), true));
  CHECK_FALSE(oracle_real_like(table().by_z(24).config, true, table(), false));

  // a non-physical image is never real-like
  CHECK_FALSE(oracle_real_like(elements::ElectronConfiguration{}, false, table()));

  // an off-rule configuration that matches no element is artificial
  elements::ElectronConfiguration odd;
  odd.set({1, elements::Subshell::s}, 1);
  odd.set({2, elements::Subshell::p}, 1);
  CHECK_FALSE(oracle_real_like(odd, true, table()));
}

TEST_CASE("build_classification_dataset: rows, labels, stratified split") {
  feat::RealignedGrid g1;
  g1.at(1, feat::Subshell::s) = 2;
  feat::RealignedGrid g2;
  g2.at(1, feat::Subshell::s) = 1;
  g2.at(2, feat::Subshell::s) = 2;
  GeneratedSet gen;
  gen.points.resize(40);
  for (int i = 0; i < 40; ++i) {
    gen.points[i].rounded = i % 2 ? g1 : g2;
    gen.points[i].exact_match = false;
  }
  std::vector<double> divisors(28, 14.0);
  ClassificationDataset ds = build_classification_dataset(table(), gen, divisors, 5);
  CHECK(ds.x.shape == std::vector<int>{158, 7, 4, 1});
  int real_train = 0, art_train = 0;
  for (int r : ds.split.train_rows) (ds.is_real[r] ? real_train : art_train)++;
  CHECK(real_train == 71);  // round(0.6 * 118)
  CHECK(art_train == 24);   // round(0.6 * 40)
  // real rows carry the original normalized images
  feat::RealignedGrid h = feat::realign_subshells(table().by_z(1).config);
  for (int c = 0; c < 28; ++c) CHECK(ds.x.data[c] == h.cells[c] / 14.0);
  CHECK(ds.y.data[0] == 1.0);
  CHECK(ds.y.data[1] == 0.0);

  ClassificationDataset ds2 = build_classification_dataset(table(), gen, divisors, 5);
  CHECK(ds2.split.train_rows == ds.split.train_rows);  // deterministic under seed
}

TEST_CASE("dual representation report on a quick run") {
  DualRepReport rep = run_dual_representation(table(), 20, 11, 8);
  CHECK(rep.orbital.size() == 19);
  CHECK(rep.angular_order.size() == 19);
  CHECK(rep.gap_ranking.size() == 18);
  CHECK(rep.best_tau >= -1.0);
  CHECK(rep.best_tau <= 1.0);
  CHECK(rep.gap_rank_5s4d >= 1);
  CHECK_FALSE(rep.collapsed);
  // gaps ranked descending
  for (std::size_t i = 1; i < rep.gap_ranking.size(); ++i)
    CHECK(rep.gap_ranking[i - 1].second >= rep.gap_ranking[i].second);
}
