#include <doctest.h>

#include <cmath>

#include "elemvae/latent.hpp"

using namespace elemvae;
using namespace elemvae::latent;

namespace {
constexpr double kPi = 3.14159265358979323846;

const elements::ElementTable& table() {
  static elements::ElementTable t = elements::ElementTable::load_file("data/elements.csv");
  return t;
}

LatentMap make_map(const std::vector<std::pair<double, double>>& pts,
                   const std::vector<int>& zs = {}) {
  LatentMap m;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    m.zs.push_back(zs.empty() ? static_cast<int>(i + 1) : zs[i]);
    m.xs.push_back(pts[i].first);
    m.ys.push_back(pts[i].second);
    m.logvar1.push_back(0);
    m.logvar2.push_back(0);
  }
  return m;
}
}  // namespace

TEST_CASE("estimate_center: centroid and overrides") {
  LatentMap m = make_map({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  Point c = estimate_center(m, CenterMode::centroid);
  CHECK(c.x == doctest::Approx(0.5));
  CHECK(c.y == doctest::Approx(0.5));
  LatentMap tiny = make_map({{0, 0}, {1, 1}});
  CHECK_THROWS(estimate_center(tiny, CenterMode::centroid));
}

TEST_CASE("estimate_center: symmetry mode agrees on a mirror-symmetric map") {
  // periods 2/3 mirrored across x=0; periods 4/5 and 6/7 mirrored across y=0;
  // every pair balances so the centroid is the origin too
  std::vector<std::pair<double, double>> pts = {
      {-1.0, 0.6},  {-1.2, -0.6},  // period 2
      {1.0, 0.6},   {1.2, -0.6},   // period 3 (mirror in x)
      {0.4, -1.0},  {-0.4, -1.3},  // period 4
      {0.4, 1.0},   {-0.4, 1.3},   // period 5 (mirror in y)
      {1.5, -1.5},  {-1.5, -1.5},  // period 6
      {1.5, 1.5},   {-1.5, 1.5},   // period 7
  };
  // borrow real atomic numbers with those periods
  std::vector<int> zs = {3, 4, 11, 12, 19, 20, 37, 38, 55, 56, 87, 88};
  LatentMap m = make_map(pts, zs);
  Point c1 = estimate_center(m, CenterMode::centroid);
  Point c2 = estimate_center(m, CenterMode::symmetry, &table());
  CHECK(std::hypot(c1.x - c2.x, c1.y - c2.y) < 1e-6);
}

TEST_CASE("polar transform: conventions and round trip") {
  LatentMap m = make_map({{2.0, 1.0}, {1.0, 3.0}, {1.0, 1.0}});
  Point center{1.0, 1.0};
  PolarMap p = polar_transform(m, center);
  CHECK(p.radius[0] == doctest::Approx(1.0));
  CHECK(p.angle[0] == doctest::Approx(0.0));
  CHECK(p.radius[1] == doctest::Approx(2.0));
  CHECK(p.angle[1] == doctest::Approx(kPi / 2));
  CHECK(p.radius[2] == 0.0);  // at the center
  CHECK(p.angle[2] == 0.0);
  for (int i = 0; i < m.size(); ++i) {
    double x = center.x + p.radius[i] * std::cos(p.angle[i]);
    double y = center.y + p.radius[i] * std::sin(p.angle[i]);
    CHECK(std::fabs(x - m.xs[i]) < 1e-12);
    CHECK(std::fabs(y - m.ys[i]) < 1e-12);
  }
}

TEST_CASE("category_separation: silhouette behavior") {
  // two tight, far clusters
  std::vector<std::pair<double, double>> pts;
  std::map<int, std::string> labels;
  std::vector<int> zs;
  int z = 1;
  for (int i = 0; i < 10; ++i, ++z) {
    pts.push_back({0.001 * i, 0.0});
    labels[z] = "a";
    zs.push_back(z);
  }
  for (int i = 0; i < 10; ++i, ++z) {
    pts.push_back({10.0 + 0.001 * i, 0.0});
    labels[z] = "b";
    zs.push_back(z);
  }
  LatentMap m = make_map(pts, zs);
  double tight = category_separation(m, labels);
  CHECK(tight > 0.9);

  // identical points, two labels: degenerate, defined as 0
  LatentMap same = make_map({{1, 1}, {1, 1}, {1, 1}, {1, 1}}, {1, 2, 3, 4});
  std::map<int, std::string> two = {{1, "a"}, {2, "a"}, {3, "b"}, {4, "b"}};
  CHECK(category_separation(same, two) == doctest::Approx(0.0));

  // single category: error
  std::map<int, std::string> one;
  for (int i : zs) one[i] = "a";
  CHECK_THROWS(category_separation(m, one));

  // random label permutations score near zero on average
  nn::Rng rng(17);
  double sum = 0.0;
  std::vector<std::string> pool;
  for (int i : zs) pool.push_back(labels[i]);
  for (int trial = 0; trial < 200; ++trial) {
    rng.shuffle(pool);
    std::map<int, std::string> perm;
    for (std::size_t i = 0; i < zs.size(); ++i) perm[zs[i]] = pool[i];
    sum += category_separation(m, perm);
  }
  CHECK(std::fabs(sum / 200.0) < 0.25);

  // invariant under translation, rotation, uniform scaling
  double a = 0.7;
  LatentMap moved = m;
  for (int i = 0; i < m.size(); ++i) {
    double x = m.xs[i], y = m.ys[i];
    moved.xs[i] = 3.0 * (x * std::cos(a) - y * std::sin(a)) + 11.0;
    moved.ys[i] = 3.0 * (x * std::sin(a) + y * std::cos(a)) - 4.0;
  }
  CHECK(category_separation(moved, labels) == doctest::Approx(tight).epsilon(1e-9));
}

TEST_CASE("sequence_order_score: ring ordering") {
  // period 2 elements (z = 3..10) placed in order along an arc
  std::vector<std::pair<double, double>> pts;
  std::vector<int> zs;
  for (int i = 0; i < 8; ++i) {
    double ang = 0.3 + 0.25 * i;
    pts.push_back({std::cos(ang), std::sin(ang)});
    zs.push_back(3 + i);
  }
  LatentMap m = make_map(pts, zs);
  PolarMap p = polar_transform(m, {0, 0});
  OrderScore s = sequence_order_score(m, p, table());
  CHECK(s.per_period.at(2) == doctest::Approx(1.0));
  CHECK(s.overall == doctest::Approx(1.0));

  // reversed order scores the same (orientation-agnostic)
  std::reverse(m.xs.begin(), m.xs.end());
  std::reverse(m.ys.begin(), m.ys.end());
  PolarMap pr = polar_transform(m, {0, 0});
  OrderScore sr = sequence_order_score(m, pr, table());
  CHECK(sr.per_period.at(2) == doctest::Approx(1.0));

  // the arc crossing the 0/2pi seam must not break the order
  LatentMap wrap = m;
  for (int i = 0; i < wrap.size(); ++i) {
    double ang = -0.4 + 0.2 * i;  // starts below zero
    wrap.xs[i] = std::cos(ang);
    wrap.ys[i] = std::sin(ang);
  }
  PolarMap pw = polar_transform(wrap, {0, 0});
  CHECK(sequence_order_score(wrap, pw, table()).per_period.at(2) == doctest::Approx(1.0));

  // random placement scores low on average
  nn::Rng rng(23);
  double sum = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    LatentMap r = m;
    for (int i = 0; i < r.size(); ++i) {
      r.xs[i] = rng.uniform(-1, 1);
      r.ys[i] = rng.uniform(-1, 1);
    }
    PolarMap prr = polar_transform(r, {0, 0});
    sum += sequence_order_score(r, prr, table()).per_period.at(2);
  }
  CHECK(sum / 100.0 < 0.45);
}

TEST_CASE("outlier_scores: displaced point ranks first, scale invariance") {
  // period 2: eight tight points, one displaced far away
  std::vector<std::pair<double, double>> pts;
  std::vector<int> zs;
  for (int i = 0; i < 7; ++i) {
    pts.push_back({0.1 * i, 0.05 * (i % 2)});
    zs.push_back(3 + i);
  }
  pts.push_back({10.0, 10.0});  // z = 10 displaced
  zs.push_back(10);
  LatentMap m = make_map(pts, zs);
  OutlierReport r = outlier_scores(m, table());
  CHECK(r.ranked.front().z == 10);
  CHECK(r.ranked.front().score > r.ranked.back().score);
  for (std::size_t i = 1; i < r.ranked.size(); ++i)
    CHECK(r.ranked[i - 1].score >= r.ranked[i].score);

  LatentMap scaled = m;
  for (int i = 0; i < m.size(); ++i) {
    scaled.xs[i] *= 42.0;
    scaled.ys[i] *= 42.0;
  }
  OutlierReport r2 = outlier_scores(scaled, table());
  for (const OutlierEntry& e : r.ranked) {
    double other = -1.0;
    for (const OutlierEntry& e2 : r2.ranked)
      if (e2.z == e.z) other = e2.score;
    CHECK(other == doctest::Approx(e.score).epsilon(1e-9));
  }
  CHECK(r2.ranked.front().z == 10);

  // all points equal: all scores zero
  LatentMap flat = make_map({{1, 1}, {1, 1}, {1, 1}, {1, 1}, {1, 1}}, {3, 4, 5, 6, 7});
  for (const OutlierEntry& e : outlier_scores(flat, table()).ranked) CHECK(e.score == 0.0);
}

TEST_CASE("map_bounds pads the bounding box") {
  LatentMap m = make_map({{0, 0}, {2, 4}});
  Bounds b = map_bounds(m, 0.1);
  CHECK(b.xmin == doctest::Approx(-0.2));
  CHECK(b.xmax == doctest::Approx(2.2));
  CHECK(b.ymin == doctest::Approx(-0.4));
  CHECK(b.ymax == doctest::Approx(4.4));
}
