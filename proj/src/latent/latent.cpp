#include "elemvae/latent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace elemvae::latent {

namespace {
constexpr double kTwoPi = 2.0 * 3.14159265358979323846;
}

int LatentMap::index_of(int z) const {
  for (int i = 0; i < size(); ++i)
    if (zs[i] == z) return i;
  return -1;
}

LatentMap encode_elements(const bvae::TrainedBvae& model, const ElementTable& table) {
  LatentMap map;
  for (const elements::ElementRecord& rec : table.records()) {
    std::vector<double> feats = feat::featurize_one(rec, model.recipe, model.divisors);
    bvae::LatentPoint p = bvae::encode(model, feats);
    map.zs.push_back(rec.z);
    map.xs.push_back(p.mu[0]);
    map.ys.push_back(p.mu[1]);
    map.logvar1.push_back(p.logvar[0]);
    map.logvar2.push_back(p.logvar[1]);
  }
  return map;
}

Point estimate_center(const LatentMap& map, CenterMode mode, const ElementTable* table) {
  if (map.size() < 3) throw std::invalid_argument("estimate_center: needs at least 3 points");
  Point centroid;
  for (int i = 0; i < map.size(); ++i) {
    centroid.x += map.xs[i];
    centroid.y += map.ys[i];
  }
  centroid.x /= map.size();
  centroid.y /= map.size();
  if (mode == CenterMode::centroid) return centroid;

  if (!table) throw std::invalid_argument("estimate_center: symmetry mode needs the element table");
  // period centroids
  std::map<int, Point> sums;
  std::map<int, int> counts;
  for (int i = 0; i < map.size(); ++i) {
    int period = table->by_z(map.zs[i]).period;
    sums[period].x += map.xs[i];
    sums[period].y += map.ys[i];
    counts[period]++;
  }
  // least squares point for the pair bisector lines: minimize
  // sum_i (n_i . (p - m_i))^2 with n_i the pair direction, m_i the midpoint
  double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
  int pairs_used = 0;
  for (auto [lo, hi] : {std::pair{2, 3}, std::pair{4, 5}, std::pair{6, 7}}) {
    if (!counts.count(lo) || !counts.count(hi)) continue;
    Point c1{sums[lo].x / counts[lo], sums[lo].y / counts[lo]};
    Point c2{sums[hi].x / counts[hi], sums[hi].y / counts[hi]};
    double nx = c2.x - c1.x, ny = c2.y - c1.y;
    double len = std::hypot(nx, ny);
    if (len < 1e-12) continue;
    nx /= len;
    ny /= len;
    double mx = 0.5 * (c1.x + c2.x), my = 0.5 * (c1.y + c2.y);
    a11 += nx * nx;
    a12 += nx * ny;
    a22 += ny * ny;
    double rhs = nx * mx + ny * my;
    b1 += nx * rhs;
    b2 += ny * rhs;
    ++pairs_used;
  }
  double det = a11 * a22 - a12 * a12;
  if (pairs_used < 2 || std::abs(det) < 1e-9 * (a11 + a22) * (a11 + a22)) return centroid;
  return {(a22 * b1 - a12 * b2) / det, (a11 * b2 - a12 * b1) / det};
}

PolarMap polar_transform(const LatentMap& map, Point center) {
  PolarMap polar;
  polar.center = center;
  polar.zs = map.zs;
  for (int i = 0; i < map.size(); ++i) {
    double dx = map.xs[i] - center.x, dy = map.ys[i] - center.y;
    double r = std::hypot(dx, dy);
    double a = r == 0.0 ? 0.0 : std::atan2(dy, dx);
    if (a < 0.0) a += kTwoPi;
    if (a >= kTwoPi) a = 0.0;
    polar.radius.push_back(r);
    polar.angle.push_back(a);
  }
  return polar;
}

double category_separation(const LatentMap& map, const std::map<int, std::string>& labels) {
  int n = map.size();
  std::vector<std::string> cat(n);
  std::vector<std::string> distinct;
  for (int i = 0; i < n; ++i) {
    auto it = labels.find(map.zs[i]);
    if (it == labels.end())
      throw std::invalid_argument("category_separation: missing label for z=" +
                                  std::to_string(map.zs[i]));
    cat[i] = it->second;
    if (std::find(distinct.begin(), distinct.end(), cat[i]) == distinct.end())
      distinct.push_back(cat[i]);
  }
  if (distinct.size() < 2)
    throw std::invalid_argument("category_separation: needs at least two categories");

  auto dist = [&](int i, int j) {
    return std::hypot(map.xs[i] - map.xs[j], map.ys[i] - map.ys[j]);
  };
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double own_sum = 0.0;
    int own_count = 0;
    std::map<std::string, std::pair<double, int>> other;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      if (cat[j] == cat[i]) {
        own_sum += dist(i, j);
        ++own_count;
      } else {
        auto& [s, c] = other[cat[j]];
        s += dist(i, j);
        ++c;
      }
    }
    if (own_count == 0 || other.empty()) continue;  // contributes 0
    double a = own_sum / own_count;
    double b = std::numeric_limits<double>::infinity();
    for (const auto& [name, sc] : other) b = std::min(b, sc.first / sc.second);
    double denom = std::max(a, b);
    if (denom > 0.0) total += (b - a) / denom;
  }
  return total / n;
}

double kendall_tau(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("kendall_tau: need two aligned vectors of size >= 2");
  long long concordant = 0, discordant = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      double da = a[i] - a[j], db = b[i] - b[j];
      double prod = da * db;
      if (prod > 0) ++concordant;
      else if (prod < 0) ++discordant;
    }
  double pairs = 0.5 * static_cast<double>(a.size()) * (a.size() - 1);
  return (concordant - discordant) / pairs;
}

OrderScore sequence_order_score(const LatentMap& map, const PolarMap& polar,
                                const ElementTable& table) {
  if (polar.zs != map.zs) throw std::invalid_argument("sequence_order_score: map/polar mismatch");
  std::map<int, std::vector<int>> by_period;  // period -> indices
  for (int i = 0; i < map.size(); ++i) by_period[table.by_z(map.zs[i]).period].push_back(i);

  OrderScore score;
  double weight_sum = 0.0;
  for (const auto& [period, idx] : by_period) {
    if (idx.size() < 3) continue;
    // cut the circle at the largest angular gap so the order is linear
    std::vector<int> sorted = idx;
    std::sort(sorted.begin(), sorted.end(),
              [&](int a, int b) { return polar.angle[a] < polar.angle[b]; });
    std::size_t m = sorted.size();
    double best_gap = -1.0;
    std::size_t cut = 0;
    for (std::size_t s = 0; s < m; ++s) {
      double a0 = polar.angle[sorted[s]];
      double a1 = polar.angle[sorted[(s + 1) % m]] + (s + 1 == m ? kTwoPi : 0.0);
      if (a1 - a0 > best_gap) {
        best_gap = a1 - a0;
        cut = (s + 1) % m;
      }
    }
    std::vector<double> zv, rank;
    for (std::size_t s = 0; s < m; ++s) {
      int i = sorted[(cut + s) % m];
      zv.push_back(map.zs[i]);
      rank.push_back(static_cast<double>(s));
    }
    double tau = std::abs(kendall_tau(zv, rank));
    score.per_period[period] = tau;
    score.overall += tau * static_cast<double>(m);
    weight_sum += static_cast<double>(m);
  }
  if (weight_sum > 0.0) score.overall /= weight_sum;
  return score;
}

OutlierReport outlier_scores(const LatentMap& map, const ElementTable& table, int k) {
  if (k < 1) throw std::invalid_argument("outlier_scores: k must be >= 1");
  std::map<int, std::vector<int>> by_period;
  for (int i = 0; i < map.size(); ++i) by_period[table.by_z(map.zs[i]).period].push_back(i);

  std::vector<double> raw(map.size(), 0.0);
  for (const auto& [period, idx] : by_period) {
    std::vector<double> dists;
    for (int i : idx) {
      int kk = std::min<int>(k, static_cast<int>(idx.size()) - 1);
      if (kk < 1) {
        raw[i] = 0.0;
        continue;
      }
      std::vector<std::pair<double, int>> neigh;
      for (int j : idx) {
        if (j == i) continue;
        neigh.push_back({std::hypot(map.xs[i] - map.xs[j], map.ys[i] - map.ys[j]), j});
      }
      std::sort(neigh.begin(), neigh.end());
      double cx = 0.0, cy = 0.0;
      for (int t = 0; t < kk; ++t) {
        cx += map.xs[neigh[t].second];
        cy += map.ys[neigh[t].second];
      }
      cx /= kk;
      cy /= kk;
      raw[i] = std::hypot(map.xs[i] - cx, map.ys[i] - cy);
    }
    // normalize by the period's median distance
    std::vector<double> period_raw;
    for (int i : idx) period_raw.push_back(raw[i]);
    std::sort(period_raw.begin(), period_raw.end());
    double median = period_raw.empty()
                        ? 0.0
                        : (period_raw.size() % 2 ? period_raw[period_raw.size() / 2]
                                                 : 0.5 * (period_raw[period_raw.size() / 2 - 1] +
                                                          period_raw[period_raw.size() / 2]));
    for (int i : idx) raw[i] = raw[i] == 0.0 ? 0.0 : raw[i] / std::max(median, 1e-12);
    (void)dists;
  }

  OutlierReport report;
  report.k = k;
  for (int i = 0; i < map.size(); ++i) report.ranked.push_back({map.zs[i], raw[i]});
  std::stable_sort(report.ranked.begin(), report.ranked.end(),
                   [](const OutlierEntry& a, const OutlierEntry& b) { return a.score > b.score; });
  return report;
}

Bounds map_bounds(const LatentMap& map, double pad) {
  if (map.size() == 0) throw std::invalid_argument("map_bounds: empty map");
  Bounds b;
  b.xmin = *std::min_element(map.xs.begin(), map.xs.end());
  b.xmax = *std::max_element(map.xs.begin(), map.xs.end());
  b.ymin = *std::min_element(map.ys.begin(), map.ys.end());
  b.ymax = *std::max_element(map.ys.begin(), map.ys.end());
  double dx = (b.xmax - b.xmin) * pad, dy = (b.ymax - b.ymin) * pad;
  b.xmin -= dx;
  b.xmax += dx;
  b.ymin -= dy;
  b.ymax += dy;
  return b;
}

GridDecode decode_grid(const bvae::TrainedBvae& model, const Bounds& bounds, int n) {
  if (n < 2) throw std::invalid_argument("decode_grid: n must be >= 2");
  GridDecode grid;
  grid.bounds = bounds;
  grid.n = n;

  nn::Tensor z({n * n, bvae::kLatentDim});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double x = bounds.xmin + (bounds.xmax - bounds.xmin) * i / (n - 1);
      double y = bounds.ymin + (bounds.ymax - bounds.ymin) * j / (n - 1);
      z.data[(1LL * i * n + j) * 2 + 0] = x;
      z.data[(1LL * i * n + j) * 2 + 1] = y;
    }
  nn::ForwardTrace td = nn::forward(model.spec.decoder, model.params.decoder, z, nn::Mode::eval);
  const nn::Tensor& out = td.output();
  long long stride = out.numel() / out.shape[0];

  bool image_model = model.recipe.variant == feat::Variant::image28 &&
                     !model.recipe.transposed && model.recipe.period == feat::PeriodMode::none;
  grid.cells.resize(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      GridCell& cell = grid.cells[static_cast<std::size_t>(i) * n + j];
      cell.i = i;
      cell.j = j;
      cell.x = z.data[(1LL * i * n + j) * 2 + 0];
      cell.y = z.data[(1LL * i * n + j) * 2 + 1];
      cell.decoded.assign(out.ptr() + (1LL * i * n + j) * stride,
                          out.ptr() + (1LL * i * n + j + 1) * stride);
      if (image_model) {
        cell.rounded = feat::round_decoded_image(cell.decoded, model.divisors);
        cell.z_estimate = cell.rounded.total();
        if (std::optional<elements::ElectronConfiguration> cfg =
                feat::grid_to_config(cell.rounded)) {
          cell.physical = true;
          cell.config = *cfg;
        }
      } else {
        // generic feature vector: denormalize, round, clamp to the column max
        double total = 0.0;
        for (std::size_t c = 0; c < cell.decoded.size() && c < model.divisors.size(); ++c) {
          double raw = cell.decoded[c] * model.divisors[c];
          double v = std::nearbyint(raw);
          total += std::clamp(v, 0.0, model.divisors[c]);
        }
        cell.z_estimate = static_cast<int>(total);
      }
    }
  return grid;
}

}  // namespace elemvae::latent
