#pragma once

#include <map>
#include <string>
#include <vector>

#include "elemvae/bvae.hpp"
#include "elemvae/elements.hpp"
#include "elemvae/featurize.hpp"

namespace elemvae::latent {

using elements::ElementTable;

/// One latent mean per element, aligned vectors.
struct LatentMap {
  std::vector<int> zs;
  std::vector<double> xs, ys;
  std::vector<double> logvar1, logvar2;

  int size() const { return static_cast<int>(zs.size()); }
  int index_of(int z) const;
};

LatentMap encode_elements(const bvae::TrainedBvae& model, const ElementTable& table);

struct Point {
  double x = 0.0, y = 0.0;
};

enum class CenterMode { centroid, symmetry };

/// centroid: mean of all points. symmetry: least-squares intersection of the
/// perpendicular bisectors between the centroids of the period pairs (2,3),
/// (4,5), (6,7); falls back to the centroid when the bisectors are parallel.
Point estimate_center(const LatentMap& map, CenterMode mode, const ElementTable* table = nullptr);

struct PolarMap {
  Point center;
  std::vector<int> zs;
  std::vector<double> radius;
  std::vector<double> angle;  // [0, 2*pi)
};

PolarMap polar_transform(const LatentMap& map, Point center);

/// Mean silhouette coefficient (Euclidean) over all points; single-member
/// clusters and all-zero denominators contribute 0. Throws with fewer than
/// two distinct categories.
double category_separation(const LatentMap& map, const std::map<int, std::string>& labels);

struct OrderScore {
  std::map<int, double> per_period;  // |Kendall tau|, periods with >= 3 points
  double overall = 0.0;              // size-weighted mean
};

/// Kendall tau between atomic number and the angular order within each
/// period. The circle is cut at the largest angular gap of the period, which
/// makes the score rotation- and reflection-invariant.
OrderScore sequence_order_score(const LatentMap& map, const PolarMap& polar,
                                const ElementTable& table);

struct OutlierEntry {
  int z = 0;
  double score = 0.0;
};

struct OutlierReport {
  std::vector<OutlierEntry> ranked;  // descending score
  int k = 3;
};

/// score(z) = distance to the centroid of the k nearest same-period
/// neighbors, divided by the period's median of that distance. Periods
/// smaller than k+1 fall back to all available neighbors.
OutlierReport outlier_scores(const LatentMap& map, const ElementTable& table, int k = 3);

struct Bounds {
  double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
};

/// Bounding box of the map, each side padded by `pad` of its span.
Bounds map_bounds(const LatentMap& map, double pad = 0.10);

struct GridCell {
  int i = 0, j = 0;       // i indexes x, j indexes y
  double x = 0.0, y = 0.0;
  std::vector<double> decoded;
  feat::RealignedGrid rounded;
  bool physical = false;
  elements::ElectronConfiguration config;  // meaningful when physical
  int z_estimate = 0;                      // sum of rounded cells
};

struct GridDecode {
  Bounds bounds;
  int n = 0;
  std::vector<GridCell> cells;  // row-major over (i, j)
};

/// Decode an n x n grid of latent points (batched through the decoder).
GridDecode decode_grid(const bvae::TrainedBvae& model, const Bounds& bounds, int n = 50);

double kendall_tau(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace elemvae::latent
