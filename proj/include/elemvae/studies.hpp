#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "elemvae/bvae.hpp"
#include "elemvae/latent.hpp"

namespace elemvae::studies {

using elements::ElectronConfiguration;
using elements::ElementTable;

// ---------------------------------------------------------------- generation

struct FilterBand {
  double lo = 0.2;
  double hi = 0.7;
  double sigma_scale = 1.0;  // sigma of the latent prior
};

struct GeneratedPoint {
  int i = 0, j = 0;
  double x = 0.0, y = 0.0;
  double nearest_real = 0.0;  // distance to the closest encoded element
  std::vector<double> decoded;
  feat::RealignedGrid rounded;
  bool physical = false;
  ElectronConfiguration config;  // meaningful when physical
  bool exact_match = false;      // rounded image equals a real element's image
};

struct GeneratedSet {
  FilterBand band;
  std::vector<GeneratedPoint> points;  // deduplicated by rounded image
  int before_dedup = 0;
};

/// Keep grid nodes whose nearest-real distance lies in [lo, hi]*sigma,
/// deduplicate by rounded image (first occurrence in row-major order wins)
/// and flag exact matches against the real images.
GeneratedSet generate_candidates(const latent::GridDecode& grid, const latent::LatentMap& real_map,
                                 const FilterBand& band, const ElementTable& table);

/// Real-like under the Madelung oracle: the configuration is physical and
/// either follows the fill rule or equals an actual element's configuration
/// (nature's own violations). Set `actual_disjunction=false` for the pure
/// rule.
bool oracle_real_like(const ElectronConfiguration& config, bool physical,
                      const ElementTable& table, bool actual_disjunction = true);

struct OracleResult {
  std::vector<bool> real_like;
  double accuracy = 0.0;  // against the supplied ground truth
};

OracleResult madelung_oracle_classify(
    const std::vector<std::pair<ElectronConfiguration, bool>>& configs,
    const std::vector<bool>& truth_is_real, const ElementTable& table,
    bool actual_disjunction = true);

// ------------------------------------------------------------ classification

/// conv(16,3x3,s(2,1)) conv(8,3x3,s(2,1)) pool(2,4) dropout(.25) flatten
/// dense(2, sigmoid); the appendix 3x3 pool is ill-formed on a 2x4 map, the
/// (2,4) pool reproduces its Flatten(8).
nn::NetworkSpec classifier_spec();

struct ClassificationDataset {
  nn::Tensor x;          // (rows, 7, 4, 1)
  nn::Tensor y;          // (rows, 2) one-hot: column 0 = real
  std::vector<int> is_real;     // per row
  std::vector<int> entity;      // z for real rows, generated index for artificial
  nn::Split split;              // stratified 60/40 by class
};

ClassificationDataset build_classification_dataset(const ElementTable& table,
                                                   const GeneratedSet& generated,
                                                   const std::vector<double>& divisors,
                                                   std::uint64_t seed);

struct StudyReport {
  int real_rows = 0;
  int artificial_rows = 0;
  int exact_matches = 0;
  double test_accuracy = 0.0;
  double artificial_accuracy = 0.0;                  // recall on artificial, test split
  double artificial_accuracy_excl_exact = 0.0;       // ditto, exact matches removed
  std::vector<int> false_negative_zs;                // real elements classified artificial (test)
  int false_positives = 0;                           // artificial classified real (test)
  double oracle_accuracy_all = 0.0;                  // Madelung oracle on all artificial points
  double oracle_accuracy_excl_exact = 0.0;           // ditto, exact matches removed
  double oracle_real_accuracy = 0.0;                 // oracle on the 118 real configurations
  FilterBand band;
  std::uint64_t seed = 0;
  int epochs = 0;
};

StudyReport run_classification_study(const ElementTable& table, const bvae::TrainedBvae& model,
                                     const FilterBand& band, std::uint64_t seed,
                                     int classifier_epochs = 400, int grid_n = 50);

// --------------------------------------------------------------------- dual

struct DualRepReport {
  std::vector<std::string> orbital;   // 19 names in table order
  std::vector<double> x, y;           // latent means
  std::vector<double> angle;          // about the centroid
  double best_tau = 0.0;
  bool exact_match = false;
  bool collapsed = false;             // all points within 1e-6
  std::vector<std::string> angular_order;  // best alignment, Madelung-forward
  // gaps between Madelung-consecutive orbitals, ranked descending
  std::vector<std::pair<std::string, double>> gap_ranking;
  int gap_rank_5s4d = 0;  // 1-based rank of the 5s-4d gap
  std::uint64_t seed = 0;
};

/// Train the 118-input dense model on the transposed matrix, place the 19
/// orbitals on the latent plane and align their angular order with the
/// Madelung sequence (all 19 rotations x 2 orientations).
DualRepReport run_dual_representation(const ElementTable& table, int duplication,
                                      std::uint64_t seed, int epochs = 60);

// ---------------------------------------------------------------- mendeleev

struct MendeleevHoldout {
  int z = 0;
  std::string symbol;
  double x = 0.0, y = 0.0;
  int delta = 0;            // neighbors are z-delta and z+delta
  double midpoint_distance = 0.0;
  double percentile = 0.0;  // against the training elements' statistic
};

struct MendeleevReport {
  int cutoff_year = 1869;
  int training_size = 0;
  std::vector<int> training_zs;
  std::vector<MendeleevHoldout> holdouts;
  std::uint64_t seed = 0;
};

/// Train on the elements known by the cutoff year, then encode the held-out
/// elements with frozen parameters and measure how close each lands to the
/// midpoint of its nearest known atomic-number neighbors (z-d, z+d with the
/// smallest d present in training).
MendeleevReport run_mendeleev_study(const ElementTable& table, int cutoff_year,
                                    const std::vector<std::string>& holdout_symbols,
                                    std::uint64_t seed, const nn::TrainConfig& train_config);

}  // namespace elemvae::studies
