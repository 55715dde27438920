#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "elemvae/elements.hpp"
#include "elemvae/nn/tensor.hpp"

namespace elemvae::feat {

using elements::ElectronConfiguration;
using elements::ElementRecord;
using elements::ElementTable;
using elements::Subshell;

/// 7x4 grid of occupancies realigned toward the valence orbitals.
/// Row 1 is the outermost (valence) shell, rows grow inward; columns are
/// the subshells s, p, d, f.
struct RealignedGrid {
  std::array<int, 28> cells{};  // row-major, row 1 first

  int& at(int row, Subshell l) { return cells[(row - 1) * 4 + static_cast<int>(l)]; }
  int at(int row, Subshell l) const { return cells[(row - 1) * 4 + static_cast<int>(l)]; }
  int total() const;
  /// deepest non-empty row, 0 for the empty grid; equals the element's
  /// period for grids produced from real configurations
  int depth() const;

  bool operator==(const RealignedGrid&) const = default;
};

/// The nine cells that can never be occupied by a physical configuration:
/// (2,d) (2,f) (3,f) (5,f) (6,d) (6,f) (7,p) (7,d) (7,f), as flat indices.
const std::array<int, 9>& structurally_empty_cells();

/// Shell totals reversed so the outermost occupied shell comes first.
std::array<int, 7> realign_shells(const ElectronConfiguration& config);

/// Realign toward valence orbitals: with N the element's period, the
/// occupied orbitals among {Ns, Np, (N-1)d, (N-2)f} form row 1 (keeping the
/// subshell column); every other occupied orbital (n,l) lands in row N-n+1.
RealignedGrid realign_subshells(const ElectronConfiguration& config);

/// Inverse of realign_subshells for arbitrary (e.g. decoded) grids, with the
/// grid depth standing in for the period. Returns nullopt when a non-empty
/// cell has no physical preimage (the structurally empty cells, or orbitals
/// outside 1s..7p).
std::optional<ElectronConfiguration> grid_to_config(const RealignedGrid& grid);

/// Electrons missing per orbital relative to the noble gas closing the
/// element's period, in the 19-orbital table order. Zero beyond the noble
/// gas's own occupancy.
std::array<int, 19> vacancies_original(const ElectronConfiguration& config);

/// Vacancies of the valence row only, against the noble gas's valence row:
/// (_1s, _1p, _1d, _1f).
std::array<int, 4> vacancies_realigned(const ElectronConfiguration& config);

enum class PeriodMode { none, normalized, one_hot };

/// normalized -> single value period/7; one_hot -> 7-vector with a 1 at the
/// period's position.
std::vector<double> encode_period(int period, PeriodMode mode);

enum class Variant { shell7, image28, outer11, valence4, vac19, vac4 };
enum class NormMode { total, per_column };
enum class RealignMode { original, valence };

/// image28: the grid row-major (28 cells); outer11: the 11 outermost cells
/// (_4d,_4f,_3s,_3p,_3d,_2s,_2p,_1s,_1p,_1d,_1f); valence4: row 1 only.
std::vector<double> select_features(const RealignedGrid& grid, Variant variant);

struct NoiseSpec {
  double alpha = 0.0;  // scale of added N(0,1) noise
  std::uint64_t seed = 0;

  bool operator==(const NoiseSpec&) const = default;
};

struct Recipe {
  Variant variant = Variant::image28;
  RealignMode realign = RealignMode::valence;  // shell7 only
  NormMode norm = NormMode::total;
  bool sqrt_transform = false;
  int duplication = 1;
  NoiseSpec noise;
  PeriodMode period = PeriodMode::none;
  bool transposed = false;  // 19 orbitals x 118 elements instead of elements

  std::string to_string() const;
  static Recipe parse(const std::string& text);
  bool operator==(const Recipe&) const = default;
};

struct FeatureMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;  // row-major
  std::vector<std::string> row_labels;
  std::vector<int> row_entities;  // z, or orbital index when transposed
  std::vector<std::string> col_labels;
  std::vector<double> divisors;  // per-column normalization divisor
  Recipe recipe;

  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  /// as a batched tensor; image28 variants get shape {rows,7,4,1}
  nn::Tensor tensor() const;
  bool image_shaped() const;
};

/// Featurize the raw (integer) values for one element under a recipe,
/// before normalization. Column count depends on the variant.
std::vector<double> element_features(const ElementRecord& rec, Variant variant, RealignMode mode);

/// select -> optional sqrt -> normalize -> append period encoding ->
/// duplicate -> add noise and clamp to [0,1].
FeatureMatrix build_feature_matrix(const ElementTable& table, const Recipe& recipe);

/// Transposed dual-representation matrix: 19 orbital rows x 118 element
/// columns, occupancies / 14, duplicated k times.
FeatureMatrix transpose_for_variables(const ElementTable& table, int duplication);

/// Featurize a single element with a recipe and frozen normalization
/// divisors (no duplication, no noise): the row a model trained on that
/// recipe expects for this element.
std::vector<double> featurize_one(const ElementRecord& rec, const Recipe& recipe,
                                  const std::vector<double>& divisors);
std::vector<double> featurize_one(const ElementRecord& rec, const FeatureMatrix& matrix);

/// A decoded image (real-valued, in [0,1]) rounded back to occupancies:
/// denormalize by the per-column divisor, round half-to-even, clamp to the
/// subshell capacity.
RealignedGrid round_decoded_image(const std::vector<double>& decoded,
                                  const std::vector<double>& divisors);

const char* to_string(Variant v);
const char* to_string(NormMode m);
const char* to_string(RealignMode m);
const char* to_string(PeriodMode m);

}  // namespace elemvae::feat
