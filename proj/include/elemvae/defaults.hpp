#pragma once

// Reference run settings shared by the CLI and the acceptance suite.
// The paper leaves epochs and batch sizes unstated; these are the recorded
// project defaults (see README).

namespace elemvae::defaults {

inline constexpr double kBeta = 0.03;
inline constexpr int kDuplication = 100;
inline constexpr int kBatchSize = 32;
inline constexpr double kSplitFraction = 0.67;

inline constexpr int kConvEpochs = 16;      // conv beta-VAE on image28 x100
inline constexpr int kDenseEpochs = 400;    // dense observation models (x1 data)
inline constexpr int kDualEpochs = 60;      // dense118 on the transposed matrix
inline constexpr int kDualDuplication = 500;
inline constexpr int kClassifierEpochs = 400;
inline constexpr int kGridN = 50;
inline constexpr int kMendeleevCutoff = 1869;

}  // namespace elemvae::defaults
