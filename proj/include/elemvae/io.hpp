#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace elemvae::io {

constexpr const char* kToolVersion = "0.1.0";

/// Deterministic double formatting for CSV/SVG output.
std::string fmt_double(double v);

std::uint64_t fnv1a(const std::string& text);
std::string hex64(std::uint64_t v);

/// Standard header comment lines embedded into every output file.
std::string meta_comment(std::uint64_t seed, const std::string& config_hash);

/// CSV with '#' metadata lines, a header row, and fmt_double cells.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, std::uint64_t seed, const std::string& config_hash);

  void header(const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
};

struct ScatterPoint {
  double x = 0.0, y = 0.0;
  std::string label;                 // printed next to the marker
  std::string category;              // categorical palette key
  std::optional<double> value;       // continuous colormap; missing = hollow
};

struct ScatterOptions {
  std::string title;
  bool continuous = false;  // colormap instead of categorical palette
  int width = 760;
  int height = 620;
  bool show_labels = true;
};

/// Static SVG 1.1 scatter plot; byte-deterministic for identical input.
void write_scatter_svg(const std::string& path, const std::vector<ScatterPoint>& points,
                       const ScatterOptions& options, std::uint64_t seed,
                       const std::string& config_hash);

}  // namespace elemvae::io
