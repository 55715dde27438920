// Recipes that rebuild figure-style outputs (CSV + SVG) from a single seed.

#include <cstdio>
#include <filesystem>
#include <json.hpp>
#include <set>

#include "elemvae/bvae.hpp"
#include "elemvae/defaults.hpp"
#include "elemvae/io.hpp"
#include "elemvae/latent.hpp"
#include "elemvae/studies.hpp"

namespace elemvae::cli::detail {

namespace fs = std::filesystem;
using elements::ElementRecord;
using elements::ElementTable;
using nlohmann::json;

namespace {

std::string out_path(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  return (fs::path(dir) / name).string();
}

nn::TrainConfig conv_config(std::uint64_t seed) {
  nn::TrainConfig c;
  c.beta = defaults::kBeta;
  c.epochs = defaults::kConvEpochs;
  c.batch_size = defaults::kBatchSize;
  c.split_fraction = defaults::kSplitFraction;
  c.seed = seed;
  return c;
}

bvae::TrainedBvae train_conv(const ElementTable& table, std::uint64_t seed) {
  feat::Recipe recipe;
  recipe.variant = feat::Variant::image28;
  recipe.duplication = defaults::kDuplication;
  feat::FeatureMatrix matrix = feat::build_feature_matrix(table, recipe);
  return bvae::train_bvae(matrix, bvae::conv_bvae_spec(), nn::OptimizerSpec::adam(),
                          conv_config(seed));
}

std::string labels_for(const ElementRecord& rec, const std::string& plot,
                       const std::set<int>& violations) {
  if (plot == "period") return "period " + std::to_string(rec.period);
  if (plot == "group") return rec.group ? "group " + std::to_string(*rec.group) : "f-block";
  if (plot == "block") return std::string(1, elements::subshell_letter(rec.block));
  if (plot == "type") return rec.category;
  if (plot == "violation") return violations.count(rec.z) ? "violates rule" : "follows rule";
  return "";
}

void write_map(const std::string& path, const latent::LatentMap& map, const ElementTable& table,
               const std::string& plot, bool polar, latent::Point center, std::uint64_t seed) {
  std::set<int> violations = elements::madelung_violations(table);
  std::vector<io::ScatterPoint> pts;
  for (int i = 0; i < map.size(); ++i) {
    const ElementRecord& rec = table.by_z(map.zs[i]);
    io::ScatterPoint p;
    if (polar) {
      double dx = map.xs[i] - center.x, dy = map.ys[i] - center.y;
      p.x = std::atan2(dy, dx);
      if (p.x < 0) p.x += 2.0 * 3.14159265358979323846;
      p.y = std::hypot(dx, dy);
    } else {
      p.x = map.xs[i];
      p.y = map.ys[i];
    }
    p.label = rec.symbol;
    if (plot == "melting") {
      if (rec.melting_point) p.value = *rec.melting_point;
    } else {
      p.category = labels_for(rec, plot, violations);
    }
    pts.push_back(p);
  }
  io::ScatterOptions opt;
  opt.title = (polar ? "polar latent map, " : "latent map, ") + plot;
  opt.continuous = plot == "melting";
  io::write_scatter_svg(path, pts, opt, seed, "reproduce");
}

void write_latent_csv(const std::string& path, const latent::LatentMap& map,
                      const ElementTable& table, std::uint64_t seed) {
  io::CsvWriter csv(path, seed, "reproduce");
  csv.header({"z", "symbol", "mu1", "mu2", "logvar1", "logvar2"});
  for (int i = 0; i < map.size(); ++i)
    csv.row({std::to_string(map.zs[i]), table.by_z(map.zs[i]).symbol, io::fmt_double(map.xs[i]),
             io::fmt_double(map.ys[i]), io::fmt_double(map.logvar1[i]),
             io::fmt_double(map.logvar2[i])});
}

// two 7x4 intensity tiles per element: the input image and its decode
void write_tiles_svg(const std::string& path, const ElementTable& table,
                     const bvae::TrainedBvae& model, const std::vector<int>& zs,
                     std::uint64_t seed) {
  const int cell = 16, gap = 24, block_w = 4 * cell, block_h = 7 * cell;
  int width = static_cast<int>(zs.size()) * (2 * block_w + 3 * gap);
  int height = block_h + 3 * gap;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write: " + path);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<!-- elemvae " << io::kToolVersion << " seed=" << seed << " config=reproduce -->\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
      << "\" height=\"" << height << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  auto tile = [&](double x0, double y0, const std::vector<double>& img) {
    for (int r = 0; r < 7; ++r)
      for (int c = 0; c < 4; ++c) {
        int v = static_cast<int>(255.0 * (1.0 - std::min(1.0, std::max(0.0, img[r * 4 + c]))));
        char color[10];
        std::snprintf(color, sizeof(color), "#%02x%02x%02x", v, v, v);
        out << "<rect x=\"" << x0 + c * cell << "\" y=\"" << y0 + r * cell << "\" width=\""
            << cell << "\" height=\"" << cell << "\" fill=\"" << color
            << "\" stroke=\"#ccc\"/>\n";
      }
  };
  for (std::size_t k = 0; k < zs.size(); ++k) {
    const ElementRecord& rec = table.by_z(zs[k]);
    std::vector<double> input = feat::featurize_one(rec, model.recipe, model.divisors);
    bvae::LatentPoint p = bvae::encode(model, input);
    std::vector<double> decoded = bvae::decode(model, p.mu);
    double x0 = gap + k * (2 * block_w + 3 * gap);
    out << "<text x=\"" << x0 << "\" y=\"" << gap - 8
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << rec.symbol << " (z="
        << rec.z << ")</text>\n";
    tile(x0, gap, input);
    tile(x0 + block_w + gap, gap, decoded);
    char mu[64];
    std::snprintf(mu, sizeof(mu), "mu=(%.2f, %.2f)", p.mu[0], p.mu[1]);
    out << "<text x=\"" << x0 << "\" y=\"" << gap + block_h + 16
        << "\" font-family=\"sans-serif\" font-size=\"10\">" << mu << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace

void reproduce_figures(const std::string& which, std::uint64_t seed, const std::string& out_dir,
                       const ElementTable& table);

void reproduce_figures(const std::string& which, std::uint64_t seed, const std::string& out_dir,
                       const ElementTable& table) {
  auto wants = [&](const std::string& name) { return which == "all" || which == name; };
  bool known = which == "all";
  for (const char* name : {"figure3", "figure5", "figure6", "figure7", "figure8", "figure9",
                           "figure10", "figure12", "figure14"})
    known |= which == name;
  if (!known) throw std::runtime_error("unknown figure: " + which);

  // the convolutional model backs figures 5, 6, 7, 9, 10 and 12
  bool needs_conv = wants("figure5") || wants("figure6") || wants("figure7") ||
                    wants("figure9") || wants("figure10") || wants("figure12");
  bvae::TrainedBvae conv;
  latent::LatentMap conv_map;
  if (needs_conv) {
    conv = train_conv(table, seed);
    conv_map = latent::encode_elements(conv, table);
  }

  if (wants("figure3")) {
    feat::Recipe recipe;
    recipe.variant = feat::Variant::shell7;
    recipe.duplication = defaults::kDuplication;
    feat::FeatureMatrix matrix = feat::build_feature_matrix(table, recipe);
    nn::TrainConfig c = conv_config(seed);
    c.epochs = defaults::kDenseEpochs;
    bvae::TrainedBvae dense =
        bvae::train_bvae(matrix, bvae::dense_bvae_spec(7, {256, 32}),
                         nn::OptimizerSpec::rmsprop(), c);
    latent::LatentMap map = latent::encode_elements(dense, table);
    write_latent_csv(out_path(out_dir, "figure3_latent.csv"), map, table, seed);
    latent::Point center = latent::estimate_center(map, latent::CenterMode::centroid);
    write_map(out_path(out_dir, "figure3_periods.svg"), map, table, "period", false, center, seed);
    write_map(out_path(out_dir, "figure3_groups.svg"), map, table, "group", false, center, seed);
    std::printf("figure3: shell-realigned dense model maps\n");
  }

  if (wants("figure5")) {
    write_tiles_svg(out_path(out_dir, "figure5_decodes.svg"), table, conv,
                    {1, 6, 12, 26, 77, 118}, seed);
    io::CsvWriter csv(out_path(out_dir, "figure5_decodes.csv"), seed, "reproduce");
    std::vector<std::string> header = {"z", "symbol", "kind"};
    for (int r = 1; r <= 7; ++r)
      for (char l : {'s', 'p', 'd', 'f'}) header.push_back("_" + std::to_string(r) + l);
    csv.header(header);
    for (int z : {1, 6, 12, 26, 77, 118}) {
      const ElementRecord& rec = table.by_z(z);
      std::vector<double> input = feat::featurize_one(rec, conv.recipe, conv.divisors);
      bvae::LatentPoint p = bvae::encode(conv, input);
      std::vector<double> decoded = bvae::decode(conv, p.mu);
      bvae::Reconstruction rc = bvae::round_to_configuration(conv, decoded);
      std::vector<std::string> in_row = {std::to_string(z), rec.symbol, "input"};
      std::vector<std::string> de_row = {std::to_string(z), rec.symbol, "decoded"};
      std::vector<std::string> rd_row = {std::to_string(z), rec.symbol, "rounded"};
      for (int c = 0; c < 28; ++c) {
        in_row.push_back(io::fmt_double(input[c]));
        de_row.push_back(io::fmt_double(decoded[c]));
        rd_row.push_back(std::to_string(rc.grid.cells[c]));
      }
      csv.row(in_row);
      csv.row(de_row);
      csv.row(rd_row);
    }
    std::printf("figure5: input vs decoded images\n");
  }

  latent::Point conv_center;
  if (needs_conv && conv_map.size() > 0)
    conv_center = latent::estimate_center(conv_map, latent::CenterMode::centroid);

  if (wants("figure6")) {
    write_latent_csv(out_path(out_dir, "figure6_latent.csv"), conv_map, table, seed);
    for (const char* plot : {"period", "group", "block", "type"})
      write_map(out_path(out_dir, std::string("figure6_") + plot + ".svg"), conv_map, table, plot,
                false, conv_center, seed);
    std::printf("figure6: period/group/block/type maps\n");
  }

  if (wants("figure7")) {
    write_map(out_path(out_dir, "figure7_melting.svg"), conv_map, table, "melting", false,
              conv_center, seed);
    write_map(out_path(out_dir, "figure7_violations.svg"), conv_map, table, "violation", false,
              conv_center, seed);
    std::printf("figure7: melting point and filling-rule violation maps\n");
  }

  if (wants("figure8")) {
    nn::TrainConfig c = conv_config(seed);
    studies::MendeleevReport rep = studies::run_mendeleev_study(
        table, defaults::kMendeleevCutoff, {"Ge", "Tc", "Eu", "Yb", "Re"}, seed, c);
    json j;
    j["training_size"] = rep.training_size;
    json hs = json::array();
    for (const studies::MendeleevHoldout& h : rep.holdouts)
      hs.push_back({{"symbol", h.symbol},
                    {"mu", {h.x, h.y}},
                    {"neighbor_delta", h.delta},
                    {"midpoint_distance", h.midpoint_distance},
                    {"percentile", h.percentile}});
    j["holdouts"] = hs;
    j["meta"] = {{"tool", "elemvae"}, {"version", io::kToolVersion}, {"seed", seed}};
    std::ofstream out(out_path(out_dir, "figure8_mendeleev.json"));
    out << j.dump(2) << "\n";
    std::printf("figure8: 1869-subset study (%d elements)\n", rep.training_size);
  }

  if (wants("figure9")) {
    write_map(out_path(out_dir, "figure9_polar_periods.svg"), conv_map, table, "period", true,
              conv_center, seed);
    write_map(out_path(out_dir, "figure9_polar_groups.svg"), conv_map, table, "group", true,
              conv_center, seed);
    std::printf("figure9: polar maps\n");
  }

  latent::GridDecode grid;
  if (wants("figure10") || wants("figure12"))
    grid = latent::decode_grid(conv, latent::map_bounds(conv_map), defaults::kGridN);

  if (wants("figure10")) {
    io::CsvWriter csv(out_path(out_dir, "figure10_grid.csv"), seed, "reproduce");
    csv.header({"i", "j", "x", "y", "z_estimate"});
    for (const latent::GridCell& cell : grid.cells)
      csv.row({std::to_string(cell.i), std::to_string(cell.j), io::fmt_double(cell.x),
               io::fmt_double(cell.y), std::to_string(cell.z_estimate)});
    std::vector<io::ScatterPoint> pts;
    for (const latent::GridCell& cell : grid.cells) {
      io::ScatterPoint p;
      p.x = cell.x;
      p.y = cell.y;
      p.value = cell.z_estimate;
      pts.push_back(p);
    }
    io::ScatterOptions opt;
    opt.title = "decoded grid: atomic-number estimates";
    opt.continuous = true;
    opt.show_labels = false;
    io::write_scatter_svg(out_path(out_dir, "figure10_zmap.svg"), pts, opt, seed, "reproduce");
    std::printf("figure10: decoded 50x50 grid\n");
  }

  if (wants("figure12")) {
    studies::FilterBand band;
    studies::GeneratedSet gen = studies::generate_candidates(grid, conv_map, band, table);
    io::CsvWriter csv(out_path(out_dir, "figure12_generated.csv"), seed, "reproduce");
    csv.header({"i", "j", "x", "y", "nearest_real", "z_estimate", "exact_match"});
    for (const studies::GeneratedPoint& p : gen.points)
      csv.row({std::to_string(p.i), std::to_string(p.j), io::fmt_double(p.x), io::fmt_double(p.y),
               io::fmt_double(p.nearest_real), std::to_string(p.rounded.total()),
               p.exact_match ? "yes" : "no"});
    std::vector<io::ScatterPoint> pts;
    for (int i = 0; i < conv_map.size(); ++i) {
      io::ScatterPoint p;
      p.x = conv_map.xs[i];
      p.y = conv_map.ys[i];
      p.category = "real";
      pts.push_back(p);
    }
    for (const studies::GeneratedPoint& g : gen.points) {
      io::ScatterPoint p;
      p.x = g.x;
      p.y = g.y;
      p.category = "generated";
      pts.push_back(p);
    }
    io::ScatterOptions opt;
    opt.title = "real elements and filtered generated points";
    opt.show_labels = false;
    io::write_scatter_svg(out_path(out_dir, "figure12_scatter.svg"), pts, opt, seed, "reproduce");
    std::printf("figure12: %zu generated points after the filter\n", gen.points.size());
  }

  if (wants("figure14")) {
    studies::DualRepReport rep = studies::run_dual_representation(
        table, defaults::kDualDuplication, seed, defaults::kDualEpochs);
    io::CsvWriter csv(out_path(out_dir, "figure14_variables.csv"), seed, "reproduce");
    csv.header({"orbital", "x", "y"});
    for (std::size_t i = 0; i < rep.orbital.size(); ++i)
      csv.row({rep.orbital[i], io::fmt_double(rep.x[i]), io::fmt_double(rep.y[i])});
    std::vector<io::ScatterPoint> pts;
    for (std::size_t i = 0; i < rep.orbital.size(); ++i) {
      io::ScatterPoint p;
      p.x = rep.x[i];
      p.y = rep.y[i];
      p.label = rep.orbital[i];
      p.category = std::string(1, rep.orbital[i].back());
      pts.push_back(p);
    }
    io::ScatterOptions opt;
    opt.title = "dual representation: orbitals on the latent plane";
    io::write_scatter_svg(out_path(out_dir, "figure14_variables.svg"), pts, opt, seed,
                          "reproduce");
    json j;
    j["best_tau"] = rep.best_tau;
    j["exact_match"] = rep.exact_match;
    j["angular_order"] = rep.angular_order;
    j["gap_rank_5s4d"] = rep.gap_rank_5s4d;
    j["meta"] = {{"tool", "elemvae"}, {"version", io::kToolVersion}, {"seed", seed}};
    std::ofstream out(out_path(out_dir, "figure14_dual.json"));
    out << j.dump(2) << "\n";
    std::printf("figure14: variable representation (tau %.3f%s)\n", rep.best_tau,
                rep.exact_match ? ", exact" : "");
  }
}

}  // namespace elemvae::cli::detail
