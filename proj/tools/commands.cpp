#include "commands.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <json.hpp>

#include "elemvae/bvae.hpp"
#include "elemvae/defaults.hpp"
#include "elemvae/elements.hpp"
#include "elemvae/featurize.hpp"
#include "elemvae/io.hpp"
#include "elemvae/latent.hpp"
#include "elemvae/studies.hpp"

namespace elemvae::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TrainArgs {
  std::string recipe;  // empty = model default
  std::string model = "conv";
  double beta = defaults::kBeta;
  std::uint64_t seed = 0;
  int epochs = -1;  // -1 = model default
  int batch = defaults::kBatchSize;
  double split = defaults::kSplitFraction;
  std::string granularity = "row";
  std::string optimizer;  // empty = model default
  double lr = -1.0;       // <0 = optimizer default
};

std::string default_recipe(const std::string& model) {
  if (model == "conv") return "image28,total,dup100";
  if (model == "dense7") return "shell7,total,dup100";
  if (model == "dense118") return "transposed,dup500";
  if (model == "dense5") return "valence4,total,dup100,periodnorm";
  if (model == "dense11") return "outer11,total,dup100,periodonehot";
  throw CLI::ValidationError("--model", "unknown model " + model);
}

bvae::TrainedBvae train_from_args(const elements::ElementTable& table, const TrainArgs& a) {
  std::string recipe_text = a.recipe.empty() ? default_recipe(a.model) : a.recipe;
  feat::Recipe recipe = feat::Recipe::parse(recipe_text);
  feat::FeatureMatrix matrix = recipe.transposed
                                   ? feat::transpose_for_variables(table, recipe.duplication)
                                   : feat::build_feature_matrix(table, recipe);

  bvae::BvaeSpec spec;
  if (a.model == "conv") {
    if (!matrix.image_shaped())
      throw CLI::ValidationError("--recipe", "the conv model needs plain image28 features");
    spec = bvae::conv_bvae_spec();
  } else {
    int dim = matrix.cols;
    std::vector<int> hidden;
    int expected = 0;
    if (a.model == "dense7") { hidden = {256, 32}; expected = 7; }
    else if (a.model == "dense118") { hidden = {128, 16}; expected = 118; }
    else if (a.model == "dense5") { hidden = {64, 16}; expected = 5; }
    else if (a.model == "dense11") { hidden = {64, 16}; expected = 11; }
    else throw CLI::ValidationError("--model", "unknown model " + a.model);
    if (dim != expected)
      throw CLI::ValidationError("--recipe", "recipe yields " + std::to_string(dim) +
                                                 " inputs but " + a.model + " expects " +
                                                 std::to_string(expected));
    spec = bvae::dense_bvae_spec(dim, hidden);
  }

  nn::TrainConfig config;
  config.beta = a.beta;
  config.epochs = a.epochs >= 0 ? a.epochs
                  : a.model == "conv" ? defaults::kConvEpochs
                  : a.model == "dense118" ? defaults::kDualEpochs
                                          : defaults::kDenseEpochs;
  config.batch_size = a.batch;
  config.split_fraction = a.split;
  config.seed = a.seed;
  config.granularity =
      a.granularity == "entity" ? nn::SplitGranularity::entity : nn::SplitGranularity::row;

  std::string opt_name = !a.optimizer.empty() ? a.optimizer
                         : a.model == "conv"  ? "adam"
                                              : "rmsprop";
  nn::OptimizerSpec opt;
  opt.algorithm = nn::opt_algorithm_from_string(opt_name);
  if (opt.algorithm == nn::OptAlgorithm::adam) opt = nn::OptimizerSpec::adam();
  if (opt.algorithm == nn::OptAlgorithm::rmsprop) opt = nn::OptimizerSpec::rmsprop();
  if (opt.algorithm == nn::OptAlgorithm::adadelta) opt = nn::OptimizerSpec::adadelta();
  if (a.lr > 0) opt.learning_rate = a.lr;

  return bvae::train_bvae(matrix, spec, opt, config);
}

std::string hash_args(const std::vector<std::string>& parts) {
  std::string all;
  for (const std::string& p : parts) all += p + "|";
  return io::hex64(io::fnv1a(all));
}

void ensure_dir(const std::string& dir) {
  if (!dir.empty()) fs::create_directories(dir);
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void write_json_report(const std::string& path, json j, std::uint64_t seed,
                       const std::string& config_hash) {
  j["meta"] = {{"tool", "elemvae"},
               {"version", io::kToolVersion},
               {"seed", seed},
               {"config", config_hash}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write: " + path);
  out << j.dump(2) << "\n";
}

void write_latent_csv(const std::string& path, const latent::LatentMap& map,
                      const elements::ElementTable& table, std::uint64_t seed,
                      const std::string& hash) {
  io::CsvWriter csv(path, seed, hash);
  csv.header({"z", "symbol", "mu1", "mu2", "logvar1", "logvar2"});
  for (int i = 0; i < map.size(); ++i)
    csv.row({std::to_string(map.zs[i]), table.by_z(map.zs[i]).symbol, io::fmt_double(map.xs[i]),
             io::fmt_double(map.ys[i]), io::fmt_double(map.logvar1[i]),
             io::fmt_double(map.logvar2[i])});
}

std::string category_label(const elements::ElementRecord& rec, const std::string& plot) {
  if (plot == "period") return "period " + std::to_string(rec.period);
  if (plot == "group") return rec.group ? "group " + std::to_string(*rec.group) : "f-block";
  if (plot == "block") return std::string(1, elements::subshell_letter(rec.block));
  if (plot == "type") return rec.category;
  throw std::invalid_argument("unknown plot kind: " + plot);
}

void write_map_svg(const std::string& path, const latent::LatentMap& map,
                   const elements::ElementTable& table, const std::string& plot,
                   std::uint64_t seed, const std::string& hash, bool polar,
                   latent::Point center) {
  std::vector<io::ScatterPoint> pts;
  for (int i = 0; i < map.size(); ++i) {
    const elements::ElementRecord& rec = table.by_z(map.zs[i]);
    io::ScatterPoint p;
    if (polar) {
      double dx = map.xs[i] - center.x, dy = map.ys[i] - center.y;
      double r = std::hypot(dx, dy);
      double a = r == 0 ? 0.0 : std::atan2(dy, dx);
      if (a < 0) a += 2.0 * 3.14159265358979323846;
      p.x = a;
      p.y = r;
    } else {
      p.x = map.xs[i];
      p.y = map.ys[i];
    }
    p.label = rec.symbol;
    if (plot == "melting") {
      if (rec.melting_point) p.value = *rec.melting_point;
    } else {
      p.category = category_label(rec, plot);
    }
    pts.push_back(p);
  }
  io::ScatterOptions opt;
  opt.title = (polar ? std::string("polar latent map, ") : std::string("latent map, ")) + plot;
  opt.continuous = plot == "melting";
  io::write_scatter_svg(path, pts, opt, seed, hash);
}

}  // namespace

namespace detail {
// implemented in reproduce.cpp
void reproduce_figures(const std::string& which, std::uint64_t seed, const std::string& out_dir,
                       const elements::ElementTable& table);
}  // namespace detail

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"electron-configuration beta-VAE workbench"};
  app.set_version_flag("--version", io::kToolVersion);
  app.set_config("--config");
  app.require_subcommand(1);

  std::string data_path = "data/elements.csv";
  app.add_option("--data", data_path, "element snapshot CSV")->capture_default_str();

  auto table = [&]() { return elements::ElementTable::load_file(data_path); };

  // ---------------------------------------------------------------- elements
  CLI::App* cmd_elements = app.add_subcommand("elements", "dataset utilities");
  cmd_elements->require_subcommand(1);
  CLI::App* cmd_validate = cmd_elements->add_subcommand("validate", "validate an element file");
  std::string validate_path;
  cmd_validate->add_option("path", validate_path, "CSV to validate")->required();
  cmd_validate->callback([&] {
    elements::ElementTable t = elements::ElementTable::load_file(validate_path);
    for (const elements::ElementRecord& rec : t.records())
      std::printf("ok   %3d %-3s period=%d total=%d\n", rec.z, rec.symbol.c_str(), rec.period,
                  rec.config.total());
    std::set<int> viol = elements::madelung_violations(t);
    std::printf("%zu elements, %zu filling-rule violations:", t.size(), viol.size());
    for (int z : viol) std::printf(" %s", t.by_z(z).symbol.c_str());
    std::printf("\n");
  });

  // --------------------------------------------------------------- featurize
  CLI::App* cmd_feat = app.add_subcommand("featurize", "build a feature matrix CSV");
  std::string f_variant = "image28", f_norm = "total", f_realign = "valence", f_period = "none";
  bool f_sqrt = false, f_transpose = false;
  int f_dup = 1;
  double f_noise = 0.0;
  std::uint64_t f_seed = 0;
  std::string f_out = "features.csv";
  cmd_feat->add_option("--variant", f_variant)
      ->check(CLI::IsMember({"shell7", "image28", "outer11", "valence4", "vac19", "vac4"}));
  cmd_feat->add_option("--norm", f_norm)->check(CLI::IsMember({"total", "col"}));
  cmd_feat->add_option("--realign", f_realign)->check(CLI::IsMember({"orig", "valence"}));
  cmd_feat->add_flag("--sqrt", f_sqrt, "sqrt-linearize raw counts");
  cmd_feat->add_option("--dup", f_dup, "duplication factor");
  cmd_feat->add_option("--noise", f_noise, "alpha of added N(0,1) noise");
  cmd_feat->add_option("--seed", f_seed, "noise seed");
  cmd_feat->add_option("--period", f_period)->check(CLI::IsMember({"none", "norm", "onehot"}));
  cmd_feat->add_flag("--transpose", f_transpose, "19 orbital rows x 118 element columns");
  cmd_feat->add_option("--out", f_out)->capture_default_str();
  cmd_feat->callback([&] {
    std::string recipe_text;
    if (f_transpose) {
      recipe_text = "transposed,dup" + std::to_string(f_dup);
    } else {
      recipe_text = f_variant + "," + f_norm;
      if (f_realign == "orig") recipe_text += ",orig";
      if (f_sqrt) recipe_text += ",sqrt";
      if (f_dup != 1) recipe_text += ",dup" + std::to_string(f_dup);
      if (f_noise > 0) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), ",noise%g@%llu", f_noise,
                      static_cast<unsigned long long>(f_seed));
        recipe_text += buf;
      }
      if (f_period == "norm") recipe_text += ",periodnorm";
      if (f_period == "onehot") recipe_text += ",periodonehot";
    }
    feat::Recipe recipe = feat::Recipe::parse(recipe_text);
    elements::ElementTable t = table();
    feat::FeatureMatrix m = recipe.transposed
                                ? feat::transpose_for_variables(t, recipe.duplication)
                                : feat::build_feature_matrix(t, recipe);
    std::string hash = hash_args({"featurize", recipe_text, data_path});
    io::CsvWriter csv(f_out, f_seed, hash);
    std::vector<std::string> header = {"label"};
    header.insert(header.end(), m.col_labels.begin(), m.col_labels.end());
    csv.header(header);
    for (int r = 0; r < m.rows; ++r) {
      std::vector<std::string> row = {m.row_labels[r]};
      for (int c = 0; c < m.cols; ++c) row.push_back(io::fmt_double(m.at(r, c)));
      csv.row(row);
    }
    std::printf("wrote %s (%d x %d, recipe %s)\n", f_out.c_str(), m.rows, m.cols,
                m.recipe.to_string().c_str());
  });

  // ------------------------------------------------------------------- train
  CLI::App* cmd_train = app.add_subcommand("train", "train a beta-VAE");
  TrainArgs t_args;
  std::string t_out = "model.ckpt";
  cmd_train->add_option("--recipe", t_args.recipe, "feature recipe (default per model)");
  cmd_train->add_option("--model", t_args.model)
      ->check(CLI::IsMember({"conv", "dense7", "dense118", "dense5", "dense11"}));
  cmd_train->add_option("--beta", t_args.beta)->capture_default_str();
  cmd_train->add_option("--seed", t_args.seed)->capture_default_str();
  cmd_train->add_option("--epochs", t_args.epochs, "epochs (default per model)");
  cmd_train->add_option("--batch", t_args.batch)->capture_default_str();
  cmd_train->add_option("--split", t_args.split)->capture_default_str();
  cmd_train->add_option("--granularity", t_args.granularity)
      ->check(CLI::IsMember({"row", "entity"}));
  cmd_train->add_option("--optimizer", t_args.optimizer)
      ->check(CLI::IsMember({"adam", "rmsprop", "adadelta"}));
  cmd_train->add_option("--lr", t_args.lr, "learning rate override");
  cmd_train->add_option("--out", t_out)->capture_default_str();
  cmd_train->callback([&] {
    bvae::TrainedBvae model = train_from_args(table(), t_args);
    bvae::save_model(t_out, model);
    std::printf("trained %s: %zu epochs, final train loss %.5f, wrote %s\n",
                t_args.model.c_str(), model.history.size(),
                model.history.empty() ? 0.0 : model.history.back().train_total, t_out.c_str());
  });

  // ------------------------------------------------------------------ encode
  CLI::App* cmd_encode = app.add_subcommand("encode", "encode all elements to latent.csv");
  std::string e_model, e_out = "latent.csv";
  cmd_encode->add_option("--model", e_model, "checkpoint path")->required();
  cmd_encode->add_option("--out", e_out)->capture_default_str();
  cmd_encode->callback([&] {
    bvae::TrainedBvae model = bvae::load_model(e_model);
    elements::ElementTable t = table();
    latent::LatentMap map = latent::encode_elements(model, t);
    write_latent_csv(e_out, map, t, model.seed, hash_args({"encode", e_model, data_path}));
    std::printf("wrote %s (%d points)\n", e_out.c_str(), map.size());
  });

  // ----------------------------------------------------------------- analyze
  CLI::App* cmd_analyze = app.add_subcommand("analyze", "latent-space maps and scores");
  std::string a_model, a_out = "analysis", a_center = "centroid";
  std::vector<std::string> a_plots = {"period"};
  bool a_polar = false;
  int a_topk = 10;
  cmd_analyze->add_option("--model", a_model)->required();
  cmd_analyze->add_option("--plot", a_plots, "period|group|block|type|melting (repeatable)")
      ->check(CLI::IsMember({"period", "group", "block", "type", "melting"}));
  cmd_analyze->add_flag("--polar", a_polar, "also write polar maps");
  cmd_analyze->add_option("--center", a_center, "centroid | symmetry | X,Y override");
  cmd_analyze->add_option("--top", a_topk, "outliers listed in scores.json");
  cmd_analyze->add_option("--out", a_out, "output directory")->capture_default_str();
  cmd_analyze->callback([&] {
    bvae::TrainedBvae model = bvae::load_model(a_model);
    elements::ElementTable t = table();
    ensure_dir(a_out);
    std::string hash = hash_args({"analyze", a_model, a_center, data_path});
    latent::LatentMap map = latent::encode_elements(model, t);
    write_latent_csv(join_path(a_out, "latent.csv"), map, t, model.seed, hash);

    latent::Point center;
    if (a_center == "centroid") {
      center = latent::estimate_center(map, latent::CenterMode::centroid);
    } else if (a_center == "symmetry") {
      center = latent::estimate_center(map, latent::CenterMode::symmetry, &t);
    } else {
      if (std::sscanf(a_center.c_str(), "%lf,%lf", &center.x, &center.y) != 2)
        throw CLI::ValidationError("--center", "expected centroid, symmetry or X,Y");
    }
    latent::PolarMap polar = latent::polar_transform(map, center);

    for (const std::string& plot : a_plots) {
      write_map_svg(join_path(a_out, "map_" + plot + ".svg"), map, t, plot, model.seed, hash,
                    false, center);
      if (a_polar)
        write_map_svg(join_path(a_out, "polar_" + plot + ".svg"), map, t, plot, model.seed, hash,
                      true, center);
    }
    if (a_polar) {
      io::CsvWriter csv(join_path(a_out, "polar.csv"), model.seed, hash);
      csv.header({"z", "symbol", "radius", "angle"});
      for (int i = 0; i < map.size(); ++i)
        csv.row({std::to_string(map.zs[i]), t.by_z(map.zs[i]).symbol,
                 io::fmt_double(polar.radius[i]), io::fmt_double(polar.angle[i])});
    }

    latent::OutlierReport outliers = latent::outlier_scores(map, t);
    {
      io::CsvWriter csv(join_path(a_out, "outliers.csv"), model.seed, hash);
      csv.header({"rank", "z", "symbol", "score", "violates_filling_rule"});
      std::set<int> viol = elements::madelung_violations(t);
      for (std::size_t i = 0; i < outliers.ranked.size(); ++i)
        csv.row({std::to_string(i + 1), std::to_string(outliers.ranked[i].z),
                 t.by_z(outliers.ranked[i].z).symbol, io::fmt_double(outliers.ranked[i].score),
                 viol.count(outliers.ranked[i].z) ? "yes" : "no"});
    }

    json scores;
    scores["center"] = {{"mode", a_center}, {"x", center.x}, {"y", center.y}};
    {
      latent::Point sym = latent::estimate_center(map, latent::CenterMode::symmetry, &t);
      latent::Point cen = latent::estimate_center(map, latent::CenterMode::centroid);
      scores["center_modes"] = {{"centroid", {cen.x, cen.y}}, {"symmetry", {sym.x, sym.y}}};
    }
    for (const std::string& plot : a_plots) {
      if (plot == "melting") continue;
      std::map<int, std::string> labels;
      for (const elements::ElementRecord& rec : t.records())
        labels[rec.z] = category_label(rec, plot);
      scores["separation"][plot] = latent::category_separation(map, labels);
    }
    latent::OrderScore order = latent::sequence_order_score(map, polar, t);
    scores["sequence_order"]["overall"] = order.overall;
    for (const auto& [period, tau] : order.per_period)
      scores["sequence_order"]["period_" + std::to_string(period)] = tau;
    json top = json::array();
    for (int i = 0; i < a_topk && i < static_cast<int>(outliers.ranked.size()); ++i)
      top.push_back({{"z", outliers.ranked[i].z},
                     {"symbol", t.by_z(outliers.ranked[i].z).symbol},
                     {"score", outliers.ranked[i].score}});
    scores["top_outliers"] = top;
    write_json_report(join_path(a_out, "scores.json"), scores, model.seed, hash);
    std::printf("wrote analysis to %s\n", a_out.c_str());
  });

  // -------------------------------------------------------------------- grid
  CLI::App* cmd_grid = app.add_subcommand("grid", "decode a latent grid");
  std::string g_model, g_out = "grid.csv", g_bounds;
  int g_n = defaults::kGridN;
  bool g_raw = false;
  cmd_grid->add_option("--model", g_model)->required();
  cmd_grid->add_option("--n", g_n)->capture_default_str();
  cmd_grid->add_option("--bounds", g_bounds, "xmin:xmax:ymin:ymax (default: padded data box)");
  cmd_grid->add_flag("--raw", g_raw, "write decoded values instead of rounded cells");
  cmd_grid->add_option("--out", g_out)->capture_default_str();
  cmd_grid->callback([&] {
    bvae::TrainedBvae model = bvae::load_model(g_model);
    elements::ElementTable t = table();
    latent::Bounds bounds;
    if (g_bounds.empty()) {
      bounds = latent::map_bounds(latent::encode_elements(model, t));
    } else if (std::sscanf(g_bounds.c_str(), "%lf:%lf:%lf:%lf", &bounds.xmin, &bounds.xmax,
                           &bounds.ymin, &bounds.ymax) != 4) {
      throw CLI::ValidationError("--bounds", "expected xmin:xmax:ymin:ymax");
    }
    latent::GridDecode grid = latent::decode_grid(model, bounds, g_n);
    std::string hash = hash_args({"grid", g_model, std::to_string(g_n), g_bounds, data_path});
    io::CsvWriter csv(g_out, model.seed, hash);
    std::vector<std::string> header = {"i", "j", "x", "y", "z_estimate"};
    for (int row = 1; row <= 7; ++row)
      for (char l : {'s', 'p', 'd', 'f'}) header.push_back("_" + std::to_string(row) + l);
    csv.header(header);
    for (const latent::GridCell& cell : grid.cells) {
      std::vector<std::string> row = {std::to_string(cell.i), std::to_string(cell.j),
                                      io::fmt_double(cell.x), io::fmt_double(cell.y),
                                      std::to_string(cell.z_estimate)};
      for (int c = 0; c < 28; ++c)
        row.push_back(g_raw ? io::fmt_double(cell.decoded[c])
                            : std::to_string(cell.rounded.cells[c]));
      csv.row(row);
    }
    std::printf("wrote %s (%d x %d nodes)\n", g_out.c_str(), g_n, g_n);
  });

  // ---------------------------------------------------------------- classify
  CLI::App* cmd_classify = app.add_subcommand("classify", "real-vs-artificial study");
  std::string c_model, c_band = "0.2:0.7", c_report = "report.json";
  std::uint64_t c_seed = 0;
  int c_epochs = defaults::kClassifierEpochs;
  cmd_classify->add_option("--model", c_model)->required();
  cmd_classify->add_option("--band", c_band, "lo:hi in units of sigma")->capture_default_str();
  cmd_classify->add_option("--seed", c_seed)->capture_default_str();
  cmd_classify->add_option("--epochs", c_epochs)->capture_default_str();
  cmd_classify->add_option("--report", c_report)->capture_default_str();
  cmd_classify->callback([&] {
    bvae::TrainedBvae model = bvae::load_model(c_model);
    studies::FilterBand band;
    if (std::sscanf(c_band.c_str(), "%lf:%lf", &band.lo, &band.hi) != 2)
      throw CLI::ValidationError("--band", "expected lo:hi");
    elements::ElementTable t = table();
    studies::StudyReport rep = studies::run_classification_study(t, model, band, c_seed, c_epochs);
    std::string hash = hash_args({"classify", c_model, c_band, std::to_string(c_seed), data_path});
    json j;
    j["band"] = {{"lo", band.lo}, {"hi", band.hi}, {"sigma_scale", band.sigma_scale}};
    j["rows"] = {{"real", rep.real_rows},
                 {"artificial", rep.artificial_rows},
                 {"exact_matches", rep.exact_matches}};
    j["classifier"] = {{"test_accuracy", rep.test_accuracy},
                       {"artificial_accuracy", rep.artificial_accuracy},
                       {"artificial_accuracy_excl_exact", rep.artificial_accuracy_excl_exact},
                       {"false_positives", rep.false_positives},
                       {"false_negative_zs", rep.false_negative_zs},
                       {"epochs", rep.epochs}};
    j["madelung_oracle"] = {{"artificial_accuracy_all", rep.oracle_accuracy_all},
                            {"artificial_accuracy_excl_exact", rep.oracle_accuracy_excl_exact},
                            {"real_accuracy", rep.oracle_real_accuracy}};
    write_json_report(c_report, j, c_seed, hash);
    std::printf("classification: accuracy %.3f, oracle (excl exact) %.3f, report %s\n",
                rep.test_accuracy, rep.oracle_accuracy_excl_exact, c_report.c_str());
  });

  // -------------------------------------------------------------------- dual
  CLI::App* cmd_dual = app.add_subcommand("dual", "dual representation of the 19 orbitals");
  int d_dup = defaults::kDualDuplication, d_epochs = defaults::kDualEpochs;
  std::uint64_t d_seed = 0;
  std::string d_report = "dual.json";
  cmd_dual->add_option("--dup", d_dup)->capture_default_str();
  cmd_dual->add_option("--seed", d_seed)->capture_default_str();
  cmd_dual->add_option("--epochs", d_epochs)->capture_default_str();
  cmd_dual->add_option("--report", d_report)->capture_default_str();
  cmd_dual->callback([&] {
    elements::ElementTable t = table();
    studies::DualRepReport rep = studies::run_dual_representation(t, d_dup, d_seed, d_epochs);
    std::string hash = hash_args({"dual", std::to_string(d_dup), std::to_string(d_seed),
                                  std::to_string(d_epochs), data_path});
    json j;
    j["duplication"] = d_dup;
    j["collapsed"] = rep.collapsed;
    j["best_tau"] = rep.best_tau;
    j["exact_match"] = rep.exact_match;
    j["angular_order"] = rep.angular_order;
    j["gap_rank_5s4d"] = rep.gap_rank_5s4d;
    json gaps = json::array();
    for (const auto& [name, gap] : rep.gap_ranking) gaps.push_back({{"pair", name}, {"gap", gap}});
    j["gap_ranking"] = gaps;
    json pts = json::array();
    for (std::size_t i = 0; i < rep.orbital.size(); ++i)
      pts.push_back({{"orbital", rep.orbital[i]}, {"x", rep.x[i]}, {"y", rep.y[i]}});
    j["points"] = pts;
    write_json_report(d_report, j, d_seed, hash);

    std::string base = d_report.substr(0, d_report.find_last_of('.'));
    io::CsvWriter csv(base + ".csv", d_seed, hash);
    csv.header({"orbital", "x", "y", "angle"});
    for (std::size_t i = 0; i < rep.orbital.size(); ++i)
      csv.row({rep.orbital[i], io::fmt_double(rep.x[i]), io::fmt_double(rep.y[i]),
               io::fmt_double(rep.collapsed ? 0.0 : rep.angle[i])});
    std::vector<io::ScatterPoint> pts_svg;
    for (std::size_t i = 0; i < rep.orbital.size(); ++i) {
      io::ScatterPoint p;
      p.x = rep.x[i];
      p.y = rep.y[i];
      p.label = rep.orbital[i];
      p.category = std::string(1, rep.orbital[i].back());
      pts_svg.push_back(p);
    }
    io::ScatterOptions opt;
    opt.title = "orbitals on the latent plane";
    io::write_scatter_svg(base + ".svg", pts_svg, opt, d_seed, hash);
    std::printf("dual representation: tau %.3f %s, 5s-4d gap rank %d, report %s\n", rep.best_tau,
                rep.exact_match ? "(exact)" : "", rep.gap_rank_5s4d, d_report.c_str());
  });

  // --------------------------------------------------------------- mendeleev
  CLI::App* cmd_mend = app.add_subcommand("mendeleev", "train on the 1869 subset");
  int m_cutoff = defaults::kMendeleevCutoff, m_epochs = defaults::kConvEpochs;
  std::uint64_t m_seed = 0;
  std::string m_report = "mendeleev.json";
  cmd_mend->add_option("--cutoff", m_cutoff)->capture_default_str();
  cmd_mend->add_option("--seed", m_seed)->capture_default_str();
  cmd_mend->add_option("--epochs", m_epochs)->capture_default_str();
  cmd_mend->add_option("--report", m_report)->capture_default_str();
  cmd_mend->callback([&] {
    elements::ElementTable t = table();
    nn::TrainConfig config;
    config.beta = defaults::kBeta;
    config.epochs = m_epochs;
    config.batch_size = defaults::kBatchSize;
    config.seed = m_seed;
    studies::MendeleevReport rep = studies::run_mendeleev_study(
        t, m_cutoff, {"Ge", "Tc", "Eu", "Yb", "Re"}, m_seed, config);
    std::string hash =
        hash_args({"mendeleev", std::to_string(m_cutoff), std::to_string(m_seed), data_path});
    json j;
    j["cutoff_year"] = rep.cutoff_year;
    j["training_size"] = rep.training_size;
    j["training_zs"] = rep.training_zs;
    json hs = json::array();
    for (const studies::MendeleevHoldout& h : rep.holdouts)
      hs.push_back({{"z", h.z},
                    {"symbol", h.symbol},
                    {"mu", {h.x, h.y}},
                    {"neighbor_delta", h.delta},
                    {"midpoint_distance", h.midpoint_distance},
                    {"percentile", h.percentile}});
    j["holdouts"] = hs;
    write_json_report(m_report, j, m_seed, hash);
    std::printf("mendeleev: %d training elements, report %s\n", rep.training_size,
                m_report.c_str());
  });

  // --------------------------------------------------------------- reproduce
  CLI::App* cmd_repro = app.add_subcommand("reproduce", "rebuild a figure-style output set");
  std::string r_which, r_out = "reproduced";
  std::uint64_t r_seed = 0;
  cmd_repro->add_option("figure", r_which, "figure3|figure5|figure6|figure7|figure8|figure9|"
                                           "figure10|figure12|figure14|all")
      ->required();
  cmd_repro->add_option("--seed", r_seed)->capture_default_str();
  cmd_repro->add_option("--out", r_out)->capture_default_str();
  cmd_repro->callback([&] { detail::reproduce_figures(r_which, r_seed, r_out, table()); });

  // parse + dispatch
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

}  // namespace elemvae::cli
