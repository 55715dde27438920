#include "elemvae/featurize.hpp"

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <stdexcept>

#include "elemvae/nn/rng.hpp"

namespace elemvae::feat {

using elements::capacity;
using elements::kNumOrbitals;
using elements::madelung_fill;
using elements::noble_gas_z;
using elements::Orbital;
using elements::orbital_index;
using elements::orbital_list;

int RealignedGrid::total() const {
  int t = 0;
  for (int v : cells) t += v;
  return t;
}

int RealignedGrid::depth() const {
  for (int row = 7; row >= 1; --row)
    for (int c = 0; c < 4; ++c)
      if (cells[(row - 1) * 4 + c] != 0) return row;
  return 0;
}

const std::array<int, 9>& structurally_empty_cells() {
  // (row,subshell): (2,d) (2,f) (3,f) (5,f) (6,d) (6,f) (7,p) (7,d) (7,f)
  static const std::array<int, 9> cells = {6, 7, 11, 19, 22, 23, 25, 26, 27};
  return cells;
}

std::array<int, 7> realign_shells(const ElectronConfiguration& config) {
  std::array<int, 7> shells = config.shell_totals();
  int occupied = 0;
  for (int k = 6; k >= 0; --k)
    if (shells[k] > 0) {
      occupied = k + 1;
      break;
    }
  std::array<int, 7> out{};
  for (int k = 0; k < occupied; ++k) out[k] = shells[occupied - 1 - k];
  return out;
}

namespace {

bool is_valence(const Orbital& o, int period) {
  switch (o.l) {
    case Subshell::s:
    case Subshell::p: return o.n == period;
    case Subshell::d: return o.n == period - 1;
    case Subshell::f: return o.n == period - 2;
  }
  return false;
}

}  // namespace

RealignedGrid realign_subshells(const ElectronConfiguration& config) {
  RealignedGrid grid;
  int period = config.period();
  for (int i = 0; i < kNumOrbitals; ++i) {
    if (config.occ[i] == 0) continue;
    const Orbital& o = orbital_list()[i];
    int row = is_valence(o, period) ? 1 : period - o.n + 1;
    grid.at(row, o.l) = config.occ[i];
  }
  return grid;
}

std::optional<ElectronConfiguration> grid_to_config(const RealignedGrid& grid) {
  ElectronConfiguration config;
  int period = grid.depth();
  if (period == 0) return config;
  for (int row = 1; row <= 7; ++row)
    for (int c = 0; c < 4; ++c) {
      int v = grid.at(row, static_cast<Subshell>(c));
      if (v == 0) continue;
      Subshell l = static_cast<Subshell>(c);
      Orbital o{0, l};
      if (row == 1) {
        switch (l) {
          case Subshell::s:
          case Subshell::p: o.n = period; break;
          case Subshell::d: o.n = period - 1; break;
          case Subshell::f: o.n = period - 2; break;
        }
      } else {
        // the valence d/f slots were pulled into row 1; their natural rows
        // (2 for d, 2-3 for f) have no physical preimage
        if (l == Subshell::d && row == 2) return std::nullopt;
        if (l == Subshell::f && (row == 2 || row == 3)) return std::nullopt;
        o.n = period - row + 1;
      }
      int idx = orbital_index(o);
      if (idx < 0 || v > capacity(l)) return std::nullopt;
      config.occ[idx] = v;
    }
  return config;
}

std::array<int, 19> vacancies_original(const ElectronConfiguration& config) {
  std::array<int, 19> out{};
  int period = config.period();
  if (period == 0) return out;
  ElectronConfiguration noble = madelung_fill(noble_gas_z(period));
  for (int i = 0; i < kNumOrbitals; ++i)
    if (noble.occ[i] > 0) out[i] = noble.occ[i] - config.occ[i];
  return out;
}

std::array<int, 4> vacancies_realigned(const ElectronConfiguration& config) {
  std::array<int, 4> out{};
  int period = config.period();
  if (period == 0) return out;
  RealignedGrid own = realign_subshells(config);
  RealignedGrid noble = realign_subshells(madelung_fill(noble_gas_z(period)));
  for (int c = 0; c < 4; ++c)
    out[c] = noble.at(1, static_cast<Subshell>(c)) - own.at(1, static_cast<Subshell>(c));
  return out;
}

std::vector<double> encode_period(int period, PeriodMode mode) {
  if (period < 1 || period > 7) throw std::invalid_argument("encode_period: period out of range");
  if (mode == PeriodMode::normalized) return {period / 7.0};
  if (mode == PeriodMode::one_hot) {
    std::vector<double> v(7, 0.0);
    v[period - 1] = 1.0;
    return v;
  }
  return {};
}

std::vector<double> select_features(const RealignedGrid& grid, Variant variant) {
  auto cell = [&](int row, char l) {
    return static_cast<double>(grid.at(row, elements::subshell_from_letter(l)));
  };
  switch (variant) {
    case Variant::image28: {
      std::vector<double> out(28);
      for (int i = 0; i < 28; ++i) out[i] = grid.cells[i];
      return out;
    }
    case Variant::outer11:
      return {cell(4, 'd'), cell(4, 'f'), cell(3, 's'), cell(3, 'p'), cell(3, 'd'),
              cell(2, 's'), cell(2, 'p'), cell(1, 's'), cell(1, 'p'), cell(1, 'd'),
              cell(1, 'f')};
    case Variant::valence4:
      return {cell(1, 's'), cell(1, 'p'), cell(1, 'd'), cell(1, 'f')};
    default:
      throw std::invalid_argument("select_features: variant is not grid-based");
  }
}

std::vector<double> element_features(const ElementRecord& rec, Variant variant, RealignMode mode) {
  switch (variant) {
    case Variant::shell7: {
      std::array<int, 7> shells = mode == RealignMode::original ? rec.config.shell_totals()
                                                                : realign_shells(rec.config);
      return std::vector<double>(shells.begin(), shells.end());
    }
    case Variant::image28:
    case Variant::outer11:
    case Variant::valence4:
      return select_features(realign_subshells(rec.config), variant);
    case Variant::vac19: {
      std::array<int, 19> v = vacancies_original(rec.config);
      return std::vector<double>(v.begin(), v.end());
    }
    case Variant::vac4: {
      std::array<int, 4> v = vacancies_realigned(rec.config);
      return std::vector<double>(v.begin(), v.end());
    }
  }
  throw std::invalid_argument("unknown feature variant");
}

namespace {

std::vector<std::string> variant_columns(Variant variant) {
  switch (variant) {
    case Variant::shell7:
      return {"_1", "_2", "_3", "_4", "_5", "_6", "_7"};
    case Variant::image28: {
      std::vector<std::string> cols;
      for (int row = 1; row <= 7; ++row)
        for (char l : {'s', 'p', 'd', 'f'}) cols.push_back("_" + std::to_string(row) + l);
      return cols;
    }
    case Variant::outer11:
      return {"_4d", "_4f", "_3s", "_3p", "_3d", "_2s", "_2p", "_1s", "_1p", "_1d", "_1f"};
    case Variant::valence4:
      return {"_1s", "_1p", "_1d", "_1f"};
    case Variant::vac19: {
      std::vector<std::string> cols;
      for (const Orbital& o : orbital_list()) cols.push_back("vac_" + o.name());
      return cols;
    }
    case Variant::vac4:
      return {"vac_1s", "vac_1p", "vac_1d", "vac_1f"};
  }
  return {};
}

double round_half_even(double x) {
  double r = std::nearbyint(x);  // FE_TONEAREST: ties to even
  return r;
}

}  // namespace

nn::Tensor FeatureMatrix::tensor() const {
  std::vector<int> shape = image_shaped() ? std::vector<int>{rows, 7, 4, 1}
                                          : std::vector<int>{rows, cols};
  return nn::Tensor(shape, data);
}

bool FeatureMatrix::image_shaped() const {
  return !recipe.transposed && recipe.variant == Variant::image28 &&
         recipe.period == PeriodMode::none;
}

FeatureMatrix build_feature_matrix(const ElementTable& table, const Recipe& recipe) {
  if (recipe.duplication < 1) throw std::invalid_argument("recipe: duplication must be >= 1");
  if (recipe.noise.alpha < 0.0) throw std::invalid_argument("recipe: noise alpha must be >= 0");
  if (recipe.transposed)
    throw std::invalid_argument("build_feature_matrix: use transpose_for_variables");

  FeatureMatrix m;
  m.recipe = recipe;
  m.col_labels = variant_columns(recipe.variant);
  int base_cols = static_cast<int>(m.col_labels.size());
  int n = static_cast<int>(table.size());

  std::vector<double> base(static_cast<std::size_t>(n) * base_cols);
  for (int r = 0; r < n; ++r) {
    std::vector<double> feats =
        element_features(table.records()[r], recipe.variant, recipe.realign);
    std::copy(feats.begin(), feats.end(), base.begin() + static_cast<std::size_t>(r) * base_cols);
  }

  if (recipe.sqrt_transform)
    for (double& v : base) v = std::sqrt(v);

  m.divisors.assign(base_cols, 1.0);
  if (recipe.norm == NormMode::total) {
    double global = 0.0;
    for (double v : base) global = std::max(global, v);
    if (global > 0.0) {
      for (double& v : base) v /= global;
      m.divisors.assign(base_cols, global);
    }
  } else {
    for (int c = 0; c < base_cols; ++c) {
      double top = 0.0;
      for (int r = 0; r < n; ++r) top = std::max(top, base[static_cast<std::size_t>(r) * base_cols + c]);
      if (top > 0.0) {
        for (int r = 0; r < n; ++r) base[static_cast<std::size_t>(r) * base_cols + c] /= top;
        m.divisors[c] = top;
      }
    }
  }

  std::vector<double> period_cols;
  int extra = 0;
  if (recipe.period != PeriodMode::none) {
    extra = recipe.period == PeriodMode::normalized ? 1 : 7;
    period_cols.resize(static_cast<std::size_t>(n) * extra);
    for (int r = 0; r < n; ++r) {
      std::vector<double> enc = encode_period(table.records()[r].period, recipe.period);
      std::copy(enc.begin(), enc.end(), period_cols.begin() + static_cast<std::size_t>(r) * extra);
    }
    if (extra == 1) {
      m.col_labels.push_back("period");
    } else {
      for (int p = 1; p <= 7; ++p) m.col_labels.push_back("period" + std::to_string(p));
    }
    m.divisors.resize(base_cols + extra, 1.0);
  }

  m.cols = base_cols + extra;
  m.rows = n * recipe.duplication;
  m.data.resize(static_cast<std::size_t>(m.rows) * m.cols);
  m.row_labels.reserve(m.rows);
  m.row_entities.reserve(m.rows);
  for (int dup = 0; dup < recipe.duplication; ++dup)
    for (int r = 0; r < n; ++r) {
      double* dst = m.data.data() + (static_cast<std::size_t>(dup) * n + r) * m.cols;
      std::copy_n(base.begin() + static_cast<std::size_t>(r) * base_cols, base_cols, dst);
      if (extra)
        std::copy_n(period_cols.begin() + static_cast<std::size_t>(r) * extra, extra,
                    dst + base_cols);
      m.row_labels.push_back(table.records()[r].symbol);
      m.row_entities.push_back(table.records()[r].z);
    }

  if (recipe.noise.alpha > 0.0) {
    nn::Rng rng(recipe.noise.seed);
    for (double& v : m.data) {
      v += recipe.noise.alpha * rng.normal();
      v = std::clamp(v, 0.0, 1.0);
    }
  }
  return m;
}

FeatureMatrix transpose_for_variables(const ElementTable& table, int duplication) {
  if (duplication < 1) throw std::invalid_argument("duplication must be >= 1");
  FeatureMatrix m;
  m.recipe.transposed = true;
  m.recipe.duplication = duplication;
  m.recipe.norm = NormMode::total;
  int n_el = static_cast<int>(table.size());
  m.cols = n_el;
  m.rows = kNumOrbitals * duplication;
  m.divisors.assign(n_el, 14.0);
  for (const ElementRecord& r : table.records()) m.col_labels.push_back(r.symbol);
  m.data.resize(static_cast<std::size_t>(m.rows) * m.cols);
  for (int dup = 0; dup < duplication; ++dup)
    for (int o = 0; o < kNumOrbitals; ++o) {
      double* dst = m.data.data() + (static_cast<std::size_t>(dup) * kNumOrbitals + o) * m.cols;
      for (int e = 0; e < n_el; ++e) dst[e] = table.records()[e].config.occ[o] / 14.0;
      m.row_labels.push_back(orbital_list()[o].name());
      m.row_entities.push_back(o);
    }
  return m;
}

std::vector<double> featurize_one(const ElementRecord& rec, const Recipe& recipe,
                                  const std::vector<double>& divisors) {
  if (recipe.transposed)
    throw std::invalid_argument("featurize_one: recipe is a transposed variables recipe");
  std::vector<double> feats = element_features(rec, recipe.variant, recipe.realign);
  if (recipe.sqrt_transform)
    for (double& v : feats) v = std::sqrt(v);
  if (divisors.size() < feats.size())
    throw std::invalid_argument("featurize_one: divisor vector too short");
  for (std::size_t c = 0; c < feats.size(); ++c) feats[c] /= divisors[c];
  if (recipe.period != PeriodMode::none) {
    std::vector<double> enc = encode_period(rec.period, recipe.period);
    feats.insert(feats.end(), enc.begin(), enc.end());
  }
  return feats;
}

std::vector<double> featurize_one(const ElementRecord& rec, const FeatureMatrix& matrix) {
  return featurize_one(rec, matrix.recipe, matrix.divisors);
}

RealignedGrid round_decoded_image(const std::vector<double>& decoded,
                                  const std::vector<double>& divisors) {
  if (decoded.size() != 28 || divisors.size() < 28)
    throw std::invalid_argument("round_decoded_image: expects a 28-cell image");
  RealignedGrid grid;
  for (int i = 0; i < 28; ++i) {
    double raw = decoded[i] * divisors[i];
    int v = static_cast<int>(round_half_even(raw));
    int cap = capacity(static_cast<Subshell>(i % 4));
    grid.cells[i] = std::clamp(v, 0, cap);
  }
  return grid;
}

std::string Recipe::to_string() const {
  if (transposed) return "transposed,dup" + std::to_string(duplication);
  std::string s = feat::to_string(variant);
  if (variant == Variant::shell7 && realign == RealignMode::original) s += ",orig";
  s += std::string(",") + feat::to_string(norm);
  if (sqrt_transform) s += ",sqrt";
  if (duplication != 1) s += ",dup" + std::to_string(duplication);
  if (noise.alpha > 0.0) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), ",noise%g@%llu", noise.alpha,
                  static_cast<unsigned long long>(noise.seed));
    s += buf;
  }
  if (period == PeriodMode::normalized) s += ",periodnorm";
  if (period == PeriodMode::one_hot) s += ",periodonehot";
  return s;
}

Recipe Recipe::parse(const std::string& text) {
  Recipe r;
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      tokens.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  tokens.push_back(cur);

  bool have_variant = false;
  for (const std::string& t : tokens) {
    if (t.empty()) continue;
    if (t == "shell7") { r.variant = Variant::shell7; have_variant = true; }
    else if (t == "image28") { r.variant = Variant::image28; have_variant = true; }
    else if (t == "outer11") { r.variant = Variant::outer11; have_variant = true; }
    else if (t == "valence4") { r.variant = Variant::valence4; have_variant = true; }
    else if (t == "vac19") { r.variant = Variant::vac19; have_variant = true; }
    else if (t == "vac4") { r.variant = Variant::vac4; have_variant = true; }
    else if (t == "transposed") { r.transposed = true; have_variant = true; }
    else if (t == "orig") r.realign = RealignMode::original;
    else if (t == "total") r.norm = NormMode::total;
    else if (t == "col") r.norm = NormMode::per_column;
    else if (t == "sqrt") r.sqrt_transform = true;
    else if (t == "periodnorm") r.period = PeriodMode::normalized;
    else if (t == "periodonehot") r.period = PeriodMode::one_hot;
    else if (t.rfind("dup", 0) == 0) r.duplication = std::stoi(t.substr(3));
    else if (t.rfind("noise", 0) == 0) {
      std::size_t at = t.find('@');
      r.noise.alpha = std::stod(t.substr(5, at - 5));
      if (at != std::string::npos) r.noise.seed = std::stoull(t.substr(at + 1));
    } else {
      throw std::invalid_argument("recipe: unknown token '" + t + "'");
    }
  }
  if (!have_variant) throw std::invalid_argument("recipe: missing feature variant");
  return r;
}

const char* to_string(Variant v) {
  switch (v) {
    case Variant::shell7: return "shell7";
    case Variant::image28: return "image28";
    case Variant::outer11: return "outer11";
    case Variant::valence4: return "valence4";
    case Variant::vac19: return "vac19";
    case Variant::vac4: return "vac4";
  }
  return "?";
}

const char* to_string(NormMode m) { return m == NormMode::total ? "total" : "col"; }
const char* to_string(RealignMode m) { return m == RealignMode::original ? "orig" : "valence"; }
const char* to_string(PeriodMode m) {
  switch (m) {
    case PeriodMode::none: return "none";
    case PeriodMode::normalized: return "norm";
    case PeriodMode::one_hot: return "onehot";
  }
  return "?";
}

}  // namespace elemvae::feat
