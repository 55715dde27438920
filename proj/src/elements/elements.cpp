#include "elemvae/elements.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>

namespace elemvae::elements {

int capacity(Subshell l) { return 2 * (2 * azimuthal_number(l) + 1); }

int azimuthal_number(Subshell l) { return static_cast<int>(l); }

char subshell_letter(Subshell l) { return "spdf"[static_cast<int>(l)]; }

Subshell subshell_from_letter(char c) {
  switch (c) {
    case 's': return Subshell::s;
    case 'p': return Subshell::p;
    case 'd': return Subshell::d;
    case 'f': return Subshell::f;
  }
  throw DataError(std::string("unknown subshell letter: ") + c);
}

std::string Orbital::name() const { return std::to_string(n) + subshell_letter(l); }

int period_shell(const Orbital& o) {
  switch (o.l) {
    case Subshell::s:
    case Subshell::p: return o.n;
    case Subshell::d: return o.n + 1;
    case Subshell::f: return o.n + 2;
  }
  return o.n;
}

const std::array<Orbital, kNumOrbitals>& orbital_list() {
  static const std::array<Orbital, kNumOrbitals> list = {{
      {1, Subshell::s}, {2, Subshell::s}, {2, Subshell::p}, {3, Subshell::s}, {3, Subshell::p},
      {3, Subshell::d}, {4, Subshell::s}, {4, Subshell::p}, {4, Subshell::d}, {4, Subshell::f},
      {5, Subshell::s}, {5, Subshell::p}, {5, Subshell::d}, {5, Subshell::f}, {6, Subshell::s},
      {6, Subshell::p}, {6, Subshell::d}, {7, Subshell::s}, {7, Subshell::p},
  }};
  return list;
}

int orbital_index(const Orbital& o) {
  const auto& list = orbital_list();
  for (int i = 0; i < kNumOrbitals; ++i)
    if (list[i] == o) return i;
  return -1;
}

std::optional<Orbital> orbital_from_name(const std::string& name) {
  if (name.size() != 2 || name[0] < '1' || name[0] > '7') return std::nullopt;
  Orbital o{name[0] - '0', Subshell::s};
  switch (name[1]) {
    case 's': o.l = Subshell::s; break;
    case 'p': o.l = Subshell::p; break;
    case 'd': o.l = Subshell::d; break;
    case 'f': o.l = Subshell::f; break;
    default: return std::nullopt;
  }
  return orbital_index(o) >= 0 ? std::optional<Orbital>(o) : std::nullopt;
}

int ElectronConfiguration::total() const {
  int t = 0;
  for (int v : occ) t += v;
  return t;
}

int ElectronConfiguration::occupancy(const Orbital& o) const {
  int i = orbital_index(o);
  return i < 0 ? 0 : occ[i];
}

void ElectronConfiguration::set(const Orbital& o, int count) {
  int i = orbital_index(o);
  if (i < 0) throw DataError("not a physical orbital: " + o.name());
  occ[i] = count;
}

std::array<int, kNumShells> ElectronConfiguration::shell_totals() const {
  std::array<int, kNumShells> t{};
  for (int i = 0; i < kNumOrbitals; ++i) t[orbital_list()[i].n - 1] += occ[i];
  return t;
}

int ElectronConfiguration::period() const {
  int p = 0;
  for (int i = 0; i < kNumOrbitals; ++i)
    if (occ[i] > 0) p = std::max(p, period_shell(orbital_list()[i]));
  return p;
}

bool ElectronConfiguration::valid() const {
  for (int i = 0; i < kNumOrbitals; ++i)
    if (occ[i] < 0 || occ[i] > capacity(orbital_list()[i].l)) return false;
  return true;
}

std::string ElectronConfiguration::to_string() const {
  std::string out;
  for (int i = 0; i < kNumOrbitals; ++i) {
    if (occ[i] == 0) continue;
    if (!out.empty()) out += ' ';
    out += orbital_list()[i].name() + std::to_string(occ[i]);
  }
  return out.empty() ? "(empty)" : out;
}

const std::array<Orbital, kNumOrbitals>& madelung_sequence() {
  static const std::array<Orbital, kNumOrbitals> seq = [] {
    std::array<Orbital, kNumOrbitals> s = orbital_list();
    std::stable_sort(s.begin(), s.end(), [](const Orbital& a, const Orbital& b) {
      int ka = a.n + azimuthal_number(a.l), kb = b.n + azimuthal_number(b.l);
      return ka != kb ? ka < kb : a.n < b.n;
    });
    return s;
  }();
  return seq;
}

ElectronConfiguration madelung_fill(int n_electrons) {
  if (n_electrons < 0 || n_electrons > kNumElements)
    throw DataError("madelung_fill: electron count out of range");
  ElectronConfiguration config;
  int left = n_electrons;
  for (const Orbital& o : madelung_sequence()) {
    if (left == 0) break;
    int take = std::min(left, capacity(o.l));
    config.set(o, take);
    left -= take;
  }
  return config;
}

bool is_madelung_consistent(const ElectronConfiguration& config) {
  return config == madelung_fill(config.total());
}

std::set<int> madelung_violations(const ElementTable& table) {
  std::set<int> out;
  for (const ElementRecord& r : table.records())
    if (!is_madelung_consistent(r.config)) out.insert(r.z);
  return out;
}

int noble_gas_z(int period) {
  static const int kNoble[] = {2, 10, 18, 36, 54, 86, 118};
  if (period < 1 || period > 7) throw DataError("no noble gas for period " + std::to_string(period));
  return kNoble[period - 1];
}

const ElementRecord& ElementTable::by_z(int z) const {
  for (const ElementRecord& r : records_)
    if (r.z == z) return r;
  throw DataError("no element with z=" + std::to_string(z));
}

ElementTable ElementTable::subset(const std::set<int>& zs) const {
  ElementTable t;
  for (const ElementRecord& r : records_)
    if (zs.count(r.z)) t.records_.push_back(r);
  return t;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw DataError("element data: " + where + ": " + what);
}

}  // namespace

ElementTable ElementTable::load(std::istream& in) {
  std::string line;
  // header
  if (!std::getline(in, line)) fail("header", "empty input");
  std::vector<std::string> header = split_csv_line(line);
  const std::size_t kMeta = 8;
  if (header.size() != kMeta + kNumOrbitals)
    fail("header", "expected " + std::to_string(kMeta + kNumOrbitals) + " columns, got " +
                       std::to_string(header.size()));
  for (int i = 0; i < kNumOrbitals; ++i)
    if (header[kMeta + i] != orbital_list()[i].name())
      fail("header", "occupancy column " + std::to_string(i) + " must be " +
                         orbital_list()[i].name() + ", got '" + header[kMeta + i] + "'");

  ElementTable table;
  std::set<int> seen;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells = split_csv_line(line);
    std::string where = "line " + std::to_string(line_no);
    if (cells.size() != kMeta + kNumOrbitals) fail(where, "malformed row");

    ElementRecord rec;
    try {
      rec.z = std::stoi(cells[0]);
    } catch (...) {
      fail(where, "bad atomic number '" + cells[0] + "'");
    }
    where += " (" + cells[1] + ")";
    rec.symbol = cells[1];
    rec.name = cells[2];
    if (rec.symbol.empty() || rec.name.empty()) fail(where, "missing symbol or name");
    if (!cells[3].empty()) {
      int group = std::stoi(cells[3]);
      if (group < 1 || group > 18) fail(where, "group out of range");
      rec.group = group;
    }
    if (cells[4].size() != 1) fail(where, "bad block '" + cells[4] + "'");
    rec.block = subshell_from_letter(cells[4][0]);
    rec.category = cells[5];
    if (!cells[6].empty()) rec.melting_point = std::stod(cells[6]);
    if (!cells[7].empty()) rec.discovery_year = std::stoi(cells[7]);

    for (int i = 0; i < kNumOrbitals; ++i) {
      const std::string& cell = cells[kMeta + i];
      int v = 0;
      if (!cell.empty()) {
        try {
          v = std::stoi(cell);
        } catch (...) {
          fail(where, "bad occupancy in column " + orbital_list()[i].name());
        }
      }
      int cap = capacity(orbital_list()[i].l);
      if (v < 0 || v > cap)
        fail(where, "occupancy " + std::to_string(v) + " exceeds capacity " + std::to_string(cap) +
                        " of " + orbital_list()[i].name());
      rec.config.occ[i] = v;
    }

    if (rec.z < 1 || rec.z > kNumElements) fail(where, "atomic number out of range");
    if (seen.count(rec.z)) fail(where, "duplicate atomic number " + std::to_string(rec.z));
    seen.insert(rec.z);
    if (rec.config.total() != rec.z)
      fail(where, "configuration total " + std::to_string(rec.config.total()) +
                      " does not equal z=" + std::to_string(rec.z));
    rec.period = rec.config.period();
    table.records_.push_back(std::move(rec));
  }

  std::sort(table.records_.begin(), table.records_.end(),
            [](const ElementRecord& a, const ElementRecord& b) { return a.z < b.z; });

  // the full snapshot must be contiguous 1..118; smaller files stay subsets
  if (table.records_.size() == kNumElements) {
    for (int i = 0; i < kNumElements; ++i)
      if (table.records_[i].z != i + 1) fail("table", "atomic numbers are not contiguous 1..118");
  }
  if (table.records_.empty()) fail("table", "no element rows");
  return table;
}

ElementTable ElementTable::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open element data file: " + path);
  return load(in);
}

}  // namespace elemvae::elements
