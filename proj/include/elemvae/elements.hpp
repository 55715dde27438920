#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace elemvae::elements {

enum class Subshell : int { s = 0, p = 1, d = 2, f = 3 };

constexpr int kNumOrbitals = 19;  // 1s .. 7p
constexpr int kNumShells = 7;
constexpr int kNumElements = 118;

int capacity(Subshell l);                // 2(2l+1)
int azimuthal_number(Subshell l);        // l
char subshell_letter(Subshell l);
Subshell subshell_from_letter(char c);

struct Orbital {
  int n = 1;
  Subshell l = Subshell::s;

  bool operator==(const Orbital&) const = default;
  std::string name() const;  // "4f"
};

/// The shell an orbital belongs to in the periodic system: n for s/p,
/// n+1 for d, n+2 for f (the row of the element filling it).
int period_shell(const Orbital& o);

/// The 19 physical orbitals in table order:
/// 1s 2s 2p 3s 3p 3d 4s 4p 4d 4f 5s 5p 5d 5f 6s 6p 6d 7s 7p
const std::array<Orbital, kNumOrbitals>& orbital_list();
int orbital_index(const Orbital& o);                  // -1 if not one of the 19
std::optional<Orbital> orbital_from_name(const std::string& name);

/// Occupancies over the 19 orbitals, indexed in table order.
struct ElectronConfiguration {
  std::array<int, kNumOrbitals> occ{};

  int total() const;
  int occupancy(const Orbital& o) const;
  void set(const Orbital& o, int count);
  /// electrons per principal shell 1..7
  std::array<int, kNumShells> shell_totals() const;
  /// max period_shell over occupied orbitals; 0 for the empty configuration
  int period() const;
  /// occupancy within capacity for every orbital
  bool valid() const;

  bool operator==(const ElectronConfiguration&) const = default;
  std::string to_string() const;  // "1s2 2s2 2p4"
};

/// The 19 orbitals sorted by (n + l), ties broken by n: the filling order.
const std::array<Orbital, kNumOrbitals>& madelung_sequence();

/// Fill orbitals to capacity in Madelung order; only the last touched
/// orbital may be partial.
ElectronConfiguration madelung_fill(int n_electrons);

bool is_madelung_consistent(const ElectronConfiguration& config);

struct ElementRecord {
  int z = 0;
  std::string symbol;
  std::string name;
  int period = 0;  // derived from the configuration
  std::optional<int> group;
  Subshell block = Subshell::s;
  std::string category;
  std::optional<double> melting_point;   // kelvin
  std::optional<int> discovery_year;
  ElectronConfiguration config;
};

class ElementTable {
 public:
  const std::vector<ElementRecord>& records() const { return records_; }
  const ElementRecord& by_z(int z) const;
  std::size_t size() const { return records_.size(); }

  /// Parse and validate the CSV snapshot; throws DataError naming the
  /// offending element and field.
  static ElementTable load(std::istream& in);
  static ElementTable load_file(const std::string& path);

  /// Restrict to a subset of atomic numbers (order preserved).
  ElementTable subset(const std::set<int>& zs) const;

 private:
  std::vector<ElementRecord> records_;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Elements whose actual configuration differs from madelung_fill(z).
std::set<int> madelung_violations(const ElementTable& table);

/// Noble gas closing the given period (He, Ne, Ar, Kr, Xe, Rn, Og).
int noble_gas_z(int period);

}  // namespace elemvae::elements
