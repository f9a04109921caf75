#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace becload {

// Quantum numbers of one 3D isotropic oscillator mode.
struct Mode {
  int nx = 0, ny = 0, nz = 0;

  int shell() const { return nx + ny + nz; }
  bool operator==(const Mode& o) const { return nx == o.nx && ny == o.ny && nz == o.nz; }
  bool operator!=(const Mode& o) const { return !(*this == o); }
  // canonical total order: ascending shell, then lexicographic (nx, ny, nz)
  bool operator<(const Mode& o) const {
    if (shell() != o.shell()) return shell() < o.shell();
    if (nx != o.nx) return nx < o.nx;
    if (ny != o.ny) return ny < o.ny;
    return nz < o.nz;
  }
  std::string str() const {
    return "(" + std::to_string(nx) + "," + std::to_string(ny) + "," + std::to_string(nz) + ")";
  }
};

// Physical configuration shared by every module. hbar = 1; energies in units
// of omega unless stated otherwise.
struct TrapSpec {
  double omega = 1.0;                 // trap angular frequency (both traps)
  int shells_g = 1;                   // ground-trap shell truncation
  int shells_e = 1;                   // excited-trap shell truncation
  double eta_sq = 0.0;                // Lamb-Dicke parameter eta^2 = omega_r / omega
  double gamma = 1.0;                 // spontaneous emission rate
  double transition_frequency = 0.0;  // omega_0; global phase only
  std::int64_t n_atoms = 1;           // N
  std::int64_t n_condensed = 1;       // N0

  void validate() const;  // throws std::invalid_argument on violated invariants
  double eta() const;
};

std::int64_t modes_in_shell(int shell);           // (n+1)(n+2)/2
std::int64_t modes_below_shell(int shells);       // s(s+1)(s+2)/6

// All (nx,ny,nz) with nx+ny+nz < shells, in canonical order.
// shells = 0 -> std::invalid_argument.
std::vector<Mode> enumerate_modes(int shells);

// omega * (nx+ny+nz + 3/2)
double mode_energy(const Mode& m, const TrapSpec& spec);

// A fixed, canonically ordered list of modes with O(1) flat-index lookup.
// Normally a full shell truncation; a plain mode-count prefix is used by the
// reference master-equation benchmarks.
class Basis {
public:
  Basis() = default;
  static Basis shells(int shell_count);
  static Basis prefix(std::int64_t mode_count);  // first K modes of canonical order

  std::size_t size() const { return modes_.size(); }
  const Mode& mode(std::size_t flat) const { return modes_[flat]; }
  const std::vector<Mode>& modes() const { return modes_; }
  std::int64_t index_of(const Mode& m) const;  // -1 when absent
  int max_axis_quantum() const;                // largest nx/ny/nz present

private:
  std::vector<Mode> modes_;
};

}  // namespace becload
