#include "becload/basis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace becload {

void TrapSpec::validate() const {
  if (shells_g < 1) throw std::invalid_argument("shells_g must be >= 1");
  if (shells_e < 1) throw std::invalid_argument("shells_e must be >= 1");
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be > 0");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  if (eta_sq < 0.0) throw std::invalid_argument("eta_sq must be >= 0");
  if (n_atoms < 0) throw std::invalid_argument("n_atoms must be >= 0");
  if (n_condensed < 0 || n_condensed > n_atoms)
    throw std::invalid_argument("n_condensed must satisfy 0 <= N0 <= N");
}

double TrapSpec::eta() const { return std::sqrt(eta_sq); }

std::int64_t modes_in_shell(int n) {
  return static_cast<std::int64_t>(n + 1) * (n + 2) / 2;
}

std::int64_t modes_below_shell(int s) {
  return static_cast<std::int64_t>(s) * (s + 1) * (s + 2) / 6;
}

std::vector<Mode> enumerate_modes(int shells) {
  if (shells < 1) throw std::invalid_argument("enumerate_modes: shells must be >= 1");
  std::vector<Mode> out;
  out.reserve(static_cast<std::size_t>(modes_below_shell(shells)));
  for (int n = 0; n < shells; ++n)
    for (int nx = 0; nx <= n; ++nx)
      for (int ny = 0; ny <= n - nx; ++ny) out.push_back(Mode{nx, ny, n - nx - ny});
  // the loop above emits lexicographic (nx, ny, nz) within each shell already,
  // but sort anyway so the canonical order is enforced by one place only
  std::sort(out.begin(), out.end());
  return out;
}

double mode_energy(const Mode& m, const TrapSpec& spec) {
  return spec.omega * (m.shell() + 1.5);
}

Basis Basis::shells(int shell_count) {
  Basis b;
  b.modes_ = enumerate_modes(shell_count);
  return b;
}

Basis Basis::prefix(std::int64_t mode_count) {
  if (mode_count < 1) throw std::invalid_argument("Basis::prefix: mode_count must be >= 1");
  // smallest shell truncation containing the prefix
  int shells = 1;
  while (modes_below_shell(shells) < mode_count) ++shells;
  Basis b;
  b.modes_ = enumerate_modes(shells);
  b.modes_.resize(static_cast<std::size_t>(mode_count));
  return b;
}

std::int64_t Basis::index_of(const Mode& m) const {
  auto it = std::lower_bound(modes_.begin(), modes_.end(), m);
  if (it == modes_.end() || !(*it == m)) return -1;
  return static_cast<std::int64_t>(it - modes_.begin());
}

int Basis::max_axis_quantum() const {
  int mx = 0;
  for (const auto& m : modes_) mx = std::max({mx, m.nx, m.ny, m.nz});
  return mx;
}

}  // namespace becload
