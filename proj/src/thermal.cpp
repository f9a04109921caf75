#include "becload/thermal.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace becload {

double noncondensate_occupation_sum(double kT, double mu, int shells, double omega) {
  if (kT <= 0.0) return 0.0;
  double acc = 0.0;
  for (int n = 1; n < shells; ++n) {
    const double x = (n * omega - mu) / kT;
    // 1/(e^x - 1) via expm1 for small-x accuracy
    acc += static_cast<double>(modes_in_shell(n)) / std::expm1(x);
  }
  return acc;
}

double total_occupation_sum(double kT, double mu, int shells, double omega) {
  if (kT <= 0.0) return 0.0;
  if (!(mu < 0.0)) throw std::invalid_argument("total_occupation_sum: mu must be < 0");
  return 1.0 / std::expm1(-mu / kT) + noncondensate_occupation_sum(kT, mu, shells, omega);
}

double fit_chemical_potential(double kT, std::int64_t n_atoms, int shells, double omega) {
  if (kT <= 0.0) return -std::numeric_limits<double>::infinity();
  const double target = static_cast<double>(n_atoms);
  // bracket: sum -> infinity as mu -> 0-, sum -> 0 as mu -> -infinity
  double hi = -1e-16 * kT;
  while (total_occupation_sum(kT, hi, shells, omega) < target) hi *= 0.5;
  double lo = -kT;
  while (total_occupation_sum(kT, lo, shells, omega) > target) lo *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (total_occupation_sum(kT, mid, shells, omega) < target)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-14 * std::max(1.0, std::abs(lo))) break;
  }
  return 0.5 * (lo + hi);
}

double total_occupation_sum_basis(const Basis& ground, double kT, double mu, double omega) {
  if (kT <= 0.0) return 0.0;
  if (!(mu < 0.0)) throw std::invalid_argument("total_occupation_sum_basis: mu must be < 0");
  double acc = 1.0 / std::expm1(-mu / kT);
  for (std::size_t m = 1; m < ground.size(); ++m)
    acc += 1.0 / std::expm1((ground.mode(m).shell() * omega - mu) / kT);
  return acc;
}

double fit_chemical_potential_basis(const Basis& ground, double kT, std::int64_t n_atoms,
                                    double omega) {
  if (kT <= 0.0) return -std::numeric_limits<double>::infinity();
  const double target = static_cast<double>(n_atoms);
  double hi = -1e-16 * kT;
  while (total_occupation_sum_basis(ground, kT, hi, omega) < target) hi *= 0.5;
  double lo = -kT;
  while (total_occupation_sum_basis(ground, kT, lo, omega) > target) lo *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (total_occupation_sum_basis(ground, kT, mid, omega) < target)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-14 * std::max(1.0, std::abs(lo))) break;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> bose_factors(const Basis& ground, double kT, double mu, double omega) {
  std::vector<double> q(ground.size(), 0.0);
  if (kT <= 0.0) return q;
  for (std::size_t m = 1; m < ground.size(); ++m) {
    const double e = ground.mode(m).shell() * omega;
    q[m] = std::exp(-(e - mu) / kT);
  }
  return q;
}

}  // namespace becload
