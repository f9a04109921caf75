#pragma once

#include <cstdint>
#include <vector>

#include "becload/basis.hpp"
#include "becload/rng.hpp"

namespace becload {

// Ideal Bose gas bookkeeping on the truncated shell basis. Temperatures are
// k_B T in units of omega throughout; mode energies enter relative to the
// condensate level, so shell n contributes at energy n * omega.

// sum over non-condensate modes of 1/(exp((n*omega - mu)/kT) - 1), using the
// shell degeneracies (n+1)(n+2)/2. mu is measured from the condensate level
// and must be < omega (the first excited shell).
double noncondensate_occupation_sum(double kT, double mu, int shells, double omega);

// total occupation including the condensate mode at energy 0 (requires mu < 0)
double total_occupation_sum(double kT, double mu, int shells, double omega);

// chemical potential (relative to the condensate level, always < 0) solving
// total_occupation_sum(kT, mu) = n_atoms. kT = 0 returns -inf sentinel (all
// condensed).
double fit_chemical_potential(double kT, std::int64_t n_atoms, int shells, double omega);

// Per-mode Bose-Einstein factors q_m = exp(-(e_m - mu)/kT) for the
// non-condensate modes of `ground` (entry 0 is 0). Geometric draws with these
// ratios reproduce the grand-canonical marginals.
std::vector<double> bose_factors(const Basis& ground, double kT, double mu, double omega);

// Same sums over an explicit basis (needed for mode-count truncations that
// are not full shells).
double total_occupation_sum_basis(const Basis& ground, double kT, double mu, double omega);
double fit_chemical_potential_basis(const Basis& ground, double kT, std::int64_t n_atoms,
                                    double omega);

}  // namespace becload
