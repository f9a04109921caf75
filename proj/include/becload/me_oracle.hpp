#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <vector>

#include "becload/alpha.hpp"
#include "becload/decay.hpp"

namespace becload {

// Brute-force reference integrator of the full master equation on tiny
// truncated Fock spaces. Deliberately independent of the perturbative
// machinery: it evolves the many-body density matrix directly and reads the
// channel probabilities off the photon-emitted sector.

struct OracleControl {
  int deviation_cap = 3;       // max total sideband deviation from the initial draw
  std::size_t dim_cap = 5000;  // refuse larger single-excitation sectors
  double rtol = 1e-10;
  double atol = 1e-13;
  double excited_stop = 1e-10;     // residual excited population terminating the run
  bool include_trap_energies = true;
  std::int64_t n_trajectories = 0;  // quantum-jump runs (0 = caller decides)
};

struct FockBasis {
  Basis ground, excited;
  // single-excitation sector: sideband occupations + excited mode index
  std::vector<std::vector<std::int64_t>> pre_ground;
  std::vector<int> pre_excited;
  // photon-emitted sector: ground occupations only (N + 1 atoms)
  std::vector<std::vector<std::int64_t>> post_ground;

  std::size_t pre_size() const { return pre_ground.size(); }
  std::size_t post_size() const { return post_ground.size(); }
  std::int64_t post_index(const std::vector<std::int64_t>& occ) const;

  static FockBasis build(const Basis& ground, const Basis& excited,
                         const OccupationState& initial, const OracleControl& ctl);

private:
  std::map<std::vector<std::int64_t>, std::size_t> post_map_;
  std::map<std::pair<std::vector<std::int64_t>, int>, std::size_t> pre_map_;
  friend struct OracleOperators;
};

struct CascadeResult {
  FockBasis basis;
  std::vector<double> probabilities;  // per post state
  double trace_deficit = 0.0;         // 1 - (sum P + residual excited trace)
  double residual_excited = 0.0;
  double t_end = 0.0;

  double probability_of(const std::vector<std::int64_t>& ground_occupations) const;
};

// Evolves rho from |initial><initial| until the excited population falls
// below ctl.excited_stop or t_max is reached. Throws ClosureError when a jump
// image escapes the enumerated basis and AccuracyError when the final trace
// deficit exceeds 1e-6.
CascadeResult integrate_cascade(const TrapSpec& spec, const OccupationState& initial,
                                const AlphaTensor& alpha, double t_max,
                                const OracleControl& ctl);

struct JumpEstimate {
  FockBasis basis;
  std::vector<double> probabilities;  // per post state
  std::vector<double> std_errors;
  double no_jump_fraction = 0.0;

  double probability_of(const std::vector<std::int64_t>& ground_occupations) const;
  double std_error_of(const std::vector<std::int64_t>& ground_occupations) const;
};

// Stochastic-wavefunction unraveling of the same master equation; an
// independent cross-check of the deterministic integrator.
JumpEstimate quantum_jump_estimate(const TrapSpec& spec, const OccupationState& initial,
                                   const AlphaTensor& alpha, double t_max,
                                   const OracleControl& ctl, std::int64_t n_trajectories,
                                   std::uint64_t rng_seed, unsigned threads = 1);

}  // namespace becload
