#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "becload/decay.hpp"

namespace becload {

struct LoadingStep {
  int step = 0;
  std::int64_t n_atoms = 0;
  double n0_mean = 0.0;
  double fraction = 0.0;
  double kTg = 0.0;
  double se_fraction = 0.0;
  BarValidity validity;
};

struct LoadingTrajectory {
  std::vector<LoadingStep> steps;
  std::optional<int> first_invalid_step;
};

// Temperature (k_B T / omega-units) at which the truncated ideal-gas
// occupation sum over the non-condensate shells equals N (1 - fraction), with
// the chemical potential pinned at the condensate level. fraction = 1 -> 0.
// fraction outside (0, 1] -> std::invalid_argument.
double fraction_to_temperature(double fraction, std::int64_t n_atoms, int shells_g,
                               double omega);

struct LoadingConfig {
  double kTe = 1.0;
  double initial_fraction = 0.99;
  int steps = 100;
  int samples_per_step = 64;
  std::uint64_t rng_seed = 1;
  bool zero_p_diagnostic = false;  // force P+ = P0 = 0 (bookkeeping-only loading)
  ValidityThresholds thresholds;
  unsigned threads = 1;
};

// Iterated pump events: derive T_g from the running condensate fraction,
// average one decay event, apply the n' update, load one atom, repeat.
// Collisional rethermalization between events is assumed instantaneous; the
// coupling machinery is reused across steps (the trap geometry never
// changes).
LoadingTrajectory run_loading(const TrapSpec& spec, const DecayMachinery& machinery,
                              const LoadingConfig& cfg);

}  // namespace becload
