#include "becload/loading.hpp"

#include <cmath>
#include <stdexcept>

#include "becload/thermal.hpp"

namespace becload {

double fraction_to_temperature(double fraction, std::int64_t n_atoms, int shells_g,
                               double omega) {
  if (!(fraction > 0.0) || fraction > 1.0)
    throw std::invalid_argument("fraction_to_temperature: fraction must be in (0, 1]");
  if (fraction == 1.0) return 0.0;
  const double target = static_cast<double>(n_atoms) * (1.0 - fraction);
  // the truncated sum grows without bound in T, so a bracket always exists
  double hi = 1.0;
  while (noncondensate_occupation_sum(hi, 0.0, shells_g, omega) < target) {
    hi *= 2.0;
    if (hi > 1e12) break;
  }
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (noncondensate_occupation_sum(mid, 0.0, shells_g, omega) < target)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-10 * omega) break;
  }
  return 0.5 * (lo + hi);
}

LoadingTrajectory run_loading(const TrapSpec& spec, const DecayMachinery& machinery,
                              const LoadingConfig& cfg) {
  spec.validate();
  if (cfg.steps < 0) throw std::invalid_argument("run_loading: steps must be >= 0");
  if (!(cfg.initial_fraction > 0.0) || cfg.initial_fraction > 1.0)
    throw std::invalid_argument("run_loading: initial_fraction must be in (0, 1]");

  LoadingTrajectory traj;
  std::int64_t n = spec.n_atoms;
  double n0_mean = cfg.initial_fraction * static_cast<double>(n);

  for (int step = 0; step < cfg.steps; ++step) {
    const double fraction = n0_mean / static_cast<double>(n);
    const double kTg =
        fraction_to_temperature(std::min(fraction, 1.0), n, spec.shells_g, spec.omega);

    LoadingStep row;
    row.step = step;
    row.kTg = kTg;

    if (cfg.zero_p_diagnostic) {
      n0_mean = n0_mean + 1.0;
      n += 1;
      row.n_atoms = n;
      row.n0_mean = n0_mean;
      row.fraction = n0_mean / static_cast<double>(n);
      row.se_fraction = 0.0;
      traj.steps.push_back(row);
      continue;
    }

    TrapSpec step_spec = spec;
    step_spec.n_atoms = n;
    step_spec.n_condensed =
        std::min<std::int64_t>(n, std::max<std::int64_t>(1, std::llround(n0_mean)));
    const DecayOutcome outcome = averaged_outcome(
        step_spec, kTg, cfg.kTe, cfg.samples_per_step, machinery,
        cfg.rng_seed + 0x10001ULL * static_cast<std::uint64_t>(step), cfg.thresholds,
        cfg.threads);

    n0_mean = outcome.n0_mean + 1.0 + (outcome.p_plus - outcome.p_zero);
    n += 1;
    row.n_atoms = n;
    row.n0_mean = n0_mean;
    row.fraction = n0_mean / static_cast<double>(n);
    row.se_fraction = outcome.se_n_prime;
    row.validity = outcome.validity;
    if (!row.validity.ok() && !traj.first_invalid_step) traj.first_invalid_step = step;
    traj.steps.push_back(row);
  }
  return traj;
}

}  // namespace becload
