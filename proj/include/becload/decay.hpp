#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "becload/alpha.hpp"
#include "becload/dynamics.hpp"
#include "becload/rng.hpp"

namespace becload {

// One initial many-body configuration: N_m atoms per ground mode (entry 0 is
// the condensate) plus a single excited atom.
struct OccupationState {
  std::vector<std::int64_t> ground;
  std::size_t excited_index = 0;
  int resamples = 0;  // draws rejected before this one fit the atom budget

  std::int64_t total() const;
  std::int64_t condensed() const { return ground.empty() ? 0 : ground[0]; }
  void validate(std::size_t n_ground_modes, std::size_t n_excited_modes) const;
};

struct BarValidity {
  double p_max = 0.0;
  double threshold = 0.1;
  bool expansion_ok = true;  // p_max < threshold
  double a_estimate = 0.0;   // ground modes taking >= cutoff of the emission
  double share_cutoff = 1e-3;
  double margin = 10.0;
  bool occupation_ok = true;  // N0 > margin * max(a_estimate, N - N0)
  bool ok() const { return expansion_ok && occupation_ok; }
  std::string reason() const;
};

struct DecayOutcome {
  double p_plus = 0.0;  // P_{N0+2}
  double p_zero = 0.0;  // P_{N0}
  // P_{N0} split: |condensate-emission path|^2, |sideband-emission path|^2,
  // twice the real part of their cross product
  double p_zero_direct_condensate = 0.0;
  double p_zero_direct_sideband = 0.0;
  double p_zero_interference = 0.0;
  double n0_mean = 0.0;
  std::int64_t n_atoms = 0;
  double n_prime = 0.0;  // (N0 + 1 + (P+ - P0)) / (N + 1), from the stored fields
  double se_p_plus = 0.0, se_p_zero = 0.0, se_n_prime = 0.0;
  double se_gain = 0.0;  // standard error of n' - n over samples
  int n_samples = 0;
  int resamples = 0;
  BarValidity validity;
};

double n_prime_update(double n0, double p_plus, double p_zero, std::int64_t n_atoms);

struct ValidityThresholds {
  double expansion_threshold = 0.1;  // "much less than 1"
  double margin = 10.0;              // "much greater than"
  double share_cutoff = 1e-3;        // emission share defining the a-count
};

BarValidity bar_validity(double p_plus, double p_zero, const std::vector<double>& emission,
                         double n0, std::int64_t n_atoms, const ValidityThresholds& thr);

// Per-channel probabilities of one decay cascade, split by the final state's
// condensate change. All heavy geometry (coupling slices, spectral tables,
// on-shell overlap amplitudes) is precomputed here once and reused across
// samples, grid cells and loading steps; only occupation numbers vary per
// call.
class DecayMachinery {
public:
  struct Tables;
  struct SampleContext;

  DecayMachinery(const TrapSpec& spec, const AlphaKey& key, unsigned threads = 1,
                 bool include_excited_energies = false);

  const TrapSpec& spec() const { return spec_; }
  const AlphaKey& key() const { return key_; }
  const Basis& ground() const { return ground_; }
  const Basis& excited() const { return excited_; }
  const AlphaSlices& slices() const { return slices_; }
  const BiorthoDecomp& condensate_decomp() const { return decomp_; }

  // P_{N0+2}^s: the cascade ends with two extra condensate atoms and one atom
  // removed from sideband s. Exactly 0 when N_s = 0. s = 0 or s out of range
  // -> std::invalid_argument.
  double p_plus_s(const OccupationState& initial, std::size_t s) const;

  struct PZeroTerms {
    double direct_condensate = 0.0;
    double direct_sideband = 0.0;
    double interference = 0.0;
    double total() const { return direct_condensate + direct_sideband + interference; }
  };
  // P_{N0}^s: one extra atom in sideband s, condensate unchanged; the two
  // interfering paths are returned separately.
  PZeroTerms p_zero_s(const OccupationState& initial, std::size_t s) const;

  struct ChannelSums {
    double p_plus = 0.0;
    double pz_cond = 0.0, pz_side = 0.0, pz_int = 0.0;
    std::vector<double> emission;  // direct-emission probability per ground mode
  };
  // Batched evaluation over every final sideband for one initial state
  // (SIMD gram path; equivalence-tested against p_plus_s / p_zero_s).
  ChannelSums all_channels(const OccupationState& initial) const;
  // Same, thermally averaged over the excited mode at temperature kTe.
  ChannelSums all_channels_thermal(const std::vector<std::int64_t>& ground_occupations,
                                   double kTe) const;

  std::vector<double> excited_thermal_weights(double kTe) const;

  // Thermal draw of an initial configuration (geometric Bose-Einstein draws
  // per sideband, condensate takes the remainder; excited mode Boltzmann).
  // n_atoms <= 0 falls back to the constructing TrapSpec's atom number.
  OccupationState sample_initial(double kTg, double kTe, Rng& rng,
                                 std::int64_t n_atoms = 0) const;

  SampleContext make_context(std::int64_t n0) const;

private:
  void channel_coeffs(const SampleContext& ctx, const std::vector<std::int64_t>& occ,
                      std::size_t j, std::size_t s, kernels::NodeMatrix& dir_a1,
                      kernels::NodeMatrix& plus) const;
  ChannelSums eval_channels(const SampleContext& ctx, const std::vector<std::int64_t>& occ,
                            std::size_t j) const;

  TrapSpec spec_;
  AlphaKey key_;
  unsigned threads_ = 1;
  bool include_excited_energies_ = false;
  Basis ground_, excited_;
  SphereQuadrature quad_;
  AlphaSlices slices_;
  BiorthoDecomp decomp_;  // of the condensate coupling block alpha_{l00l'}
  std::shared_ptr<Tables> tables_;
};

OccupationState sample_initial(const TrapSpec& spec, double kTg, double kTe,
                               const DecayMachinery& machinery, std::uint64_t rng_seed);

// Monte Carlo average over thermal initial configurations with an exact sum
// over final sidebands and excited thermal weights. Per-sample streams are
// seeded base_seed + sample index, so results do not depend on the thread
// count.
DecayOutcome averaged_outcome(const TrapSpec& spec, double kTg, double kTe, int n_samples,
                              const DecayMachinery& machinery, std::uint64_t rng_seed,
                              const ValidityThresholds& thr = {}, unsigned threads = 1);

}  // namespace becload
