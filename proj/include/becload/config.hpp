#pragma once

#include <cstdint>
#include <string>

#include "becload/alpha.hpp"
#include "becload/basis.hpp"
#include "becload/decay.hpp"

namespace becload {

// Flat key = value configuration with [section] headers. Unknown keys are
// hard errors (no silent typos); the canonical serialization embedded in
// every output file reparses to an identical configuration.
struct RunConfig {
  // [trap]
  double omega = 1.0;
  double gamma = 1.0;
  double eta_sq = 2.0;
  int shells_g = 6;
  int shells_e = 2;
  std::int64_t modes_g = 0;  // optional mode-count truncation (0 = full shells)
  std::int64_t modes_e = 0;
  std::int64_t n_atoms = 10000;
  std::int64_t n_condensed = 9000;
  double transition_frequency = 0.0;

  // [quadrature]
  int theta_order = 16;
  int phi_order = 16;
  std::string emission_pattern = "isotropic";  // isotropic | dipole
  std::string dipole_axis = "z";               // x | y | z

  // [pv]
  int pv_grid = 200;
  double kappa_max_ratio = 4.0;
  bool include_imaginary = true;

  // [generator]
  bool include_excited_energies = false;

  // [sampling]
  int samples = 64;
  std::uint64_t seed = 12345;
  double bar_threshold = 0.1;
  double bar_margin = 10.0;
  double emission_share_cutoff = 1e-3;

  // [scan]
  double t_e_min = 0.1;
  double t_e_max = 2.0;
  int t_e_points = 6;
  double t_g_min = 0.5;
  double t_g_max = 50.0;
  int t_g_points = 8;  // logarithmic grid

  // [load]
  int load_steps = 100;
  double initial_fraction = 0.99;
  double load_t_e = 1.0;
  int samples_per_step = 64;
  bool zero_p_diagnostic = false;

  // [validate]
  int sweep_configs = 200;

  // [limits]
  double budget_gib = 2.0;
  int threads = 0;  // 0 = hardware concurrency

  // [output]
  std::string out = "out.csv";
  std::string tensor_cache = "";

  void validate() const;  // throws ConfigError
  TrapSpec trap_spec() const;
  AlphaKey alpha_key() const;
  ValidityThresholds thresholds() const;

  std::string canonical_text() const;
  static RunConfig parse_text(const std::string& text);
  static RunConfig parse_file(const std::string& path);
};

std::string format_double(double v);  // shortest round-trip decimal

}  // namespace becload
