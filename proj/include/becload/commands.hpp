#pragma once

#include <ostream>

#include "becload/config.hpp"

namespace becload {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitResourceRefusal = 3;

struct CommandOptions {
  bool dry_run = false;  // plan, estimate, and exit without computing
};

// Temperature-grid scan of the condensate-fraction change per decay (rows:
// t_e, t_g, n_prime_minus_n, stderr, p_plus, p_zero, interference, valid).
// Checkpoints per grid row into <out>.partial and resumes interrupted runs.
int cmd_scan(const RunConfig& cfg, std::ostream& log, const CommandOptions& opt = {});

// Loading trajectory (rows: step, n_atoms, fraction, stderr, t_g, valid).
int cmd_load(const RunConfig& cfg, std::ostream& log, const CommandOptions& opt = {});

// Builds (or reuses) the coupling tensor cache and writes the sum-rule
// summary CSV.
int cmd_tensor(const RunConfig& cfg, std::ostream& log, const CommandOptions& opt = {});

// Full invariant suite; prints one pass/fail line per check, nonzero exit on
// any failure.
int cmd_validate(const RunConfig& cfg, std::ostream& log, const CommandOptions& opt = {});

}  // namespace becload
