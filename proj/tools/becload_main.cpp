// becload: optical BEC loading in the boson-accumulation regime.
// Subcommands: scan | load | tensor | validate.

#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "becload/commands.hpp"
#include "becload/errors.hpp"

namespace {

struct GlobalFlags {
  std::string config_path;
  std::string out;
  std::string seed;
  int threads = -1;
  double budget_gib = -1.0;
  bool dry_run = false;
};

void add_common(CLI::App* cmd, GlobalFlags& g) {
  cmd->add_option("--config", g.config_path, "configuration file (key = value sections)")
      ->required();
  cmd->add_option("--out", g.out, "output path (overrides [output] out)");
  cmd->add_option("--seed", g.seed, "RNG seed (overrides [sampling] seed)");
  cmd->add_option("--threads", g.threads, "worker threads, 0 = hardware (overrides [limits])");
  cmd->add_option("--budget-gib", g.budget_gib, "memory budget in GiB (overrides [limits])");
  cmd->add_flag("--dry-run", g.dry_run, "plan and estimate only, compute nothing");
}

becload::RunConfig load_config(const GlobalFlags& g) {
  becload::RunConfig cfg = becload::RunConfig::parse_file(g.config_path);
  if (!g.out.empty()) cfg.out = g.out;
  if (!g.seed.empty()) {
    try {
      cfg.seed = std::stoull(g.seed);
    } catch (const std::exception&) {
      throw becload::ConfigError("--seed expects an unsigned integer, got '" + g.seed + "'");
    }
  }
  if (g.threads >= 0) cfg.threads = g.threads;
  if (g.budget_gib > 0.0) cfg.budget_gib = g.budget_gib;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optical BEC loading simulator (boson-accumulation regime)"};
  app.require_subcommand(1);

  GlobalFlags g;
  CLI::App* scan = app.add_subcommand("scan", "temperature-grid scan of n' - n per decay");
  CLI::App* load = app.add_subcommand("load", "continuous-loading trajectory");
  CLI::App* tensor = app.add_subcommand("tensor", "build the coupling tensor cache + sum rules");
  CLI::App* validate = app.add_subcommand("validate", "run the invariant suite");
  for (auto* cmd : {scan, load, tensor, validate}) add_common(cmd, g);

  CLI11_PARSE(app, argc, argv);

  try {
    const becload::RunConfig cfg = load_config(g);
    const becload::CommandOptions opt{g.dry_run};
    if (scan->parsed()) return becload::cmd_scan(cfg, std::cout, opt);
    if (load->parsed()) return becload::cmd_load(cfg, std::cout, opt);
    if (tensor->parsed()) return becload::cmd_tensor(cfg, std::cout, opt);
    if (validate->parsed()) return becload::cmd_validate(cfg, std::cout, opt);
    return becload::kExitConfigError;
  } catch (const becload::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return becload::kExitConfigError;
  } catch (const becload::ResourceBudgetError& e) {
    std::cerr << "resource refusal: " << e.what() << "\n";
    return becload::kExitResourceRefusal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return becload::kExitValidationFailure;
  }
}
