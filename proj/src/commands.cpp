#include "becload/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "becload/csv.hpp"
#include "becload/decay.hpp"
#include "becload/errors.hpp"
#include "becload/loading.hpp"
#include "becload/me_oracle.hpp"
#include "becload/parallel.hpp"
#include "becload/rng.hpp"

namespace becload {

namespace {

std::vector<double> linear_grid(double lo, double hi, int points) {
  std::vector<double> v(points);
  for (int i = 0; i < points; ++i)
    v[i] = points == 1 ? lo : lo + (hi - lo) * i / static_cast<double>(points - 1);
  return v;
}

std::vector<double> log_grid(double lo, double hi, int points) {
  if (points == 1 || lo == hi) return std::vector<double>(points, lo);
  std::vector<double> v(points);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < points; ++i)
    v[i] = std::exp(llo + (lhi - llo) * i / static_cast<double>(points - 1));
  return v;
}

// memory the scan/load machinery holds resident, in GiB
double machinery_gib(const AlphaKey& key) {
  const double L = static_cast<double>(key.make_excited().size());
  const double M = static_cast<double>(key.make_ground().size());
  const double nodes =
      static_cast<double>(key.theta_order) * static_cast<double>(key.phi_order + key.phi_order % 2);
  const double d = L * M;
  double bytes = 2.0 * d * L * 16.0;            // coupling slices
  bytes += nodes * d * 16.0 * 2.0;              // streamed overlap plane
  bytes += nodes * d * 16.0;                    // eigen-transformed overlaps
  bytes += M * (4.0 * nodes * L + 2.0 * L * L) * 16.0;  // per-sideband tables
  return bytes / (1024.0 * 1024.0 * 1024.0);
}

// very rough flop estimate used only to mark long runs
double scan_flops(const AlphaKey& key, std::int64_t cells, std::int64_t samples) {
  const double L = static_cast<double>(key.make_excited().size());
  const double M = static_cast<double>(key.make_ground().size());
  const double nodes =
      static_cast<double>(key.theta_order) * static_cast<double>(key.phi_order + key.phi_order % 2);
  const double slots = 2.0 * L + 2.0;
  const double per_sample = M * L * nodes * (5.0 * slots * slots + 8.0 * L) * 8.0;
  const double pv = key.include_imaginary
                        ? static_cast<double>(key.pv_grid) * nodes * (L * M) * (L + 40.0) * 8.0
                        : 0.0;
  return pv + static_cast<double>(cells) * static_cast<double>(samples) * per_sample;
}

constexpr double kLongRunFlops = 2e11;

void check_budget(const RunConfig& cfg, double gib, const char* what) {
  if (gib > cfg.budget_gib)
    throw ResourceBudgetError(std::string(what) + " would need " + format_double(gib) +
                                  " GiB (budget " + format_double(cfg.budget_gib) + " GiB)",
                              gib, cfg.budget_gib);
}

std::string join_csv(const std::vector<std::string>& cells) {
  std::string row;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) row += ",";
    row += cells[i];
  }
  return row;
}

}  // namespace

// ---------------------------------------------------------------------------
// scan

int cmd_scan(const RunConfig& cfg, std::ostream& log, const CommandOptions& opt) {
  cfg.validate();
  const AlphaKey key = cfg.alpha_key();
  const TrapSpec spec = cfg.trap_spec();
  const auto te = linear_grid(cfg.t_e_min, cfg.t_e_max, cfg.t_e_points);
  const auto tg = log_grid(cfg.t_g_min, cfg.t_g_max, cfg.t_g_points);
  const std::size_t n_cells = te.size() * tg.size();

  const double gib = machinery_gib(key);
  check_budget(cfg, gib, "scan machinery");
  const double flops = scan_flops(key, static_cast<std::int64_t>(n_cells), cfg.samples);
  const bool long_running = flops > kLongRunFlops;
  log << "scan: " << te.size() << " x " << tg.size() << " grid, " << cfg.samples
      << " samples/cell, ~" << format_double(gib) << " GiB"
      << (long_running ? " [long-running]" : "") << "\n";
  if (opt.dry_run) {
    log << "scan: dry run, no cells computed\n";
    return kExitOk;
  }

  const std::string columns = "t_e,t_g,n_prime_minus_n,stderr,p_plus,p_zero,interference,valid";
  const std::string partial_path = cfg.out + ".partial";
  std::size_t resume_rows = 0;
  std::string existing;
  if (std::filesystem::exists(partial_path)) {
    try {
      existing = read_text_file(partial_path);
      if (extract_config_echo(existing) == cfg.canonical_text()) {
        resume_rows = csv_data_rows(existing).size();
        log << "scan: resuming from checkpoint (" << resume_rows << " rows done)\n";
      } else {
        existing.clear();
        log << "scan: checkpoint config mismatch, starting over\n";
      }
    } catch (const std::exception&) {
      existing.clear();
      log << "scan: unreadable checkpoint, starting over\n";
    }
  }

  std::ofstream partial;
  if (resume_rows > 0) {
    write_text_file(partial_path, existing);  // normalize truncated trailing line
    partial.open(partial_path, std::ios::binary | std::ios::app);
  } else {
    partial.open(partial_path, std::ios::binary | std::ios::trunc);
    partial << csv_header(cfg, columns);
    partial.flush();
  }
  if (!partial) throw std::runtime_error("cannot open checkpoint file: " + partial_path);

  DecayMachinery machinery(spec, key, effective_threads(cfg.threads),
                           cfg.include_excited_energies);
  const ValidityThresholds thr = cfg.thresholds();

  struct Cell {
    double te, tg;
    DecayOutcome outcome;
  };
  const unsigned T = effective_threads(cfg.threads);
  std::vector<Cell> batch(T);
  for (std::size_t start = resume_rows; start < n_cells; start += T) {
    const std::size_t end = std::min(n_cells, start + T);
    parallel_for(end - start, T, [&](std::size_t i) {
      const std::size_t cell = start + i;
      const double cell_te = te[cell / tg.size()];
      const double cell_tg = tg[cell % tg.size()];
      const std::uint64_t cell_seed =
          cfg.seed + static_cast<std::uint64_t>(cell) * static_cast<std::uint64_t>(cfg.samples);
      batch[i].te = cell_te;
      batch[i].tg = cell_tg;
      batch[i].outcome =
          averaged_outcome(spec, cell_tg, cell_te, cfg.samples, machinery, cell_seed, thr, 1);
    });
    for (std::size_t i = 0; i < end - start; ++i) {
      const auto& c = batch[i];
      const double n = c.outcome.n0_mean / static_cast<double>(c.outcome.n_atoms);
      partial << join_csv({format_double(c.te), format_double(c.tg),
                           format_double(c.outcome.n_prime - n), format_double(c.outcome.se_gain),
                           format_double(c.outcome.p_plus), format_double(c.outcome.p_zero),
                           format_double(c.outcome.p_zero_interference),
                           c.outcome.validity.ok() ? "1" : "0"})
              << "\n";
      partial.flush();
    }
  }
  partial.close();
  std::filesystem::rename(partial_path, cfg.out);
  log << "scan: wrote " << cfg.out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// load

int cmd_load(const RunConfig& cfg, std::ostream& log, const CommandOptions& opt) {
  cfg.validate();
  const AlphaKey key = cfg.alpha_key();
  const TrapSpec spec = cfg.trap_spec();
  const double gib = machinery_gib(key);
  check_budget(cfg, gib, "loading machinery");
  log << "load: " << cfg.load_steps << " steps, " << cfg.samples_per_step << " samples/step\n";
  if (opt.dry_run) {
    log << "load: dry run\n";
    return kExitOk;
  }

  DecayMachinery machinery(spec, key, effective_threads(cfg.threads),
                           cfg.include_excited_energies);
  LoadingConfig lc;
  lc.kTe = cfg.load_t_e;
  lc.initial_fraction = cfg.initial_fraction;
  lc.steps = cfg.load_steps;
  lc.samples_per_step = cfg.samples_per_step;
  lc.rng_seed = cfg.seed;
  lc.zero_p_diagnostic = cfg.zero_p_diagnostic;
  lc.thresholds = cfg.thresholds();
  lc.threads = effective_threads(cfg.threads);
  const LoadingTrajectory traj = run_loading(spec, machinery, lc);

  std::ostringstream out;
  out << csv_header(cfg, "step,n_atoms,fraction,stderr,t_g,valid");
  for (const auto& s : traj.steps)
    out << join_csv({std::to_string(s.step), std::to_string(s.n_atoms),
                     format_double(s.fraction), format_double(s.se_fraction),
                     format_double(s.kTg), s.validity.ok() ? "1" : "0"})
        << "\n";
  write_text_file(cfg.out, out.str());
  log << "load: wrote " << cfg.out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// tensor

int cmd_tensor(const RunConfig& cfg, std::ostream& log, const CommandOptions& opt) {
  cfg.validate();
  const AlphaKey key = cfg.alpha_key();
  const double gib =
      alpha_tensor_gib(key.make_excited().size(), key.make_ground().size(),
                       key.make_quadrature().size());
  check_budget(cfg, gib, "alpha tensor");
  log << "tensor: " << key.make_excited().size() << " x " << key.make_ground().size()
      << " modes, ~" << format_double(gib) << " GiB\n";
  if (opt.dry_run) return kExitOk;

  const std::string cache_path =
      cfg.tensor_cache.empty() ? cfg.out + ".tensor" : cfg.tensor_cache;
  AlphaTensor tensor;
  const CacheStatus status = load_alpha_cache(cache_path, key, tensor);
  switch (status) {
    case CacheStatus::ok:
      log << "tensor: cache hit (" << cache_path << ")\n";
      break;
    case CacheStatus::missing:
      log << "tensor: no cache, building\n";
      break;
    case CacheStatus::key_mismatch:
      log << "tensor: cache key mismatch, rebuilding\n";
      break;
    case CacheStatus::corrupt:
      log << "tensor: cache corrupt, rebuilding\n";
      break;
  }
  if (status != CacheStatus::ok) {
    tensor = build_alpha_tensor(key, cfg.budget_gib, effective_threads(cfg.threads));
    save_alpha_cache(cache_path, tensor);
    log << "tensor: cache written (" << cache_path << ")\n";
  }

  const std::size_t L = tensor.n_excited();
  const std::size_t M = tensor.n_ground();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(tensor.on_shell(),
                                                     Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();

  const Basis excited = key.make_excited();
  std::ostringstream out;
  out << csv_header(cfg, "l,nx,ny,nz,completeness,max_abs_imag,psd_min_eigenvalue");
  for (std::size_t l = 0; l < L; ++l) {
    double completeness = 0.0;
    for (std::size_t m = 0; m < M; ++m) completeness += tensor.real_part(l, m, m, l).real();
    double max_imag = 0.0;
    for (std::size_t m = 0; m < M; ++m)
      for (Eigen::Index col = 0; col < tensor.shift().cols(); ++col)
        max_imag = std::max(
            max_imag,
            std::abs(tensor.shift()(static_cast<Eigen::Index>(composite_index(l, m, M)), col)));
    const Mode& mode = excited.mode(l);
    out << join_csv({std::to_string(l), std::to_string(mode.nx), std::to_string(mode.ny),
                     std::to_string(mode.nz), format_double(completeness),
                     format_double(max_imag), format_double(min_eig)})
        << "\n";
  }
  write_text_file(cfg.out, out.str());
  log << "tensor: wrote " << cfg.out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// validate

namespace {

struct CheckRunner {
  std::ostream& log;
  int failures = 0;

  void run(const std::string& name, const std::function<std::pair<bool, std::string>()>& fn) {
    try {
      const auto [ok, detail] = fn();
      log << (ok ? "[PASS] " : "[FAIL] ") << name << (detail.empty() ? "" : ": " + detail)
          << "\n";
      if (!ok) ++failures;
    } catch (const std::exception& e) {
      log << "[FAIL] " << name << ": exception: " << e.what() << "\n";
      ++failures;
    }
  }
};

// epsilon-excision evaluation of the exp(-x) principal-value example
double pv_excision_oracle(double eps) {
  auto f = [](double x) { return std::exp(-x) / (x - 1.0); };
  double acc = 0.0;
  for (const auto& [a, b] : {std::pair{0.0, 1.0 - eps}, std::pair{1.0 + eps, 40.0}}) {
    // subdivide towards the pole where the integrand steepens
    const int panels = 40;
    for (int p = 0; p < panels; ++p) {
      const double t0 = a + (b - a) * p / panels;
      const double t1 = a + (b - a) * (p + 1) / panels;
      const GaussLegendre gl = gauss_legendre(32, t0, t1);
      for (int i = 0; i < 32; ++i) acc += gl.w[i] * f(gl.x[i]);
    }
  }
  return acc;
}

}  // namespace

int cmd_validate(const RunConfig& cfg, std::ostream& log, const CommandOptions& opt) {
  cfg.validate();
  if (opt.dry_run) {
    log << "validate: dry run\n";
    return kExitOk;
  }
  CheckRunner checks{log};

  checks.run("pv-exact-constant", [] {
    const double v = pv_integrate([](double) { return 1.0; }, 1.0, 0.0, 2.0);
    return std::make_pair(std::abs(v) <= 1e-12, "PV[1/(x-1)] over (0,2) = " + format_double(v));
  });
  checks.run("pv-exact-linear", [] {
    const double v = pv_integrate([](double x) { return x; }, 1.0, 0.0, 2.0);
    return std::make_pair(std::abs(v - 2.0) <= 1e-12, "got " + format_double(v));
  });
  checks.run("pv-excision-oracle", [] {
    const double v = pv_integrate([](double x) { return std::exp(-x); }, 1.0, 0.0, 40.0);
    const double oracle = pv_excision_oracle(1e-5);
    return std::make_pair(std::abs(v - oracle) <= 1e-8,
                          "pv=" + format_double(v) + " oracle=" + format_double(oracle));
  });

  checks.run("sphere-moments", [&] {
    const SphereQuadrature q = build_sphere_quadrature(cfg.theta_order, cfg.phi_order);
    double w_sum = 0, zz = 0, y20y10 = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      const double c = q.nodes[i].z;
      w_sum += q.weights[i];
      zz += q.weights[i] * c * c;
      const double y10 = std::sqrt(3.0 / (4.0 * std::numbers::pi)) * c;
      const double y20 = std::sqrt(5.0 / (16.0 * std::numbers::pi)) * (3.0 * c * c - 1.0);
      y20y10 += q.weights[i] * y20 * y10;
    }
    const bool ok = std::abs(w_sum - 1.0) <= 1e-12 && std::abs(zz - 1.0 / 3.0) <= 1e-12 &&
                    std::abs(y20y10) <= 1e-12;
    return std::make_pair(ok, "sum(w)-1=" + format_double(w_sum - 1.0) +
                                  " <z^2>-1/3=" + format_double(zz - 1.0 / 3.0));
  });

  checks.run("biortho-reconstruction", [] {
    Rng rng(424242);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
      Eigen::MatrixXcd m(20, 20);
      for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j)
          m(i, j) = cplx(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0);
      const BiorthoDecomp d = biortho_decompose(m);
      worst = std::max(worst, (d.reconstruct() - m).norm() / m.norm());
    }
    return std::make_pair(worst <= 1e-10, "max relative residual " + format_double(worst));
  });

  checks.run("sum-rules", [&] {
    const Basis excited = Basis::shells(2);
    std::vector<double> prev(excited.size(), 0.0);
    bool ok = true;
    std::string detail;
    for (int shells : {8, 10, 12, 14}) {
      const Basis ground = Basis::shells(shells);
      const SphereQuadrature quad = build_sphere_quadrature(cfg.theta_order, cfg.phi_order);
      const FranckCondonTable table(excited, ground, quad, {1.0}, std::sqrt(2.0),
                                    effective_threads(cfg.threads));
      for (std::size_t l = 0; l < excited.size(); ++l) {
        double c = 0.0;
        for (std::size_t w = 0; w < quad.size(); ++w)
          for (std::size_t m = 0; m < ground.size(); ++m)
            c += quad.weights[w] * std::norm(table.amplitude(l, m, w, 0));
        ok = ok && c > prev[l];
        prev[l] = c;
        if (shells == 14) {
          ok = ok && c >= 0.99;
          if (l == 0) detail = "completeness(l=0, 14 shells) = " + format_double(c);
        }
      }
    }
    return std::make_pair(ok, detail);
  });

  checks.run("gram-psd", [&] {
    AlphaKey key = cfg.alpha_key();
    key.shells_e = std::min(cfg.shells_e, 2);
    key.shells_g = std::min(cfg.shells_g, 4);
    key.modes_g = key.modes_e = 0;
    key.include_imaginary = false;
    const AlphaTensor t = build_alpha_tensor(key, cfg.budget_gib, effective_threads(cfg.threads));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(t.on_shell(), Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    return std::make_pair(min_eig >= -1e-10, "min eigenvalue " + format_double(min_eig));
  });

  checks.run("zero-recoil-limit", [&] {
    AlphaKey key = cfg.alpha_key();
    key.shells_e = 2;
    key.shells_g = 3;
    key.modes_g = key.modes_e = 0;
    key.eta_sq = 0.0;
    key.include_imaginary = true;
    const AlphaTensor t = build_alpha_tensor(key, cfg.budget_gib, effective_threads(cfg.threads));
    const Basis e = key.make_excited();
    const Basis g = key.make_ground();
    double worst = 0.0;
    for (std::size_t l = 0; l < e.size(); ++l)
      for (std::size_t m = 0; m < g.size(); ++m)
        for (std::size_t mp = 0; mp < g.size(); ++mp)
          for (std::size_t lp = 0; lp < e.size(); ++lp) {
            const bool lm = e.mode(l) == g.mode(m);
            const bool lpmp = e.mode(lp) == g.mode(mp);
            const cplx expect(lm && lpmp ? 1.0 : 0.0, 0.0);
            worst = std::max(worst, std::abs(t.value(l, m, mp, lp) - expect));
          }
    return std::make_pair(worst == 0.0, "max deviation " + format_double(worst));
  });

  checks.run("parity-selection", [&] {
    AlphaKey key = cfg.alpha_key();
    key.shells_e = 2;
    key.shells_g = 4;
    key.modes_g = key.modes_e = 0;
    key.include_imaginary = false;
    const AlphaTensor t = build_alpha_tensor(key, cfg.budget_gib, effective_threads(cfg.threads));
    const Basis e = key.make_excited();
    const Basis g = key.make_ground();
    double worst = 0.0;
    for (std::size_t l = 0; l < e.size(); ++l)
      for (std::size_t m = 0; m < g.size(); ++m)
        for (std::size_t mp = 0; mp < g.size(); ++mp)
          for (std::size_t lp = 0; lp < e.size(); ++lp) {
            const Mode &ml = e.mode(l), &mm = g.mode(m), &mlp = e.mode(lp), &mmp = g.mode(mp);
            const bool mismatch = ((ml.nx + mm.nx) % 2 != (mlp.nx + mmp.nx) % 2) ||
                                  ((ml.ny + mm.ny) % 2 != (mlp.ny + mmp.ny) % 2) ||
                                  ((ml.nz + mm.nz) % 2 != (mlp.nz + mmp.nz) % 2);
            if (mismatch) worst = std::max(worst, std::abs(t.real_part(l, m, mp, lp)));
          }
    return std::make_pair(worst <= 1e-12, "max parity-forbidden entry " + format_double(worst));
  });

  checks.run("quadrature-convergence", [&] {
    AlphaKey key = cfg.alpha_key();
    key.shells_e = std::min(cfg.shells_e, 2);
    key.shells_g = std::min(cfg.shells_g, 4);
    key.modes_g = key.modes_e = 0;
    key.include_imaginary = false;
    const AlphaSlices s1 = build_alpha_slices(key, effective_threads(cfg.threads));
    key.theta_order *= 2;
    key.phi_order *= 2;
    const AlphaSlices s2 = build_alpha_slices(key, effective_threads(cfg.threads));
    const double diff =
        (s1.condensate_block() - s2.condensate_block()).cwiseAbs().maxCoeff();
    return std::make_pair(diff < 1e-8, "order doubling moves entries by " + format_double(diff));
  });

  checks.run("cache-detects-corruption", [&] {
    AlphaKey key = cfg.alpha_key();
    key.shells_e = 1;
    key.shells_g = 2;
    key.modes_g = key.modes_e = 0;
    key.pv_grid = 16;
    const AlphaTensor t = build_alpha_tensor(key, cfg.budget_gib, 1);
    const std::string path =
        (cfg.tensor_cache.empty() ? cfg.out : cfg.tensor_cache) + ".cachecheck";
    save_alpha_cache(path, t);
    AlphaTensor loaded;
    if (load_alpha_cache(path, key, loaded) != CacheStatus::ok)
      return std::make_pair(false, std::string("round-trip load failed"));
    if (loaded.on_shell() != t.on_shell() || loaded.shift() != t.shift())
      return std::make_pair(false, std::string("round-trip not bit-identical"));
    AlphaKey other = key;
    other.eta_sq += 0.5;
    AlphaTensor dummy;
    if (load_alpha_cache(path, other, dummy) != CacheStatus::key_mismatch)
      return std::make_pair(false, std::string("key mismatch not detected"));
    std::string bytes = read_text_file(path);
    bytes[bytes.size() / 2] ^= 0x5a;
    write_text_file(path, bytes);
    const CacheStatus st = load_alpha_cache(path, key, dummy);
    std::filesystem::remove(path);
    if (st != CacheStatus::corrupt && st != CacheStatus::key_mismatch)
      return std::make_pair(false, std::string("corruption not detected"));
    return std::make_pair(true, std::string("mismatch and corruption detected, rebuild path taken"));
  });

  checks.run("oracle-benchmark", [&] {
    AlphaKey key;
    key.modes_e = 1;
    key.modes_g = 2;
    key.shells_e = 1;
    key.shells_g = 1;
    key.eta_sq = 0.5;
    key.theta_order = cfg.theta_order;
    key.phi_order = cfg.phi_order;
    key.pv_grid = 64;
    key.include_imaginary = true;
    const AlphaTensor alpha = build_alpha_tensor(key, cfg.budget_gib, 1);

    std::ostringstream detail;
    bool ok = true;
    double prev_plus = 1e300, prev_zero = 1e300;
    for (std::int64_t n0 : {25, 100, 400}) {
      TrapSpec spec;
      spec.omega = 1.0;
      spec.gamma = 1.0;
      spec.eta_sq = 0.5;
      spec.shells_g = 1;
      spec.shells_e = 1;
      spec.n_atoms = n0 + 3;
      spec.n_condensed = n0;
      DecayMachinery mach(spec, key, 1, false);
      OccupationState init;
      init.ground = {n0, 3};
      init.excited_index = 0;
      const double p_plus = mach.p_plus_s(init, 1);
      const double p_zero = mach.p_zero_s(init, 1).total();

      OracleControl ctl;
      ctl.deviation_cap = 4;
      const CascadeResult oracle =
          integrate_cascade(spec, init, alpha, 50.0 / spec.gamma, ctl);
      const double o_plus = oracle.probability_of({n0 + 2, 2});
      const double o_zero = oracle.probability_of({n0, 4});
      const double e_plus = std::abs(p_plus - o_plus) / o_plus;
      const double e_zero = std::abs(p_zero - o_zero) / o_zero;
      ok = ok && e_plus < prev_plus && e_zero < prev_zero;
      prev_plus = e_plus;
      prev_zero = e_zero;
      if (n0 == 400) ok = ok && e_plus < 0.10 && e_zero < 0.10;
      detail << " N0=" << n0 << ": err+=" << format_double(e_plus)
             << " err0=" << format_double(e_zero);
    }
    return std::make_pair(ok, detail.str());
  });

  checks.run("interference-sign-sweep", [&] {
    Rng rng(cfg.seed ^ 0x5eedULL);
    double worst = -1e300;
    for (int rep = 0; rep < cfg.sweep_configs; ++rep) {
      AlphaKey key;
      key.shells_e = 1 + static_cast<int>(rng.next_u64() % 2);
      key.shells_g = 2 + static_cast<int>(rng.next_u64() % 5);
      key.eta_sq = 0.5 + 2.5 * rng.uniform();
      key.theta_order = 12;
      key.phi_order = 12;
      key.pv_grid = 48;
      key.include_imaginary = true;
      TrapSpec spec;
      spec.eta_sq = key.eta_sq;
      spec.shells_g = key.shells_g;
      spec.shells_e = key.shells_e;
      spec.gamma = 1.0;
      spec.n_atoms = 2000 + static_cast<std::int64_t>(rng.next_u64() % 18001);
      spec.n_condensed = spec.n_atoms;
      const double kTe = 0.1 + 1.9 * rng.uniform();
      const double kTg = 0.5 * std::pow(100.0, rng.uniform());
      DecayMachinery mach(spec, key, effective_threads(cfg.threads), false);
      Rng sample_rng(cfg.seed + rep);
      const OccupationState st = mach.sample_initial(kTg, kTe, sample_rng);
      const auto sums = mach.all_channels_thermal(st.ground, kTe);
      worst = std::max(worst, sums.pz_int);
    }
    return std::make_pair(worst <= 1e-12,
                          "max interference over sweep = " + format_double(worst));
  });

  checks.run("gamma-invariance", [&] {
    AlphaKey key = cfg.alpha_key();
    key.shells_e = 2;
    key.shells_g = 3;
    key.modes_g = key.modes_e = 0;
    key.pv_grid = 48;
    TrapSpec spec = cfg.trap_spec();
    spec.shells_e = 2;
    spec.shells_g = 3;
    spec.n_atoms = 1000;
    spec.n_condensed = 995;
    OccupationState st;
    st.ground.assign(key.make_ground().size(), 0);
    st.ground[0] = 995;
    st.ground[1] = 3;
    st.ground[2] = 2;
    st.excited_index = 1;
    spec.gamma = 1.0;
    DecayMachinery m1(spec, key, 1, false);
    spec.gamma = 3.0;
    DecayMachinery m3(spec, key, 1, false);
    const auto a = m1.all_channels(st);
    const auto b = m3.all_channels(st);
    const double diff = std::max({std::abs(a.p_plus - b.p_plus),
                                  std::abs(a.pz_side - b.pz_side),
                                  std::abs(a.pz_cond - b.pz_cond),
                                  std::abs(a.pz_int - b.pz_int)});
    return std::make_pair(diff <= 1e-12, "max |P(Gamma) - P(3 Gamma)| = " + format_double(diff));
  });

  checks.run("validity-threshold-zero", [] {
    ValidityThresholds thr;
    thr.expansion_threshold = 0.0;
    const BarValidity v = bar_validity(1e-6, 1e-6, {0.9, 0.05, 0.05}, 1000.0, 1010, thr);
    return std::make_pair(!v.ok() && v.reason() == "expansion", "reason = " + v.reason());
  });

  log << (checks.failures == 0 ? "validate: all checks passed\n"
                               : "validate: " + std::to_string(checks.failures) +
                                     " check(s) failed\n");
  return checks.failures == 0 ? kExitOk : kExitValidationFailure;
}

}  // namespace becload
