#include "becload/me_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "becload/errors.hpp"
#include "becload/ode.hpp"
#include "becload/parallel.hpp"
#include "becload/rng.hpp"

namespace becload {

namespace {

std::string occ_str(const std::vector<std::int64_t>& occ, int excited) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < occ.size(); ++i) os << (i ? "," : "") << occ[i];
  os << "]";
  if (excited >= 0) os << "+e" << excited;
  return os.str();
}

}  // namespace

std::int64_t FockBasis::post_index(const std::vector<std::int64_t>& occ) const {
  auto it = post_map_.find(occ);
  return it == post_map_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

FockBasis FockBasis::build(const Basis& ground, const Basis& excited,
                           const OccupationState& initial, const OracleControl& ctl) {
  FockBasis b;
  b.ground = ground;
  b.excited = excited;
  const std::size_t M = ground.size();
  const std::size_t L = excited.size();
  initial.validate(M, L);

  // sideband deviation patterns with total |delta| <= cap
  std::vector<std::vector<std::int64_t>> ground_configs;
  std::vector<std::int64_t> current(M, 0);
  std::function<void(std::size_t, int)> recurse = [&](std::size_t m, int budget) {
    if (m == M) {
      std::int64_t side = 0;
      for (std::size_t k = 1; k < M; ++k) side += current[k];
      const std::int64_t n0 = initial.total() - side;
      if (n0 < 0) return;
      current[0] = n0;
      ground_configs.push_back(current);
      return;
    }
    if (m == 0) {
      recurse(1, budget);
      return;
    }
    const std::int64_t base = initial.ground[m];
    for (int d = -budget; d <= budget; ++d) {
      if (base + d < 0) continue;
      current[m] = base + d;
      recurse(m + 1, budget - std::abs(d));
    }
  };
  recurse(0, ctl.deviation_cap);
  std::sort(ground_configs.begin(), ground_configs.end());

  for (const auto& g : ground_configs)
    for (std::size_t l = 0; l < L; ++l) {
      b.pre_map_[{g, static_cast<int>(l)}] = b.pre_ground.size();
      b.pre_ground.push_back(g);
      b.pre_excited.push_back(static_cast<int>(l));
    }
  if (b.pre_size() > ctl.dim_cap)
    throw ResourceBudgetError("oracle Fock basis exceeds the dimension cap",
                              static_cast<double>(b.pre_size()), static_cast<double>(ctl.dim_cap));

  // photon-emitted sector: all jump images g + e_{m'}
  for (const auto& g : ground_configs)
    for (std::size_t mp = 0; mp < M; ++mp) {
      auto img = g;
      img[mp] += 1;
      if (b.post_map_.emplace(img, b.post_ground.size()).second) b.post_ground.push_back(img);
    }
  return b;
}

double CascadeResult::probability_of(const std::vector<std::int64_t>& occ) const {
  const auto idx = basis.post_index(occ);
  return idx < 0 ? 0.0 : probabilities[static_cast<std::size_t>(idx)];
}

double JumpEstimate::probability_of(const std::vector<std::int64_t>& occ) const {
  const auto idx = basis.post_index(occ);
  return idx < 0 ? 0.0 : probabilities[static_cast<std::size_t>(idx)];
}

double JumpEstimate::std_error_of(const std::vector<std::int64_t>& occ) const {
  const auto idx = basis.post_index(occ);
  return idx < 0 ? 0.0 : std_errors[static_cast<std::size_t>(idx)];
}

// ---------------------------------------------------------------------------

struct OracleOperators {
  const FockBasis& basis;
  Eigen::MatrixXcd h;  // effective Hamiltonian on the single-excitation sector

  // jump bookkeeping: connection c of post state f reaches pre state p by
  // removing one atom from mode m while the excited atom sat at level l;
  // bose = sqrt(N^f_m)
  struct Connection {
    std::size_t pre;
    std::size_t l, m;
    double bose;
  };
  std::vector<std::vector<Connection>> connections;  // per post state
  std::vector<std::vector<cplx>> alpha_r;            // per post: packed c1 x c2 factors

  OracleOperators(const TrapSpec& spec, const FockBasis& b, const AlphaTensor& alpha,
                  const OracleControl& ctl)
      : basis(b) {
    const std::size_t M = b.ground.size();
    const std::size_t L = b.excited.size();
    const std::size_t dim = b.pre_size();
    const double gamma = spec.gamma;
    h = Eigen::MatrixXcd::Zero(dim, dim);

    // reference energy: phases only matter through in-sector differences
    double e_ref = 0.0;
    if (ctl.include_trap_energies) {
      for (std::size_t m = 0; m < M; ++m)
        e_ref += static_cast<double>(b.pre_ground[0][m]) * mode_energy(b.ground.mode(m), spec);
    }

    for (std::size_t src = 0; src < dim; ++src) {
      const auto& g = b.pre_ground[src];
      const int lp = b.pre_excited[src];
      if (ctl.include_trap_energies) {
        double e = mode_energy(b.excited.mode(lp), spec) + spec.transition_frequency;
        for (std::size_t m = 0; m < M; ++m)
          e += static_cast<double>(g[m]) * mode_energy(b.ground.mode(m), spec);
        h(src, src) += e - e_ref;
      }
      // -i Gamma/2 sum alpha_{l m m' l'} e_l^dag g_m g_{m'}^dag e_{l'}:
      // the anti-normal ground pair keeps the truncated model trace-consistent
      // with the truncated jump operator (its complete-basis limit is the
      // bare -i Gamma/2 decay term)
      for (std::size_t mp = 0; mp < M; ++mp) {
        const double bose_create = std::sqrt(static_cast<double>(g[mp]) + 1.0);
        for (std::size_t m = 0; m < M; ++m) {
          const std::int64_t nm = g[m] + (m == mp ? 1 : 0);
          if (nm < 1) continue;
          const double bose_ann = std::sqrt(static_cast<double>(nm));
          auto img = g;
          img[mp] += 1;
          img[m] -= 1;
          for (std::size_t l = 0; l < L; ++l) {
            auto it = b.pre_map_.find({img, static_cast<int>(l)});
            if (it == b.pre_map_.end()) continue;  // projected out by the truncation
            h(it->second, src) += cplx(0.0, -0.5 * gamma) *
                                  alpha.value(l, m, mp, static_cast<std::size_t>(lp)) *
                                  bose_create * bose_ann;
          }
        }
      }
    }

    connections.resize(b.post_size());
    alpha_r.resize(b.post_size());
    for (std::size_t f = 0; f < b.post_size(); ++f) {
      const auto& gf = b.post_ground[f];
      for (std::size_t m = 0; m < M; ++m) {
        if (gf[m] < 1) continue;
        auto g = gf;
        g[m] -= 1;
        for (std::size_t l = 0; l < L; ++l) {
          auto it = b.pre_map_.find({g, static_cast<int>(l)});
          if (it == b.pre_map_.end()) continue;
          connections[f].push_back(
              {it->second, l, m, std::sqrt(static_cast<double>(gf[m]))});
        }
      }
      const auto& cs = connections[f];
      auto& ar = alpha_r[f];
      ar.resize(cs.size() * cs.size());
      for (std::size_t i = 0; i < cs.size(); ++i)
        for (std::size_t k = 0; k < cs.size(); ++k)
          // row index = conjugated side (l, m), column = unconjugated (l', m')
          ar[i * cs.size() + k] =
              alpha.real_part(cs[k].l, cs[k].m, cs[i].m, cs[i].l) * cs[i].bose * cs[k].bose;
    }
  }

  // dP_f/dt for the current rho
  void jump_gain(const Eigen::MatrixXcd& rho, double gamma, std::vector<double>& dp) const {
    for (std::size_t f = 0; f < connections.size(); ++f) {
      const auto& cs = connections[f];
      const auto& ar = alpha_r[f];
      cplx acc(0.0, 0.0);
      for (std::size_t i = 0; i < cs.size(); ++i)
        for (std::size_t k = 0; k < cs.size(); ++k)
          acc += ar[i * cs.size() + k] * rho(cs[i].pre, cs[k].pre);
      dp[f] = gamma * acc.real();
    }
  }

  // channel intensities for a pure state (quantum-jump path)
  void jump_intensities(const Eigen::VectorXcd& psi, std::vector<double>& q) const {
    for (std::size_t f = 0; f < connections.size(); ++f) {
      const auto& cs = connections[f];
      const auto& ar = alpha_r[f];
      cplx acc(0.0, 0.0);
      for (std::size_t i = 0; i < cs.size(); ++i)
        for (std::size_t k = 0; k < cs.size(); ++k)
          acc += ar[i * cs.size() + k] * psi(cs[i].pre) * std::conj(psi(cs[k].pre));
      q[f] = std::max(0.0, acc.real());
    }
  }
};

namespace {

std::size_t initial_pre_index(const FockBasis& b, const OccupationState& initial) {
  for (std::size_t i = 0; i < b.pre_size(); ++i)
    if (b.pre_ground[i] == initial.ground &&
        b.pre_excited[i] == static_cast<int>(initial.excited_index))
      return i;
  throw ClosureError("initial state " +
                     occ_str(initial.ground, static_cast<int>(initial.excited_index)) +
                     " missing from the Fock basis");
}

}  // namespace

CascadeResult integrate_cascade(const TrapSpec& spec, const OccupationState& initial,
                                const AlphaTensor& alpha, double t_max,
                                const OracleControl& ctl) {
  spec.validate();
  const Basis ground = alpha.key().make_ground();
  const Basis excited = alpha.key().make_excited();
  CascadeResult res{FockBasis::build(ground, excited, initial, ctl), {}, 0, 0, 0};
  const FockBasis& b = res.basis;
  const OracleOperators ops(spec, b, alpha, ctl);
  const std::size_t dim = b.pre_size();
  const std::size_t npost = b.post_size();

  // state vector: vectorized rho_pre followed by the post-sector populations
  std::vector<cplx> y(dim * dim + npost, cplx(0, 0));
  y[initial_pre_index(b, initial) * (dim + 1)] = 1.0;

  Eigen::MatrixXcd rho(dim, dim), hr(dim, dim);
  std::vector<double> dp(npost);
  auto rhs = [&](double, const std::vector<cplx>& v, std::vector<cplx>& out) {
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t k = 0; k < dim; ++k) rho(i, k) = v[i * dim + k];
    hr = ops.h * rho;
    // -i H rho + i rho H^dag = -i (H rho - (H rho)^dag) for rho = rho^dag,
    // but rho loses exact hermiticity at roundoff level, so keep both terms
    Eigen::MatrixXcd drho = cplx(0, -1) * hr + cplx(0, 1) * (rho * ops.h.adjoint());
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t k = 0; k < dim; ++k) out[i * dim + k] = drho(i, k);
    ops.jump_gain(rho, spec.gamma, dp);
    for (std::size_t f = 0; f < npost; ++f) out[dim * dim + f] = dp[f];
  };

  OdeControl octl;
  octl.rtol = ctl.rtol;
  octl.atol = ctl.atol;
  DormandPrince stepper(rhs, octl);
  auto excited_trace = [&](const std::vector<cplx>& v) {
    double tr = 0.0;
    for (std::size_t i = 0; i < dim; ++i) tr += v[i * dim + i].real();
    return tr;
  };
  res.t_end = stepper.integrate(y, 0.0, t_max, [&](double, const std::vector<cplx>& v) {
    return excited_trace(v) > ctl.excited_stop;
  });

  res.residual_excited = excited_trace(y);
  res.probabilities.resize(npost);
  double psum = 0.0;
  for (std::size_t f = 0; f < npost; ++f) {
    res.probabilities[f] = y[dim * dim + f].real();
    psum += res.probabilities[f];
  }
  res.trace_deficit = 1.0 - psum - res.residual_excited;
  if (std::abs(res.trace_deficit) > 1e-6)
    throw AccuracyError("integrate_cascade: trace deficit " + std::to_string(res.trace_deficit) +
                        " exceeds 1e-6");
  return res;
}

JumpEstimate quantum_jump_estimate(const TrapSpec& spec, const OccupationState& initial,
                                   const AlphaTensor& alpha, double t_max,
                                   const OracleControl& ctl, std::int64_t n_trajectories,
                                   std::uint64_t rng_seed, unsigned threads) {
  spec.validate();
  if (n_trajectories < 1)
    throw std::invalid_argument("quantum_jump_estimate: need at least one trajectory");
  const Basis ground = alpha.key().make_ground();
  const Basis excited = alpha.key().make_excited();
  JumpEstimate est{FockBasis::build(ground, excited, initial, ctl), {}, {}, 0.0};
  const FockBasis& b = est.basis;
  const OracleOperators ops(spec, b, alpha, ctl);
  const std::size_t dim = b.pre_size();
  const std::size_t npost = b.post_size();
  const std::size_t start = initial_pre_index(b, initial);

  auto rhs = [&](double, const std::vector<cplx>& v, std::vector<cplx>& out) {
    Eigen::Map<const Eigen::VectorXcd> psi(v.data(), dim);
    Eigen::Map<Eigen::VectorXcd> dpsi(out.data(), dim);
    dpsi = cplx(0, -1) * (ops.h * psi);
  };
  auto norm2 = [&](const std::vector<cplx>& v) {
    double acc = 0.0;
    for (const auto& z : v) acc += std::norm(z);
    return acc;
  };

  std::vector<std::vector<double>> traj(static_cast<std::size_t>(n_trajectories));
  std::vector<int> no_jump(static_cast<std::size_t>(n_trajectories), 0);

  parallel_for(static_cast<std::size_t>(n_trajectories), threads, [&](std::size_t k) {
    Rng rng(rng_seed + k);
    const double r = rng.uniform_pos();
    std::vector<cplx> psi(dim, cplx(0, 0));
    psi[start] = 1.0;
    std::vector<cplx> prev = psi;
    double t_prev = 0.0, t_jump = -1.0;

    OdeControl octl;
    octl.rtol = ctl.rtol;
    octl.atol = ctl.atol;
    DormandPrince stepper(rhs, octl);
    stepper.integrate(psi, 0.0, t_max, [&](double t, const std::vector<cplx>& v) {
      if (norm2(v) <= r) {
        t_jump = t;
        return false;
      }
      t_prev = t;
      prev = v;
      return true;
    });

    traj[k].assign(npost, 0.0);
    if (t_jump < 0.0) {
      if (norm2(psi) <= r) t_jump = t_max;  // boundary hit exactly at the end
    }
    if (t_jump < 0.0) {
      no_jump[k] = 1;
      return;
    }
    // refine the crossing time inside [t_prev, t_jump]
    double lo = 0.0, hi = t_jump - t_prev;
    std::vector<cplx> mid;
    for (int it = 0; it < 40 && hi - lo > 1e-12 * std::max(t_jump, 1e-30); ++it) {
      const double dt = 0.5 * (lo + hi);
      mid = prev;
      if (dt > 0) rk4_advance(rhs, mid, t_prev, dt, 16);
      if (norm2(mid) > r)
        lo = dt;
      else
        hi = dt;
    }
    mid = prev;
    if (0.5 * (lo + hi) > 0) rk4_advance(rhs, mid, t_prev, 0.5 * (lo + hi), 16);

    Eigen::VectorXcd psi_star(dim);
    for (std::size_t i = 0; i < dim; ++i) psi_star(i) = mid[i];
    std::vector<double> q(npost, 0.0);
    ops.jump_intensities(psi_star, q);
    const double total = std::accumulate(q.begin(), q.end(), 0.0);
    if (total <= 0.0) {
      no_jump[k] = 1;
      return;
    }
    for (std::size_t f = 0; f < npost; ++f) traj[k][f] = q[f] / total;
  });

  est.probabilities.assign(npost, 0.0);
  est.std_errors.assign(npost, 0.0);
  double jumped = 0.0;
  const double inv = 1.0 / static_cast<double>(n_trajectories);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if (no_jump[k]) {
      est.no_jump_fraction += inv;
      continue;
    }
    jumped += 1.0;
    for (std::size_t f = 0; f < npost; ++f) est.probabilities[f] += traj[k][f] * inv;
  }
  if (n_trajectories > 1) {
    std::vector<double> var(npost, 0.0);
    for (std::size_t k = 0; k < traj.size(); ++k) {
      const double* row = no_jump[k] ? nullptr : traj[k].data();
      for (std::size_t f = 0; f < npost; ++f) {
        const double v = row ? row[f] : 0.0;
        var[f] += (v - est.probabilities[f]) * (v - est.probabilities[f]);
      }
    }
    for (std::size_t f = 0; f < npost; ++f)
      est.std_errors[f] =
          std::sqrt(var[f] / (n_trajectories * (static_cast<double>(n_trajectories) - 1.0)));
  }
  (void)jumped;
  return est;
}

}  // namespace becload
