#include "becload/franck_condon.hpp"

#include <cmath>

#include "becload/parallel.hpp"

namespace becload {

// Displacement-operator matrix elements <m|D(beta)|l> with beta = i*kick/sqrt(2).
// Column l = 0 is the coherent-state expansion; columns grow by
//   <m|D|l+1> = (sqrt(m) <m-1|D|l> - conj(beta) <m|D|l>) / sqrt(l+1).
Fc1dTable::Fc1dTable(int lmax, int mmax, double kick) : cols_(static_cast<std::size_t>(lmax) + 1) {
  const std::size_t rows = static_cast<std::size_t>(mmax) + 1;
  t_.assign(rows * cols_, cplx(0.0, 0.0));
  const cplx beta(0.0, kick / std::sqrt(2.0));
  const double g = std::exp(-0.25 * kick * kick);  // exp(-|beta|^2 / 2)
  if (kick == 0.0) {
    for (int d = 0; d <= std::min(lmax, mmax); ++d)
      t_[static_cast<std::size_t>(d) * cols_ + d] = 1.0;
    return;
  }
  cplx v = g;
  t_[0] = v;
  for (int m = 1; m <= mmax; ++m) {
    v *= beta / std::sqrt(static_cast<double>(m));
    t_[static_cast<std::size_t>(m) * cols_] = v;
  }
  for (int l = 0; l < lmax; ++l) {
    const double rl = 1.0 / std::sqrt(static_cast<double>(l + 1));
    for (int m = 0; m <= mmax; ++m) {
      cplx acc = -std::conj(beta) * t_[static_cast<std::size_t>(m) * cols_ + l];
      if (m > 0)
        acc += std::sqrt(static_cast<double>(m)) * t_[static_cast<std::size_t>(m - 1) * cols_ + l];
      t_[static_cast<std::size_t>(m) * cols_ + l + 1] = acc * rl;
    }
  }
}

cplx fc_1d(int l, int m, double kick) {
  if (l < 0 || m < 0) throw std::invalid_argument("fc_1d: quantum numbers must be >= 0");
  Fc1dTable t(l, m, kick);
  return t(l, m);
}

cplx fc_3d(const Mode& l, const Mode& m, const Vec3& direction, double kappa_ratio,
           const TrapSpec& spec) {
  const double eta = spec.eta();
  return fc_1d(l.nx, m.nx, kappa_ratio * eta * direction.x) *
         fc_1d(l.ny, m.ny, kappa_ratio * eta * direction.y) *
         fc_1d(l.nz, m.nz, kappa_ratio * eta * direction.z);
}

FranckCondonTable::FranckCondonTable(const Basis& excited, const Basis& ground,
                                     const SphereQuadrature& quad,
                                     const std::vector<double>& kappa_ratios, double eta,
                                     unsigned threads)
    : n_e_(excited.size()), n_g_(ground.size()), n_nodes_(quad.size()), kappas_(kappa_ratios) {
  const int lmax = excited.max_axis_quantum();
  const int mmax = ground.max_axis_quantum();
  planes_.resize(kappas_.size());
  for (auto& p : planes_) p.resize(n_nodes_, n_e_ * n_g_);

  struct Job {
    std::size_t kappa, node;
  };
  std::vector<Job> jobs;
  jobs.reserve(kappas_.size() * n_nodes_);
  for (std::size_t q = 0; q < kappas_.size(); ++q)
    for (std::size_t w = 0; w < n_nodes_; ++w) jobs.push_back({q, w});

  parallel_for(jobs.size(), threads, [&](std::size_t ji) {
    const auto [q, w] = jobs[ji];
    const Vec3 dir = quad.nodes[w];
    const double k = kappas_[q] * eta;
    const Fc1dTable tx(lmax, mmax, k * dir.x);
    const Fc1dTable ty(lmax, mmax, k * dir.y);
    const Fc1dTable tz(lmax, mmax, k * dir.z);
    auto& plane = planes_[q];
    for (std::size_t li = 0; li < n_e_; ++li) {
      const Mode& lm = excited.mode(li);
      for (std::size_t mi = 0; mi < n_g_; ++mi) {
        const Mode& gm = ground.mode(mi);
        plane.set(w, li * n_g_ + mi, tx(lm.nx, gm.nx) * ty(lm.ny, gm.ny) * tz(lm.nz, gm.nz));
      }
    }
  });
}

}  // namespace becload
