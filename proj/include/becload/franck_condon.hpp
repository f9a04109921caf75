#pragma once

#include <complex>
#include <vector>

#include "becload/basis.hpp"
#include "becload/kernels.hpp"
#include "becload/quadrature.hpp"

namespace becload {

using cplx = std::complex<double>;

// <m| exp(i * kick * X) |l> for the 1D oscillator, X = (a + a^dagger)/sqrt(2)
// in oscillator length units. kick = 0 gives exactly delta_{lm}.
cplx fc_1d(int l, int m, double kick);

// Table of all 1D overlaps for one kick: entry(l, m) with l <= lmax, m <= mmax.
// Built by the displacement-operator recurrence; one table per (node, kappa,
// axis) is the unit of work of the 3D builder.
class Fc1dTable {
public:
  Fc1dTable(int lmax, int mmax, double kick);
  cplx operator()(int l, int m) const { return t_[static_cast<std::size_t>(m) * cols_ + l]; }

private:
  std::size_t cols_;
  std::vector<cplx> t_;
};

// Franck-Condon factor eta_{lm}(kappa * Omega): product of three 1D factors
// with per-axis kick = kappa_ratio * eta * direction_u.
cplx fc_3d(const Mode& l, const Mode& m, const Vec3& direction, double kappa_ratio,
           const TrapSpec& spec);

// eta_{lm} evaluated over all (excited l, ground m, node, kappa), stored per
// kappa in the node-major layout the gram kernels consume. Composite column
// index is l * n_ground + m.
class FranckCondonTable {
public:
  FranckCondonTable() = default;
  FranckCondonTable(const Basis& excited, const Basis& ground, const SphereQuadrature& quad,
                    const std::vector<double>& kappa_ratios, double eta, unsigned threads = 1);

  std::size_t n_excited() const { return n_e_; }
  std::size_t n_ground() const { return n_g_; }
  std::size_t n_nodes() const { return n_nodes_; }
  std::size_t n_kappa() const { return planes_.size(); }

  cplx amplitude(std::size_t l, std::size_t m, std::size_t node, std::size_t kappa) const {
    return planes_[kappa].get(node, l * n_g_ + m);
  }
  const kernels::NodeMatrix& plane(std::size_t kappa) const { return planes_[kappa]; }
  double kappa_ratio(std::size_t kappa) const { return kappas_[kappa]; }

private:
  std::size_t n_e_ = 0, n_g_ = 0, n_nodes_ = 0;
  std::vector<double> kappas_;
  std::vector<kernels::NodeMatrix> planes_;
};

}  // namespace becload
