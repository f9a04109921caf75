#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "becload/alpha.hpp"
#include "becload/basis.hpp"

namespace becload {

// Single-excitation generator K of the no-jump evolution: amplitudes obey
// dc/dt = -i K c with K_{ll'} = -i (Gamma N0 / 2) alpha_{l 0 0 l'}
// (optionally plus the bare excited energies on the diagonal). The condensate
// zero-point phase is physically inert in every |amplitude|^2 and is kept
// only for debugging dumps.
struct EffectiveGenerator {
  Eigen::MatrixXcd matrix;    // K
  double phase_offset = 0.0;  // N0 * omega_0^g + transition frequency
};

EffectiveGenerator build_generator(const AlphaSlices& alpha, const TrapSpec& spec,
                                   bool include_excited_energies = false);
EffectiveGenerator build_generator(const AlphaTensor& alpha, const TrapSpec& spec,
                                   bool include_excited_energies = false);

// Paired eigensystem of a non-Hermitian matrix: columns of `right` are the
// right eigenvectors, rows of `left_conj` are the conjugated left eigenvectors
// (left_conj = right^{-1}), so <v^L_j, v^R_k> = delta_{jk} holds by
// construction.
struct BiorthoDecomp {
  Eigen::VectorXcd eigenvalues;
  Eigen::MatrixXcd right;      // V
  Eigen::MatrixXcd left_conj;  // V^{-1}

  Eigen::VectorXcd right_vector(Eigen::Index k) const { return right.col(k); }
  Eigen::VectorXcd left_vector(Eigen::Index k) const { return left_conj.row(k).adjoint(); }
  Eigen::MatrixXcd reconstruct() const {
    return right * eigenvalues.asDiagonal() * left_conj;
  }
};

// Throws DegeneracyError (listing the clustered eigenvalues) when the matrix
// is defective within tolerance.
BiorthoDecomp biortho_decompose(const Eigen::MatrixXcd& matrix);
BiorthoDecomp biortho_decompose(const EffectiveGenerator& gen);

// A0(t) = exp(-i K t) = sum_k exp(-i lambda_k t) v^R(k) (v^L(k))^dagger.
// t < 0 -> std::invalid_argument.
Eigen::MatrixXcd propagate_A0(const BiorthoDecomp& decomp, double t);

// Time kernel of one first-order insertion between eigenmodes a and b:
//   -i * int_0^t exp(-i la (t-tau)) exp(-i lb tau) dtau
// with the confluent limit -i t exp(-i la t) when |la - lb| < eps_deg.
cplx a1_time_kernel(cplx lambda_a, cplx lambda_b, double t, double eps_deg = 1e-12);

// One decaying amplitude term c * t^p * exp(z t).
struct OverlapTerm {
  cplx coefficient;
  cplx exponent;  // must have Re < 0 whenever |coefficient| > 0
  int power = 0;  // 0, 1 or 2
};

// int_0^inf | sum_j c_j t^{p_j} e^{z_j t} |^2 dt, expanded into cross terms
// int t^p e^{zt} dt = p! / (-z)^{p+1}. Throws DivergenceError on a
// non-decaying exponent with nonzero coefficient.
double infinite_time_overlap(const std::vector<OverlapTerm>& terms);

// Matrix of cross integrals H_{jk} = int_0^inf t^{p_j + p_k}
// exp((z_j + conj(z_k)) t) dt used by the batched amplitude evaluators.
Eigen::MatrixXcd overlap_cross_matrix(const std::vector<cplx>& exponents,
                                      const std::vector<int>& powers);

// Coefficients of H_eff^(1) for one initial occupation configuration, split
// into the condensate-raising block (g0^dag g_m, removes one sideband atom)
// and the condensate-lowering block (g_m^dag g0). Condensate Bose factors are
// taken at leading order sqrt(N0); sideband factors are exact.
struct FirstOrderCoupling {
  // per ground mode m (entry 0 unused): -i (Gamma/2) sqrt(N0 N_m) alpha_{l m 0 l'}
  std::vector<Eigen::MatrixXcd> raising;
  // per ground mode m: -i (Gamma/2) sqrt(N0 (N_m + 1)) alpha_{l 0 m l'}
  std::vector<Eigen::MatrixXcd> lowering;
};

FirstOrderCoupling build_first_order_coupling(const AlphaSlices& alpha, const TrapSpec& spec,
                                              const std::vector<std::int64_t>& occupations);

}  // namespace becload
