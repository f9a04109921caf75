#include "becload/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "becload/errors.hpp"

namespace becload {

namespace {

EffectiveGenerator make_generator(Eigen::MatrixXcd condensate_block, const TrapSpec& spec,
                                  bool include_excited_energies, const Basis& excited) {
  spec.validate();
  EffectiveGenerator gen;
  const double scale = spec.gamma * static_cast<double>(spec.n_condensed) / 2.0;
  gen.matrix = cplx(0.0, -1.0) * scale * condensate_block;
  if (include_excited_energies) {
    for (std::size_t l = 0; l < excited.size(); ++l)
      gen.matrix(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(l)) +=
          mode_energy(excited.mode(l), spec);
  }
  gen.phase_offset =
      static_cast<double>(spec.n_condensed) * 1.5 * spec.omega + spec.transition_frequency;
  return gen;
}

}  // namespace

EffectiveGenerator build_generator(const AlphaSlices& alpha, const TrapSpec& spec,
                                   bool include_excited_energies) {
  const Basis excited = alpha.key().make_excited();
  if (excited.size() != alpha.n_excited())
    throw std::invalid_argument("build_generator: basis mismatch");
  return make_generator(alpha.condensate_block(), spec, include_excited_energies, excited);
}

EffectiveGenerator build_generator(const AlphaTensor& alpha, const TrapSpec& spec,
                                   bool include_excited_energies) {
  const Basis excited = alpha.key().make_excited();
  if (excited.size() != alpha.n_excited())
    throw std::invalid_argument("build_generator: basis mismatch");
  Eigen::MatrixXcd block(alpha.n_excited(), alpha.n_excited());
  for (std::size_t l = 0; l < alpha.n_excited(); ++l)
    for (std::size_t lp = 0; lp < alpha.n_excited(); ++lp) block(l, lp) = alpha.value(l, 0, 0, lp);
  return make_generator(std::move(block), spec, include_excited_energies, excited);
}

BiorthoDecomp biortho_decompose(const Eigen::MatrixXcd& matrix) {
  if (matrix.rows() != matrix.cols())
    throw std::invalid_argument("biortho_decompose: matrix must be square");
  if (!matrix.allFinite())
    throw std::invalid_argument("biortho_decompose: matrix has non-finite entries");

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(matrix, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("biortho_decompose: eigensolver failed to converge");

  BiorthoDecomp d;
  d.eigenvalues = solver.eigenvalues();
  d.right = solver.eigenvectors();

  const double scale = std::max(matrix.norm(), 1e-300);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(d.right);
  d.left_conj = lu.solve(Eigen::MatrixXcd::Identity(matrix.rows(), matrix.cols()));

  // A defective matrix shows up as an (almost) singular eigenvector matrix:
  // verify by reconstruction instead of trusting a condition estimate.
  const double residual = (d.reconstruct() - matrix).norm() / scale;
  const double biortho = (d.left_conj * d.right -
                          Eigen::MatrixXcd::Identity(matrix.rows(), matrix.cols()))
                             .cwiseAbs()
                             .maxCoeff();
  if (!d.left_conj.allFinite() || residual > 1e-10 || biortho > 1e-8) {
    // name the clustered eigenvalues
    const double eps = 1e-8 * std::max(d.eigenvalues.cwiseAbs().maxCoeff(), 1e-300);
    std::vector<cplx> clustered;
    for (Eigen::Index i = 0; i < d.eigenvalues.size(); ++i)
      for (Eigen::Index j = i + 1; j < d.eigenvalues.size(); ++j)
        if (std::abs(d.eigenvalues(i) - d.eigenvalues(j)) <= eps) {
          clustered.push_back(d.eigenvalues(i));
          clustered.push_back(d.eigenvalues(j));
        }
    std::ostringstream msg;
    msg << "biortho_decompose: matrix is defective within tolerance (reconstruction residual "
        << residual << "); clustered eigenvalues:";
    for (const auto& z : clustered) msg << " (" << z.real() << "," << z.imag() << ")";
    throw DegeneracyError(msg.str(), clustered);
  }
  return d;
}

BiorthoDecomp biortho_decompose(const EffectiveGenerator& gen) {
  return biortho_decompose(gen.matrix);
}

Eigen::MatrixXcd propagate_A0(const BiorthoDecomp& decomp, double t) {
  if (t < 0.0) throw std::invalid_argument("propagate_A0: t must be >= 0");
  Eigen::VectorXcd phases(decomp.eigenvalues.size());
  for (Eigen::Index k = 0; k < phases.size(); ++k)
    phases(k) = std::exp(cplx(0.0, -1.0) * decomp.eigenvalues(k) * t);
  return decomp.right * phases.asDiagonal() * decomp.left_conj;
}

cplx a1_time_kernel(cplx lambda_a, cplx lambda_b, double t, double eps_deg) {
  if (t < 0.0) throw std::invalid_argument("a1_time_kernel: t must be >= 0");
  const cplx mi(0.0, -1.0);
  if (std::abs(lambda_a - lambda_b) < eps_deg) {
    const cplx mean = 0.5 * (lambda_a + lambda_b);
    return mi * t * std::exp(mi * mean * t);
  }
  return -(std::exp(mi * lambda_b * t) - std::exp(mi * lambda_a * t)) / (lambda_a - lambda_b);
}

namespace {

double factorial_small(int n) {
  static const double table[] = {1.0, 1.0, 2.0, 6.0, 24.0};
  return table[n];
}

// int_0^inf t^p e^{z t} dt for Re z < 0
cplx decaying_moment(int p, cplx z) { return factorial_small(p) / std::pow(-z, p + 1); }

}  // namespace

double infinite_time_overlap(const std::vector<OverlapTerm>& terms) {
  for (const auto& term : terms) {
    if (term.power < 0 || term.power > 2)
      throw std::invalid_argument("infinite_time_overlap: power must be in {0,1,2}");
    if (std::abs(term.coefficient) > 0.0 && !(term.exponent.real() < 0.0))
      throw DivergenceError(
          "infinite_time_overlap: non-decaying exponent (zero decay rate configuration)");
  }
  cplx acc(0.0, 0.0);
  for (const auto& a : terms) {
    if (std::abs(a.coefficient) == 0.0) continue;
    for (const auto& b : terms) {
      if (std::abs(b.coefficient) == 0.0) continue;
      acc += a.coefficient * std::conj(b.coefficient) *
             decaying_moment(a.power + b.power, a.exponent + std::conj(b.exponent));
    }
  }
  return acc.real();
}

Eigen::MatrixXcd overlap_cross_matrix(const std::vector<cplx>& exponents,
                                      const std::vector<int>& powers) {
  const Eigen::Index n = static_cast<Eigen::Index>(exponents.size());
  Eigen::MatrixXcd h(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k) {
      const cplx z = exponents[j] + std::conj(exponents[k]);
      if (!(z.real() < 0.0))
        throw DivergenceError("overlap_cross_matrix: non-decaying exponent pair");
      h(j, k) = decaying_moment(powers[j] + powers[k], z);
    }
  return h;
}

FirstOrderCoupling build_first_order_coupling(const AlphaSlices& alpha, const TrapSpec& spec,
                                              const std::vector<std::int64_t>& occupations) {
  spec.validate();
  const std::size_t n_g = alpha.n_ground();
  const std::size_t n_e = alpha.n_excited();
  if (occupations.size() != n_g)
    throw std::invalid_argument("build_first_order_coupling: occupation size mismatch");
  const double n0 = static_cast<double>(occupations[0]);
  FirstOrderCoupling c;
  c.raising.resize(n_g);
  c.lowering.resize(n_g);
  const cplx pref = cplx(0.0, -1.0) * spec.gamma / 2.0;
  for (std::size_t m = 1; m < n_g; ++m) {
    const double nm = static_cast<double>(occupations[m]);
    const Eigen::MatrixXcd bp = alpha.raising_block(m);  // alpha_{l m 0 l'}
    c.raising[m] = pref * std::sqrt(n0 * nm) * bp;
    // alpha_{l 0 m l'} = conj(alpha_{l' m 0 l})
    c.lowering[m] = pref * std::sqrt(n0 * (nm + 1.0)) * bp.adjoint();
  }
  c.raising[0] = Eigen::MatrixXcd::Zero(n_e, n_e);
  c.lowering[0] = Eigen::MatrixXcd::Zero(n_e, n_e);
  return c;
}

}  // namespace becload
