#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>

#include "becload/basis.hpp"
#include "becload/franck_condon.hpp"
#include "becload/quadrature.hpp"

namespace becload {

// Angular weighting of the emitted photon. The isotropic pattern reproduces
// the plain dOmega/(4 pi) measure; the dipole pattern multiplies it by
// (3/2) (1 - (d.Omega)^2), which integrates to 1 over the normalized sphere.
struct EmissionPattern {
  enum class Kind { isotropic, dipole };
  Kind kind = Kind::isotropic;
  int dipole_axis = 2;  // 0=x, 1=y, 2=z

  double weight(const Vec3& n) const {
    if (kind == Kind::isotropic) return 1.0;
    const double c = dipole_axis == 0 ? n.x : dipole_axis == 1 ? n.y : n.z;
    return 1.5 * (1.0 - c * c);
  }
};

// Everything the coupling tensor depends on; doubles as the cache key.
struct AlphaKey {
  int shells_g = 1, shells_e = 1;
  std::int64_t modes_g = 0, modes_e = 0;  // 0 = full shell truncation
  double eta_sq = 0.0;
  int theta_order = 16, phi_order = 16;
  int pattern = 0;      // 0 isotropic, 1 dipole
  int dipole_axis = 2;
  int pv_grid = 200;
  double kappa_max_ratio = 4.0;
  bool include_imaginary = true;

  bool operator==(const AlphaKey& o) const;
  Basis make_ground() const;
  Basis make_excited() const;
  SphereQuadrature make_quadrature() const;
  EmissionPattern make_pattern() const;
};

AlphaKey alpha_key_from(const TrapSpec& spec);

inline std::size_t composite_index(std::size_t l, std::size_t m, std::size_t n_ground) {
  return l * n_ground + m;
}

// Full coupling tensor alpha_{l m m' l'} over composite rows (l, m) and
// columns (l', m'). The on-shell part and the frequency-shift part are each
// Hermitian as composite matrices and are stored separately so both are
// recoverable exactly; the complex tensor entry is on_shell + i * shift.
class AlphaTensor {
public:
  AlphaTensor() = default;

  const AlphaKey& key() const { return key_; }
  std::size_t n_excited() const { return n_e_; }
  std::size_t n_ground() const { return n_g_; }
  std::size_t dim() const { return n_e_ * n_g_; }

  cplx value(std::size_t l, std::size_t m, std::size_t mp, std::size_t lp) const {
    const auto r = composite_index(l, m, n_g_);
    const auto c = composite_index(lp, mp, n_g_);
    return on_shell_(r, c) + cplx(0.0, 1.0) * shift_(r, c);
  }
  cplx real_part(std::size_t l, std::size_t m, std::size_t mp, std::size_t lp) const {
    return on_shell_(composite_index(l, m, n_g_), composite_index(lp, mp, n_g_));
  }
  cplx imag_part(std::size_t l, std::size_t m, std::size_t mp, std::size_t lp) const {
    return shift_(composite_index(l, m, n_g_), composite_index(lp, mp, n_g_));
  }

  const Eigen::MatrixXcd& on_shell() const { return on_shell_; }
  const Eigen::MatrixXcd& shift() const { return shift_; }

  friend AlphaTensor build_alpha_tensor(const AlphaKey& key, double budget_gib, unsigned threads);
  friend struct AlphaCacheIo;

private:
  AlphaKey key_;
  std::size_t n_e_ = 0, n_g_ = 0;
  Eigen::MatrixXcd on_shell_;  // Hermitian, PSD (Gram over emission directions)
  Eigen::MatrixXcd shift_;     // Hermitian (renormalized principal-value integral)
};

double alpha_tensor_gib(std::size_t n_excited, std::size_t n_ground, std::size_t nodes);

// Throws ResourceBudgetError when the dense tensor would exceed budget_gib.
AlphaTensor build_alpha_tensor(const AlphaKey& key, double budget_gib = 2.0,
                               unsigned threads = 1);

// The tensor slices the effective dynamics actually consumes: one ground
// index pinned at the condensate. Stored as the D x L rectangle
// C[(l,m), l'] = alpha_{l m 0 l'}; Hermitian symmetry of the full tensor
// supplies alpha_{l 0 m l'} = conj(alpha_{l' m 0 l}).
class AlphaSlices {
public:
  AlphaSlices() = default;

  const AlphaKey& key() const { return key_; }
  std::size_t n_excited() const { return n_e_; }
  std::size_t n_ground() const { return n_g_; }

  cplx value_m0(std::size_t l, std::size_t m, std::size_t lp) const {  // alpha_{l m 0 l'}
    const auto r = composite_index(l, m, n_g_);
    return rect_r_(r, lp) + cplx(0.0, 1.0) * rect_i_(r, lp);
  }

  // M_{l l'} = alpha_{l 0 0 l'}
  Eigen::MatrixXcd condensate_block() const;
  // B^{(s,+)}_{l2 l1} = alpha_{l2 s 0 l1}  (condensate-raising insertion)
  Eigen::MatrixXcd raising_block(std::size_t s) const;

  const Eigen::MatrixXcd& rect_on_shell() const { return rect_r_; }
  const Eigen::MatrixXcd& rect_shift() const { return rect_i_; }

  friend AlphaSlices build_alpha_slices(const AlphaKey& key, unsigned threads);

private:
  AlphaKey key_;
  std::size_t n_e_ = 0, n_g_ = 0;
  Eigen::MatrixXcd rect_r_, rect_i_;  // D x L
};

AlphaSlices build_alpha_slices(const AlphaKey& key, unsigned threads = 1);

// Binary cache for the full tensor. Loads succeed only when the stored key
// matches `expected` exactly and the payload checksum verifies; any mismatch
// reports a rebuild-required status, never silent reuse.
enum class CacheStatus { ok, missing, key_mismatch, corrupt };

void save_alpha_cache(const std::string& path, const AlphaTensor& tensor);
CacheStatus load_alpha_cache(const std::string& path, const AlphaKey& expected,
                             AlphaTensor& out);

}  // namespace becload
