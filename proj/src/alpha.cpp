#include "becload/alpha.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>

#include "becload/errors.hpp"
#include "becload/parallel.hpp"

namespace becload {

bool AlphaKey::operator==(const AlphaKey& o) const {
  return shells_g == o.shells_g && shells_e == o.shells_e && modes_g == o.modes_g &&
         modes_e == o.modes_e && eta_sq == o.eta_sq && theta_order == o.theta_order &&
         phi_order == o.phi_order && pattern == o.pattern && dipole_axis == o.dipole_axis &&
         pv_grid == o.pv_grid && kappa_max_ratio == o.kappa_max_ratio &&
         include_imaginary == o.include_imaginary;
}

Basis AlphaKey::make_ground() const {
  return modes_g > 0 ? Basis::prefix(modes_g) : Basis::shells(shells_g);
}

Basis AlphaKey::make_excited() const {
  return modes_e > 0 ? Basis::prefix(modes_e) : Basis::shells(shells_e);
}

SphereQuadrature AlphaKey::make_quadrature() const {
  return build_sphere_quadrature(theta_order, phi_order);
}

EmissionPattern AlphaKey::make_pattern() const {
  EmissionPattern p;
  p.kind = pattern == 1 ? EmissionPattern::Kind::dipole : EmissionPattern::Kind::isotropic;
  p.dipole_axis = dipole_axis;
  return p;
}

AlphaKey alpha_key_from(const TrapSpec& spec) {
  AlphaKey k;
  k.shells_g = spec.shells_g;
  k.shells_e = spec.shells_e;
  k.eta_sq = spec.eta_sq;
  return k;
}

double alpha_tensor_gib(std::size_t n_e, std::size_t n_g, std::size_t nodes) {
  const double d = static_cast<double>(n_e * n_g);
  const double tensor = 2.0 * 16.0 * d * d;          // on-shell + shift, dense complex
  const double plane = 16.0 * static_cast<double>(nodes) * d;  // one streamed FC plane
  return (tensor + 2.0 * plane) / (1024.0 * 1024.0 * 1024.0);
}

namespace {

kernels::PaddedWeights pattern_weights(const SphereQuadrature& quad, const EmissionPattern& pat,
                                       double extra = 1.0) {
  std::vector<double> w(quad.size());
  for (std::size_t i = 0; i < quad.size(); ++i)
    w[i] = quad.weights[i] * pat.weight(quad.nodes[i]) * extra;
  kernels::PaddedWeights pw;
  pw.assign(w);
  return pw;
}

// All Gram builds share the pole-excised principal-value construction: the
// shift tensor is (1/pi) * PV int_0^{xmax} x^3 (G(x) - G(1)) / (x - 1) dx with
// the minus sign from 1/(k0 - kappa) = -1/(kappa - k0) folded in, and the
// subtraction pins the zero-recoil shift to zero (absorbed into the
// transition frequency).
struct PvAccumulator {
  PvGrid grid;
  explicit PvAccumulator(const AlphaKey& key) {
    grid = build_pv_grid(1.0, 0.0, key.kappa_max_ratio, key.pv_grid);
  }
  double coefficient(std::size_t q) const {
    const double x = grid.x[q];
    return -(1.0 / std::numbers::pi) * grid.w[q] * x * x * x / (x - 1.0);
  }
  std::size_t size() const { return grid.x.size(); }
};

void mirror_hermitian(Eigen::MatrixXcd& m) {
  const Eigen::Index n = m.rows();
  for (Eigen::Index a = 0; a < n; ++a) {
    m(a, a) = cplx(m(a, a).real(), 0.0);
    for (Eigen::Index b = a + 1; b < n; ++b) m(b, a) = std::conj(m(a, b));
  }
}

void parallel_gram_upper(const kernels::NodeMatrix& plane, const kernels::PaddedWeights& w,
                         Eigen::MatrixXcd& C, double scale, unsigned threads) {
  const std::size_t d = plane.cols;
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(d, d);
  // row-major scratch so the kernel's C[a*ldc+b] addressing is contiguous
  std::vector<cplx> scratch(d * d, cplx(0, 0));
  const unsigned nt = effective_threads(threads);
  const std::size_t block = (d + nt - 1) / nt;
  parallel_for(nt, threads, [&](std::size_t t) {
    const std::size_t lo = t * block;
    const std::size_t hi = std::min(d, lo + block);
    if (lo < hi) kernels::weighted_gram_range(plane, plane, w, scratch.data(), d, lo, hi, true);
  });
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a; b < d; ++b) C(a, b) += scale * scratch[a * d + b];
}

void parallel_gram_rect(const kernels::NodeMatrix& A, const kernels::NodeMatrix& B,
                        const kernels::PaddedWeights& w, Eigen::MatrixXcd& C, double scale,
                        unsigned threads) {
  const std::size_t na = A.cols, nb = B.cols;
  std::vector<cplx> scratch(na * nb, cplx(0, 0));
  const unsigned nt = effective_threads(threads);
  const std::size_t block = (na + nt - 1) / nt;
  parallel_for(nt, threads, [&](std::size_t t) {
    const std::size_t lo = t * block;
    const std::size_t hi = std::min(na, lo + block);
    if (lo < hi) kernels::weighted_gram_range(A, B, w, scratch.data(), nb, lo, hi, false);
  });
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t b = 0; b < nb; ++b) C(a, b) += scale * scratch[a * nb + b];
}

kernels::NodeMatrix condensate_columns(const kernels::NodeMatrix& plane, std::size_t n_e,
                                       std::size_t n_g) {
  kernels::NodeMatrix cond;
  cond.resize(plane.rows, n_e);
  for (std::size_t l = 0; l < n_e; ++l) {
    std::memcpy(cond.re.data() + l * cond.stride, plane.col_re(composite_index(l, 0, n_g)),
                plane.stride * sizeof(double));
    std::memcpy(cond.im.data() + l * cond.stride, plane.col_im(composite_index(l, 0, n_g)),
                plane.stride * sizeof(double));
  }
  return cond;
}

}  // namespace

AlphaTensor build_alpha_tensor(const AlphaKey& key, double budget_gib, unsigned threads) {
  const Basis excited = key.make_excited();
  const Basis ground = key.make_ground();
  const SphereQuadrature quad = key.make_quadrature();
  const double need = alpha_tensor_gib(excited.size(), ground.size(), quad.size());
  if (need > budget_gib)
    throw ResourceBudgetError("alpha tensor exceeds the memory budget (" +
                                  std::to_string(need) + " GiB needed)",
                              need, budget_gib);

  AlphaTensor t;
  t.key_ = key;
  t.n_e_ = excited.size();
  t.n_g_ = ground.size();
  const std::size_t d = t.n_e_ * t.n_g_;
  t.on_shell_ = Eigen::MatrixXcd::Zero(d, d);
  t.shift_ = Eigen::MatrixXcd::Zero(d, d);

  const double eta = std::sqrt(key.eta_sq);
  const auto w = pattern_weights(quad, key.make_pattern());

  {
    FranckCondonTable on_shell(excited, ground, quad, {1.0}, eta, threads);
    parallel_gram_upper(on_shell.plane(0), w, t.on_shell_, 1.0, threads);
  }

  if (key.include_imaginary) {
    const PvAccumulator pv(key);
    double csum = 0.0;
    for (std::size_t q = 0; q < pv.size(); ++q) {
      const double c = pv.coefficient(q);
      csum += c;
      FranckCondonTable fq(excited, ground, quad, {pv.grid.x[q]}, eta, threads);
      parallel_gram_upper(fq.plane(0), w, t.shift_, c, threads);
    }
    // subtracted on-shell term of (G(x) - G(1)); both matrices are still
    // upper-triangular at this point
    t.shift_ -= csum * t.on_shell_;
  }

  mirror_hermitian(t.on_shell_);
  mirror_hermitian(t.shift_);
  return t;
}

Eigen::MatrixXcd AlphaSlices::condensate_block() const {
  Eigen::MatrixXcd m(n_e_, n_e_);
  for (std::size_t l = 0; l < n_e_; ++l)
    for (std::size_t lp = 0; lp < n_e_; ++lp) m(l, lp) = value_m0(l, 0, lp);
  return m;
}

Eigen::MatrixXcd AlphaSlices::raising_block(std::size_t s) const {
  Eigen::MatrixXcd m(n_e_, n_e_);
  for (std::size_t l2 = 0; l2 < n_e_; ++l2)
    for (std::size_t l1 = 0; l1 < n_e_; ++l1) m(l2, l1) = value_m0(l2, s, l1);
  return m;
}

AlphaSlices build_alpha_slices(const AlphaKey& key, unsigned threads) {
  const Basis excited = key.make_excited();
  const Basis ground = key.make_ground();
  const SphereQuadrature quad = key.make_quadrature();

  AlphaSlices s;
  s.key_ = key;
  s.n_e_ = excited.size();
  s.n_g_ = ground.size();
  const std::size_t d = s.n_e_ * s.n_g_;
  s.rect_r_ = Eigen::MatrixXcd::Zero(d, s.n_e_);
  s.rect_i_ = Eigen::MatrixXcd::Zero(d, s.n_e_);

  const double eta = std::sqrt(key.eta_sq);
  const auto w = pattern_weights(quad, key.make_pattern());

  {
    FranckCondonTable on_shell(excited, ground, quad, {1.0}, eta, threads);
    const auto cond = condensate_columns(on_shell.plane(0), s.n_e_, s.n_g_);
    parallel_gram_rect(on_shell.plane(0), cond, w, s.rect_r_, 1.0, threads);
  }

  if (key.include_imaginary) {
    const PvAccumulator pv(key);
    double csum = 0.0;
    for (std::size_t q = 0; q < pv.size(); ++q) {
      const double c = pv.coefficient(q);
      csum += c;
      FranckCondonTable fq(excited, ground, quad, {pv.grid.x[q]}, eta, threads);
      const auto cond = condensate_columns(fq.plane(0), s.n_e_, s.n_g_);
      parallel_gram_rect(fq.plane(0), cond, w, s.rect_i_, c, threads);
    }
    s.rect_i_ -= csum * s.rect_r_;
  }
  return s;
}

// ---------------------------------------------------------------------------
// cache file: magic, version, key, dims, payload, fnv1a checksum

namespace {

constexpr char kMagic[8] = {'B', 'L', 'A', 'L', 'P', 'H', 'A', '1'};
constexpr std::uint32_t kVersion = 1;

std::uint64_t fnv1a(const unsigned char* p, std::size_t n, std::uint64_t h = 1469598103934665603ULL) {
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

struct KeyRecord {
  std::int32_t shells_g, shells_e;
  std::int64_t modes_g, modes_e;
  double eta_sq;
  std::int32_t theta_order, phi_order, pattern, dipole_axis, pv_grid;
  double kappa_max_ratio;
  std::int32_t include_imaginary;
  std::int32_t pad = 0;
};

KeyRecord to_record(const AlphaKey& k) {
  KeyRecord r{};
  r.shells_g = k.shells_g;
  r.shells_e = k.shells_e;
  r.modes_g = k.modes_g;
  r.modes_e = k.modes_e;
  r.eta_sq = k.eta_sq;
  r.theta_order = k.theta_order;
  r.phi_order = k.phi_order;
  r.pattern = k.pattern;
  r.dipole_axis = k.dipole_axis;
  r.pv_grid = k.pv_grid;
  r.kappa_max_ratio = k.kappa_max_ratio;
  r.include_imaginary = k.include_imaginary ? 1 : 0;
  return r;
}

AlphaKey from_record(const KeyRecord& r) {
  AlphaKey k;
  k.shells_g = r.shells_g;
  k.shells_e = r.shells_e;
  k.modes_g = r.modes_g;
  k.modes_e = r.modes_e;
  k.eta_sq = r.eta_sq;
  k.theta_order = r.theta_order;
  k.phi_order = r.phi_order;
  k.pattern = r.pattern;
  k.dipole_axis = r.dipole_axis;
  k.pv_grid = r.pv_grid;
  k.kappa_max_ratio = r.kappa_max_ratio;
  k.include_imaginary = r.include_imaginary != 0;
  return k;
}

}  // namespace

struct AlphaCacheIo {
  static void save(const std::string& path, const AlphaTensor& t) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open cache file for writing: " + path);
    f.write(kMagic, sizeof(kMagic));
    const std::uint32_t ver = kVersion;
    f.write(reinterpret_cast<const char*>(&ver), sizeof(ver));
    KeyRecord rec = to_record(t.key_);
    f.write(reinterpret_cast<const char*>(&rec), sizeof(rec));
    const std::uint64_t ne = t.n_e_, ng = t.n_g_;
    f.write(reinterpret_cast<const char*>(&ne), sizeof(ne));
    f.write(reinterpret_cast<const char*>(&ng), sizeof(ng));
    const std::size_t d = t.n_e_ * t.n_g_;
    const std::size_t bytes = d * d * sizeof(cplx);
    std::uint64_t h = fnv1a(reinterpret_cast<const unsigned char*>(t.on_shell_.data()), bytes);
    h = fnv1a(reinterpret_cast<const unsigned char*>(t.shift_.data()), bytes, h);
    f.write(reinterpret_cast<const char*>(t.on_shell_.data()), static_cast<std::streamsize>(bytes));
    f.write(reinterpret_cast<const char*>(t.shift_.data()), static_cast<std::streamsize>(bytes));
    f.write(reinterpret_cast<const char*>(&h), sizeof(h));
    if (!f) throw std::runtime_error("cache write failed: " + path);
  }

  static CacheStatus load(const std::string& path, const AlphaKey& expected, AlphaTensor& out) {
    std::ifstream f(path, std::ios::binary);
    if (!f) return CacheStatus::missing;
    char magic[8];
    std::uint32_t ver = 0;
    if (!f.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
      return CacheStatus::corrupt;
    if (!f.read(reinterpret_cast<char*>(&ver), sizeof(ver)) || ver != kVersion)
      return CacheStatus::key_mismatch;
    KeyRecord rec{};
    if (!f.read(reinterpret_cast<char*>(&rec), sizeof(rec))) return CacheStatus::corrupt;
    if (!(from_record(rec) == expected)) return CacheStatus::key_mismatch;
    std::uint64_t ne = 0, ng = 0;
    if (!f.read(reinterpret_cast<char*>(&ne), sizeof(ne)) ||
        !f.read(reinterpret_cast<char*>(&ng), sizeof(ng)))
      return CacheStatus::corrupt;
    const std::size_t d = static_cast<std::size_t>(ne) * static_cast<std::size_t>(ng);
    AlphaTensor t;
    t.key_ = expected;
    t.n_e_ = ne;
    t.n_g_ = ng;
    t.on_shell_.resize(d, d);
    t.shift_.resize(d, d);
    const std::size_t bytes = d * d * sizeof(cplx);
    if (!f.read(reinterpret_cast<char*>(t.on_shell_.data()), static_cast<std::streamsize>(bytes)))
      return CacheStatus::corrupt;
    if (!f.read(reinterpret_cast<char*>(t.shift_.data()), static_cast<std::streamsize>(bytes)))
      return CacheStatus::corrupt;
    std::uint64_t stored = 0;
    if (!f.read(reinterpret_cast<char*>(&stored), sizeof(stored))) return CacheStatus::corrupt;
    std::uint64_t h = fnv1a(reinterpret_cast<const unsigned char*>(t.on_shell_.data()), bytes);
    h = fnv1a(reinterpret_cast<const unsigned char*>(t.shift_.data()), bytes, h);
    if (h != stored) return CacheStatus::corrupt;
    out = std::move(t);
    return CacheStatus::ok;
  }
};

void save_alpha_cache(const std::string& path, const AlphaTensor& tensor) {
  AlphaCacheIo::save(path, tensor);
}

CacheStatus load_alpha_cache(const std::string& path, const AlphaKey& expected, AlphaTensor& out) {
  return AlphaCacheIo::load(path, expected, out);
}

}  // namespace becload
