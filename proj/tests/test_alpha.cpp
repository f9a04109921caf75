#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "becload/alpha.hpp"
#include "becload/errors.hpp"

using namespace becload;

namespace {

AlphaKey small_key(double eta_sq, bool imaginary, int shells_e = 2, int shells_g = 3) {
  AlphaKey k;
  k.shells_e = shells_e;
  k.shells_g = shells_g;
  k.eta_sq = eta_sq;
  k.theta_order = 12;
  k.phi_order = 12;
  k.pv_grid = 64;
  k.include_imaginary = imaginary;
  return k;
}

}  // namespace

TEST_CASE("zero recoil collapses to kronecker deltas with zero imaginary part") {
  const AlphaKey key = small_key(0.0, true);
  const AlphaTensor t = build_alpha_tensor(key);
  const Basis e = key.make_excited();
  const Basis g = key.make_ground();
  for (std::size_t l = 0; l < e.size(); ++l)
    for (std::size_t m = 0; m < g.size(); ++m)
      for (std::size_t mp = 0; mp < g.size(); ++mp)
        for (std::size_t lp = 0; lp < e.size(); ++lp) {
          const bool diag = (e.mode(l) == g.mode(m)) && (e.mode(lp) == g.mode(mp));
          CHECK(t.real_part(l, m, mp, lp) == cplx(diag ? 1.0 : 0.0, 0.0));
          CHECK(t.imag_part(l, m, mp, lp) == cplx(0.0, 0.0));
        }
}

TEST_CASE("composite on-shell matrix is hermitian (mirrored exactly) and PSD") {
  const AlphaKey key = small_key(2.0, false);
  const AlphaTensor t = build_alpha_tensor(key);
  const auto& a = t.on_shell();
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      CHECK(a(i, j) == std::conj(a(j, i)));  // bit-equal mirrored storage
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("shift matrix is hermitian too") {
  const AlphaKey key = small_key(1.5, true);
  const AlphaTensor t = build_alpha_tensor(key);
  const auto& s = t.shift();
  CHECK((s - s.adjoint()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.cwiseAbs().maxCoeff() > 0.0);  // genuinely nonzero at finite recoil
}

TEST_CASE("trace identity: sum_m alpha^r_{lmml} equals the angular completeness") {
  const AlphaKey key = small_key(2.0, false);
  const AlphaTensor t = build_alpha_tensor(key);
  const Basis e = key.make_excited();
  const Basis g = key.make_ground();
  const SphereQuadrature quad = key.make_quadrature();
  const FranckCondonTable table(e, g, quad, {1.0}, std::sqrt(key.eta_sq));
  for (std::size_t l = 0; l < e.size(); ++l) {
    double tr = 0.0;
    for (std::size_t m = 0; m < g.size(); ++m) tr += t.real_part(l, m, m, l).real();
    double ref = 0.0;
    for (std::size_t w = 0; w < quad.size(); ++w)
      for (std::size_t m = 0; m < g.size(); ++m)
        ref += quad.weights[w] * std::norm(table.amplitude(l, m, w, 0));
    CHECK(tr == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("single entry against a 4x-order quadrature oracle") {
  AlphaKey key = small_key(2.0, false, 1, 2);
  const AlphaTensor t = build_alpha_tensor(key);
  AlphaKey dense = key;
  dense.theta_order *= 4;
  dense.phi_order *= 4;
  const AlphaTensor td = build_alpha_tensor(dense);
  CHECK(std::abs(t.real_part(0, 0, 0, 0) - td.real_part(0, 0, 0, 0)) < 1e-8);
}

TEST_CASE("parity selection from the reflection-symmetric quadrature") {
  const AlphaKey key = small_key(2.0, false, 2, 4);
  const AlphaTensor t = build_alpha_tensor(key);
  const Basis e = key.make_excited();
  const Basis g = key.make_ground();
  double worst = 0.0;
  for (std::size_t l = 0; l < e.size(); ++l)
    for (std::size_t m = 0; m < g.size(); ++m)
      for (std::size_t mp = 0; mp < g.size(); ++mp)
        for (std::size_t lp = 0; lp < e.size(); ++lp) {
          const Mode &a = e.mode(l), &b = g.mode(m), &c = e.mode(lp), &d = g.mode(mp);
          const bool mismatch = ((a.nx + b.nx) % 2 != (c.nx + d.nx) % 2) ||
                                ((a.ny + b.ny) % 2 != (c.ny + d.ny) % 2) ||
                                ((a.nz + b.nz) % 2 != (c.nz + d.nz) % 2);
          if (mismatch) worst = std::max(worst, std::abs(t.real_part(l, m, mp, lp)));
        }
  CHECK(worst < 1e-12);
}

TEST_CASE("slices agree with the full tensor") {
  const AlphaKey key = small_key(1.2, true);
  const AlphaTensor t = build_alpha_tensor(key);
  const AlphaSlices s = build_alpha_slices(key);
  const Basis e = key.make_excited();
  const Basis g = key.make_ground();
  for (std::size_t l = 0; l < e.size(); ++l)
    for (std::size_t m = 0; m < g.size(); ++m)
      for (std::size_t lp = 0; lp < e.size(); ++lp)
        CHECK(std::abs(s.value_m0(l, m, lp) - t.value(l, m, 0, lp)) < 1e-13);
  // lowering side via hermitian symmetry
  const Eigen::MatrixXcd bp = s.raising_block(1);
  for (std::size_t l = 0; l < e.size(); ++l)
    for (std::size_t lp = 0; lp < e.size(); ++lp)
      CHECK(std::abs(std::conj(bp(lp, l)) - t.value(l, 0, 1, lp)) < 1e-13);
}

TEST_CASE("memory budget is enforced") {
  AlphaKey key = small_key(2.0, false, 3, 8);
  CHECK_THROWS_AS(build_alpha_tensor(key, /*budget_gib=*/1e-6), ResourceBudgetError);
}

TEST_CASE("cache: round-trip, key mismatch, corruption") {
  const AlphaKey key = small_key(0.7, true, 1, 2);
  const AlphaTensor t = build_alpha_tensor(key);
  const std::string path = "alpha_test_cache.bin";
  save_alpha_cache(path, t);

  AlphaTensor loaded;
  REQUIRE(load_alpha_cache(path, key, loaded) == CacheStatus::ok);
  CHECK(loaded.on_shell() == t.on_shell());
  CHECK(loaded.shift() == t.shift());

  AlphaKey other = key;
  other.pv_grid += 1;
  CHECK(load_alpha_cache(path, other, loaded) == CacheStatus::key_mismatch);

  auto bytes = [&] {
    FILE* f = std::fopen(path.c_str(), "rb+");
    REQUIRE(f != nullptr);
    std::fseek(f, -9, SEEK_END);
    int c = std::fgetc(f);
    std::fseek(f, -9, SEEK_END);
    std::fputc(c ^ 0x40, f);
    std::fclose(f);
  };
  bytes();
  CHECK(load_alpha_cache(path, key, loaded) == CacheStatus::corrupt);
  CHECK(load_alpha_cache("no_such_file.bin", key, loaded) == CacheStatus::missing);
  std::filesystem::remove(path);
}
