#include <doctest.h>

#include <cmath>

#include "becload/franck_condon.hpp"
#include "oracles.hpp"

using namespace becload;

TEST_CASE("kick = 0 is exactly the identity") {
  for (int l = 0; l < 6; ++l)
    for (int m = 0; m < 6; ++m) {
      const cplx v = fc_1d(l, m, 0.0);
      if (l == m)
        CHECK(v == cplx(1.0, 0.0));
      else
        CHECK(v == cplx(0.0, 0.0));
    }
}

TEST_CASE("ground-ground overlap is the gaussian exp(-k^2/4)") {
  for (double k : {0.3, 1.0, 2.5}) {
    const cplx v = fc_1d(0, 0, k);
    CHECK(std::abs(v - std::exp(-k * k / 4.0)) < 1e-14);
  }
}

TEST_CASE("fc_1d matches the gauss-hermite quadrature oracle") {
  for (double k : {0.4, 1.3, 3.7}) {
    for (int l = 0; l < 9; ++l)
      for (int m = 0; m < 9; ++m) {
        const cplx v = fc_1d(l, m, k);
        const cplx ref = testsupport::fc_1d_quadrature(l, m, k);
        CHECK(std::abs(v - ref) < 1e-10);
      }
  }
}

TEST_CASE("unitarity: row sums of |overlap|^2 approach 1") {
  const double k = 1.7;
  for (int l = 0; l < 4; ++l) {
    double acc = 0.0;
    for (int m = 0; m < 40; ++m) acc += std::norm(fc_1d(l, m, k));
    CHECK(acc == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(acc <= 1.0 + 1e-10);
  }
}

TEST_CASE("k -> -k symmetry: fc(l,m,-k) = conj(fc(m,l,k)) and parity") {
  const double k = 0.9;
  for (int l = 0; l < 6; ++l)
    for (int m = 0; m < 6; ++m) {
      const cplx a = fc_1d(l, m, -k);
      CHECK(std::abs(a - std::conj(fc_1d(m, l, k))) < 1e-13);
      const double sign = ((l + m) % 2 == 0) ? 1.0 : -1.0;
      CHECK(std::abs(a - sign * fc_1d(l, m, k)) < 1e-13);
    }
}

TEST_CASE("fc_3d: zero recoil, gaussian point, axis-permutation isotropy") {
  TrapSpec spec;
  spec.n_atoms = spec.n_condensed = 1;

  spec.eta_sq = 0.0;
  CHECK(fc_3d(Mode{1, 0, 2}, Mode{1, 0, 2}, Vec3{0, 0, 1}, 1.0, spec) == cplx(1.0, 0.0));
  CHECK(fc_3d(Mode{1, 0, 2}, Mode{1, 1, 1}, Vec3{0, 0, 1}, 1.0, spec) == cplx(0.0, 0.0));

  spec.eta_sq = 2.0;
  const double s = 1.0 / std::sqrt(3.0);
  const cplx v = fc_3d(Mode{0, 0, 0}, Mode{0, 0, 0}, Vec3{s, s, s}, 1.0, spec);
  CHECK(std::abs(v - std::exp(-0.5)) < 1e-13);  // exp(-eta^2/4) at eta^2 = 2

  const cplx a = fc_3d(Mode{2, 0, 1}, Mode{1, 1, 0}, Vec3{0.1, 0.7, std::sqrt(0.5)}, 0.8, spec);
  const cplx b = fc_3d(Mode{0, 2, 1}, Mode{1, 1, 0}, Vec3{0.7, 0.1, std::sqrt(0.5)}, 0.8, spec);
  CHECK(std::abs(a - b) < 1e-14);
}

TEST_CASE("table agrees with fc_3d and satisfies the completeness bound") {
  TrapSpec spec;
  spec.eta_sq = 2.0;
  spec.n_atoms = spec.n_condensed = 1;
  const Basis excited = Basis::shells(2);
  const Basis ground = Basis::shells(5);
  const SphereQuadrature quad = build_sphere_quadrature(6, 6);
  const std::vector<double> kappas{0.5, 1.0};
  const FranckCondonTable table(excited, ground, quad, kappas, spec.eta());

  for (std::size_t q = 0; q < kappas.size(); ++q)
    for (std::size_t w = 0; w < quad.size(); w += 7)
      for (std::size_t l = 0; l < excited.size(); ++l)
        for (std::size_t m = 0; m < ground.size(); m += 3) {
          const cplx ref =
              fc_3d(excited.mode(l), ground.mode(m), quad.nodes[w], kappas[q], spec);
          CHECK(std::abs(table.amplitude(l, m, w, q) - ref) < 1e-13);
        }

  for (std::size_t q = 0; q < kappas.size(); ++q)
    for (std::size_t w = 0; w < quad.size(); ++w)
      for (std::size_t l = 0; l < excited.size(); ++l) {
        double acc = 0.0;
        for (std::size_t m = 0; m < ground.size(); ++m)
          acc += std::norm(table.amplitude(l, m, w, q));
        CHECK(acc <= 1.0 + 1e-10);
      }
}

TEST_CASE("completeness grows monotonically with the ground truncation") {
  TrapSpec spec;
  spec.eta_sq = 2.0;
  spec.n_atoms = spec.n_condensed = 1;
  const Basis excited = Basis::shells(1);
  const SphereQuadrature quad = build_sphere_quadrature(8, 8);
  double prev = 0.0;
  for (int shells : {4, 8, 12}) {
    const Basis ground = Basis::shells(shells);
    const FranckCondonTable table(excited, ground, quad, {1.0}, spec.eta());
    double acc = 0.0;
    for (std::size_t w = 0; w < quad.size(); ++w)
      for (std::size_t m = 0; m < ground.size(); ++m)
        acc += quad.weights[w] * std::norm(table.amplitude(0, m, w, 0));
    CHECK(acc > prev);
    prev = acc;
  }
  CHECK(prev > 0.95);
}
