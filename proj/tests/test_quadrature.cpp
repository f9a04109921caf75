#include <doctest.h>

#include <cmath>
#include <numbers>

#include "becload/quadrature.hpp"
#include "oracles.hpp"

using namespace becload;

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  const GaussLegendre gl = gauss_legendre(8, 0.0, 2.0);
  double acc = 0.0;
  for (int i = 0; i < 8; ++i) acc += gl.w[i] * std::pow(gl.x[i], 7);
  CHECK(acc == doctest::Approx(std::pow(2.0, 8) / 8.0).epsilon(1e-13));
}

TEST_CASE("sphere quadrature: normalization and isotropy moments") {
  const SphereQuadrature q = build_sphere_quadrature(16);
  double wsum = 0, xx = 0, yy = 0, zz = 0, xy = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    wsum += q.weights[i];
    const auto& n = q.nodes[i];
    xx += q.weights[i] * n.x * n.x;
    yy += q.weights[i] * n.y * n.y;
    zz += q.weights[i] * n.z * n.z;
    xy += q.weights[i] * n.x * n.y;
    CHECK(std::abs(n.x * n.x + n.y * n.y + n.z * n.z - 1.0) < 1e-14);
    CHECK(q.weights[i] > 0.0);
  }
  CHECK(std::abs(wsum - 1.0) < 1e-12);
  CHECK(std::abs(xx - 1.0 / 3.0) < 1e-12);
  CHECK(std::abs(yy - 1.0 / 3.0) < 1e-12);
  CHECK(std::abs(zz - 1.0 / 3.0) < 1e-12);
  CHECK(std::abs(xy) < 1e-14);
}

TEST_CASE("sphere quadrature: spherical-harmonic orthogonality") {
  const SphereQuadrature q = build_sphere_quadrature(16);
  double acc = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double c = q.nodes[i].z;
    const double y10 = std::sqrt(3.0 / (4.0 * std::numbers::pi)) * c;
    const double y20 = std::sqrt(5.0 / (16.0 * std::numbers::pi)) * (3.0 * c * c - 1.0);
    acc += q.weights[i] * y10 * y20;
  }
  CHECK(std::abs(acc) < 1e-12);
}

TEST_CASE("node set is closed under the three axis reflections") {
  const SphereQuadrature q = build_sphere_quadrature(8, 10);
  auto contains = [&](double x, double y, double z) {
    for (const auto& n : q.nodes)
      if (std::abs(n.x - x) < 1e-12 && std::abs(n.y - y) < 1e-12 && std::abs(n.z - z) < 1e-12)
        return true;
    return false;
  };
  for (const auto& n : q.nodes) {
    CHECK(contains(-n.x, n.y, n.z));
    CHECK(contains(n.x, -n.y, n.z));
    CHECK(contains(n.x, n.y, -n.z));
  }
}

TEST_CASE("pv: constant numerator vanishes by antisymmetry") {
  CHECK(std::abs(pv_integrate([](double) { return 1.0; }, 1.0, 0.0, 2.0)) < 1e-13);
}

TEST_CASE("pv: x/(x-1) over (0,2) equals 2") {
  CHECK(pv_integrate([](double x) { return x; }, 1.0, 0.0, 2.0) ==
        doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("pv: exp(-x) against the shrinking-excision oracle") {
  const double v = pv_integrate([](double x) { return std::exp(-x); }, 1.0, 0.0, 40.0);
  // symmetric excision, eps -> 0 limit via two epsilons and Richardson in eps^2
  auto excised = [](double eps) {
    auto f = [](double x) { return std::exp(-x) / (x - 1.0); };
    double acc = 0.0;
    for (const auto& [a, b] : {std::pair{0.0, 1.0 - eps}, std::pair{1.0 + eps, 40.0}}) {
      const int panels = 64;
      for (int p = 0; p < panels; ++p) {
        const double t0 = a + (b - a) * p / panels;
        const double t1 = a + (b - a) * (p + 1) / panels;
        const GaussLegendre gl = gauss_legendre(24, t0, t1);
        for (int i = 0; i < 24; ++i) acc += gl.w[i] * f(gl.x[i]);
      }
    }
    return acc;
  };
  const double i1 = excised(1e-3), i2 = excised(5e-4);
  const double extrapolated = (4.0 * i2 - i1) / 3.0;
  CHECK(std::abs(v - extrapolated) < 1e-8);
}

TEST_CASE("pv: pole outside the interval is rejected") {
  CHECK_THROWS_AS(pv_integrate([](double) { return 1.0; }, 3.0, 0.0, 2.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_pv_grid(3.0, 0.0, 2.0, 32), std::invalid_argument);
}

TEST_CASE("pv grid reproduces pv_integrate") {
  auto f = [](double x) { return std::cos(x); };
  const double direct = pv_integrate(f, 1.0, 0.0, 4.0, 128);
  const PvGrid g = build_pv_grid(1.0, 0.0, 4.0, 256);
  double acc = g.log_term * f(1.0);
  for (std::size_t i = 0; i < g.x.size(); ++i)
    acc += g.w[i] * (f(g.x[i]) - f(1.0)) / (g.x[i] - 1.0);
  CHECK(std::abs(acc - direct) < 1e-10);
}
