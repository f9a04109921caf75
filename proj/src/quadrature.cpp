#include "becload/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace becload {

GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  GaussLegendre gl;
  gl.x.resize(n);
  gl.w.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Newton iteration from the Chebyshev-like initial guess
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double p1 = 0, p2 = 0;
    for (int it = 0; it < 100; ++it) {
      p1 = 1.0;
      p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * x * p2 - j * p3) / (j + 1.0);
      }
      const double dp = n * (x * p1 - p2) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    p1 = 1.0;
    p2 = 0.0;
    for (int j = 0; j < n; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j + 1.0) * x * p2 - j * p3) / (j + 1.0);
    }
    const double dp = n * (x * p1 - p2) / (x * x - 1.0);
    gl.x[i] = -x;
    gl.x[n - 1 - i] = x;
    gl.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    gl.w[n - 1 - i] = gl.w[i];
  }
  return gl;
}

GaussLegendre gauss_legendre(int n, double a, double b) {
  GaussLegendre gl = gauss_legendre(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    gl.x[i] = mid + half * gl.x[i];
    gl.w[i] *= half;
  }
  return gl;
}

SphereQuadrature build_sphere_quadrature(int theta_order, int phi_order) {
  if (theta_order < 1 || phi_order < 1)
    throw std::invalid_argument("sphere quadrature order must be >= 1");
  if (phi_order % 2 != 0) ++phi_order;  // reflection symmetry needs an even count
  const GaussLegendre gl = gauss_legendre(theta_order);
  SphereQuadrature q;
  q.nodes.reserve(static_cast<std::size_t>(theta_order) * phi_order);
  q.weights.reserve(q.nodes.capacity());
  for (int i = 0; i < theta_order; ++i) {
    const double ct = gl.x[i];
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    const double wt = gl.w[i] / 2.0 / phi_order;  // normalizes sum(w) to 1
    for (int j = 0; j < phi_order; ++j) {
      const double phi = 2.0 * std::numbers::pi * j / phi_order;
      q.nodes.push_back(Vec3{st * std::cos(phi), st * std::sin(phi), ct});
      q.weights.push_back(wt);
    }
  }
  return q;
}

SphereQuadrature build_sphere_quadrature(int order) {
  return build_sphere_quadrature(order, order);
}

double pv_integrate(const std::function<double(double)>& f, double pole, double lower,
                    double upper, int points_per_panel) {
  if (!(lower < pole && pole < upper))
    throw std::invalid_argument("pv_integrate: pole must lie strictly inside (lower, upper)");
  const double fp = f(pole);
  double acc = fp * std::log((upper - pole) / (pole - lower));
  for (const auto& [a, b] : {std::pair{lower, pole}, std::pair{pole, upper}}) {
    const GaussLegendre gl = gauss_legendre(points_per_panel, a, b);
    for (int i = 0; i < points_per_panel; ++i)
      acc += gl.w[i] * (f(gl.x[i]) - fp) / (gl.x[i] - pole);
  }
  return acc;
}

PvGrid build_pv_grid(double pole, double lower, double upper, int total_points) {
  if (!(lower < pole && pole < upper))
    throw std::invalid_argument("build_pv_grid: pole must lie strictly inside (lower, upper)");
  if (total_points < 4) throw std::invalid_argument("build_pv_grid: need at least 4 points");
  PvGrid g;
  g.pole = pole;
  g.log_term = std::log((upper - pole) / (pole - lower));
  const int half = total_points / 2;
  for (const auto& [a, b, n] :
       {std::tuple{lower, pole, half}, std::tuple{pole, upper, total_points - half}}) {
    const GaussLegendre gl = gauss_legendre(n, a, b);
    g.x.insert(g.x.end(), gl.x.begin(), gl.x.end());
    g.w.insert(g.w.end(), gl.w.begin(), gl.w.end());
  }
  return g;
}

}  // namespace becload
