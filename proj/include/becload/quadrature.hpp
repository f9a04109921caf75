#pragma once

#include <array>
#include <functional>
#include <vector>

namespace becload {

// Gauss-Legendre nodes/weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> x;
  std::vector<double> w;
};
GaussLegendre gauss_legendre(int n);

// Same rule mapped to [a, b].
GaussLegendre gauss_legendre(int n, double a, double b);

struct Vec3 {
  double x = 0, y = 0, z = 0;
};

// Quadrature for the normalized solid-angle integral: sum(w) = 1 and
// sum_w w f(Omega_w) ~ integral dOmega/(4 pi) f. Product rule,
// Gauss-Legendre in cos(theta) x uniform in phi; phi count is kept even so
// the node set is closed under the axis reflections Omega_u -> -Omega_u.
struct SphereQuadrature {
  std::vector<Vec3> nodes;     // unit vectors
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

SphereQuadrature build_sphere_quadrature(int order);                       // theta = phi = order
SphereQuadrature build_sphere_quadrature(int theta_order, int phi_order);

// PV integral of f(x)/(x - pole) over (lower, upper), computed as the smooth
// remainder integral of (f(x) - f(pole))/(x - pole) plus
// f(pole) * log((upper - pole)/(pole - lower)).
// pole outside (lower, upper) -> std::invalid_argument.
double pv_integrate(const std::function<double(double)>& f, double pole, double lower,
                    double upper, int points_per_panel = 96);

// Node/weight realization of the same construction for vectorized integrands:
// PV int f(x)/(x-pole) = sum_q w[q] * (f(x[q]) - f(pole)) / (x[q] - pole)
//                        + log_term * f(pole).
struct PvGrid {
  std::vector<double> x;
  std::vector<double> w;
  double pole = 0;
  double log_term = 0;
};
PvGrid build_pv_grid(double pole, double lower, double upper, int total_points);

}  // namespace becload
