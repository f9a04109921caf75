#pragma once

// Test-only reference oracles, independent of the library's evaluation paths.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace testsupport {

using cplx = std::complex<double>;

struct GaussHermite {
  std::vector<double> x;
  std::vector<double> w;  // weights for integral of f(x) * exp(-x^2)
};

// Golub-Welsch-free construction via Newton iteration on the Hermite
// recurrence; adequate for the moderate orders used in tests.
inline GaussHermite gauss_hermite(int n) {
  GaussHermite gh;
  gh.x.resize(n);
  gh.w.resize(n);
  const double pim4 = 0.7511255444649425;  // pi^{-1/4}
  double z = 0.0;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    else if (i == 1)
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * gh.x[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * gh.x[1];
    else
      z = 2.0 * z - gh.x[i - 2];
    double pp = 0.0;
    for (int it = 0; it < 200; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    gh.x[i] = z;
    gh.x[n - 1 - i] = -z;
    gh.w[i] = 2.0 / (pp * pp);
    gh.w[n - 1 - i] = gh.w[i];
  }
  return gh;
}

// normalized oscillator eigenfunction psi_n(x) for X = (a + a^dag)/sqrt(2)
inline double hermite_function(int n, double x) {
  // stable upward recurrence on h_k = H_k(x) e^{-x^2/2} / sqrt(2^k k! sqrt(pi))
  double h0 = std::exp(-0.5 * x * x) / std::pow(std::numbers::pi, 0.25);
  if (n == 0) return h0;
  double h1 = std::sqrt(2.0) * x * h0;
  for (int k = 1; k < n; ++k) {
    const double h2 = std::sqrt(2.0 / (k + 1.0)) * x * h1 - std::sqrt(k / (k + 1.0)) * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

// <m| exp(i k X) |l> via Gauss-Hermite quadrature over the product of
// eigenfunctions (weight e^{-x^2} is factored out of the integrand).
inline cplx fc_1d_quadrature(int l, int m, double kick, int order = 128) {
  const GaussHermite gh = gauss_hermite(order);
  cplx acc(0.0, 0.0);
  for (int i = 0; i < order; ++i) {
    const double x = gh.x[i];
    const double f = hermite_function(m, x) * hermite_function(l, x) * std::exp(x * x);
    acc += gh.w[i] * f * std::exp(cplx(0.0, kick * x));
  }
  return acc;
}

// adaptive Simpson on [a, b]
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-11, int depth = 30) {
  std::function<double(double, double, double, double, double, double, double, int)> rec =
      [&](double lo, double hi, double flo, double fmid, double fhi, double whole, double eps,
          int d) -> double {
    const double mid = 0.5 * (lo + hi);
    const double lmid = 0.5 * (lo + mid), rmid = 0.5 * (mid + hi);
    const double flm = f(lmid), frm = f(rmid);
    const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
    const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
    if (d <= 0 || std::abs(left + right - whole) < 15.0 * eps)
      return left + right + (left + right - whole) / 15.0;
    return rec(lo, mid, flo, flm, fmid, left, eps / 2.0, d - 1) +
           rec(mid, hi, fmid, frm, fhi, right, eps / 2.0, d - 1);
  };
  const double mid = 0.5 * (a + b);
  const double fa = f(a), fm = f(mid), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return rec(a, b, fa, fm, fb, whole, tol, depth);
}

}  // namespace testsupport
