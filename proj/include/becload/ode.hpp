#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <utility>
#include <vector>

namespace becload {

// Adaptive Dormand-Prince RK5(4) on complex state vectors.
struct OdeControl {
  double rtol = 1e-10;
  double atol = 1e-13;
  double h_init = 1e-3;
  double h_min = 1e-14;
  std::size_t max_steps = 50'000'000;
};

using OdeRhs =
    std::function<void(double, const std::vector<std::complex<double>>&,
                       std::vector<std::complex<double>>&)>;

class DormandPrince {
public:
  DormandPrince(OdeRhs rhs, OdeControl ctl) : rhs_(std::move(rhs)), ctl_(ctl) {}

  // advance y from t to t_end; calls observe(t, y) after each accepted step
  // when provided (may stop integration early by returning false)
  template <typename Observer>
  double integrate(std::vector<std::complex<double>>& y, double t, double t_end,
                   Observer&& observe) {
    double h = std::min(ctl_.h_init, t_end - t);
    std::size_t steps = 0;
    std::vector<std::complex<double>> k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()),
        k5(y.size()), k6(y.size()), k7(y.size()), ytmp(y.size()), y5(y.size()), err(y.size());
    rhs_(t, y, k1);
    while (t < t_end) {
      if (++steps > ctl_.max_steps) throw std::runtime_error("ode: step limit exceeded");
      if (t + h > t_end) h = t_end - t;

      auto stage = [&](std::vector<std::complex<double>>& out, double c,
                       std::initializer_list<std::pair<const std::vector<std::complex<double>>*,
                                                       double>>
                           terms) {
        for (std::size_t i = 0; i < y.size(); ++i) {
          std::complex<double> acc = y[i];
          for (const auto& [v, a] : terms) acc += h * a * (*v)[i];
          ytmp[i] = acc;
        }
        rhs_(t + c * h, ytmp, out);
      };

      stage(k2, 1.0 / 5, {{&k1, 1.0 / 5}});
      stage(k3, 3.0 / 10, {{&k1, 3.0 / 40}, {&k2, 9.0 / 40}});
      stage(k4, 4.0 / 5, {{&k1, 44.0 / 45}, {&k2, -56.0 / 15}, {&k3, 32.0 / 9}});
      stage(k5, 8.0 / 9,
            {{&k1, 19372.0 / 6561}, {&k2, -25360.0 / 2187}, {&k3, 64448.0 / 6561},
             {&k4, -212.0 / 729}});
      stage(k6, 1.0,
            {{&k1, 9017.0 / 3168}, {&k2, -355.0 / 33}, {&k3, 46732.0 / 5247},
             {&k4, 49.0 / 176}, {&k5, -5103.0 / 18656}});
      for (std::size_t i = 0; i < y.size(); ++i)
        y5[i] = y[i] + h * (35.0 / 384 * k1[i] + 500.0 / 1113 * k3[i] + 125.0 / 192 * k4[i] -
                            2187.0 / 6784 * k5[i] + 11.0 / 84 * k6[i]);
      rhs_(t + h, y5, k7);

      double err_norm = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) {
        const std::complex<double> e =
            h * (71.0 / 57600 * k1[i] - 71.0 / 16695 * k3[i] + 71.0 / 1920 * k4[i] -
                 17253.0 / 339200 * k5[i] + 22.0 / 525 * k6[i] - 1.0 / 40 * k7[i]);
        const double sc = ctl_.atol + ctl_.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
        const double r = std::abs(e) / sc;
        err_norm = std::max(err_norm, r);
      }

      if (err_norm <= 1.0) {
        t += h;
        y.swap(y5);
        k1.swap(k7);  // FSAL
        if (!observe(t, y)) return t;
      }
      const double fac =
          std::clamp(0.9 * std::pow(err_norm > 0 ? err_norm : 1e-16, -0.2), 0.2, 5.0);
      h *= fac;
      if (h < ctl_.h_min) throw std::runtime_error("ode: step size underflow");
    }
    return t;
  }

private:
  OdeRhs rhs_;
  OdeControl ctl_;
};

// Fixed-step classical RK4 (used for short refinement segments).
inline void rk4_advance(const OdeRhs& rhs, std::vector<std::complex<double>>& y, double t0,
                        double dt, int n_steps) {
  const double h = dt / n_steps;
  std::vector<std::complex<double>> k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()),
      tmp(y.size());
  double t = t0;
  for (int s = 0; s < n_steps; ++s) {
    rhs(t, y, k1);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    rhs(t + 0.5 * h, tmp, k2);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    rhs(t + 0.5 * h, tmp, k3);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + h * k3[i];
    rhs(t + h, tmp, k4);
    for (std::size_t i = 0; i < y.size(); ++i)
      y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    t += h;
  }
}

}  // namespace becload
