#pragma once

// Adaptive Dormand-Prince 5(4) integrator for small fixed-size systems.
//
// Output points are hit exactly: a step that would overshoot the next grid
// point is shortened to land on it, so no interpolant is involved. On a
// uniform grid finer than the natural step this makes the output a smooth
// function of tau, which the high-order finite differences downstream need.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <utility>
#include <initializer_list>

#include "trilinear/errors.hpp"

namespace trilinear {

template <std::size_t N>
using OdeState = std::array<double, N>;

struct OdeOptions {
  double rtol = 1e-9;
  double atol = 1e-9;
  std::size_t max_steps = 50'000'000;
};

struct OdeStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

namespace dopri5 {
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                        a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// fifth-order minus embedded fourth-order weights
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
}  // namespace dopri5

/// Integrates y' = rhs(t, y) from grid[0] with y(grid[0]) = y0 and calls
/// observe(i, y) at every grid point, starting with i = 0. `observe` may
/// throw to abort. Throws NumericalError on step-size underflow or when
/// max_steps is exhausted; the message carries the last good tau.
template <std::size_t N, class Rhs, class Observer>
OdeStats integrate_dopri5(Rhs&& rhs, OdeState<N> y, std::span<const double> grid,
                          const OdeOptions& opts, Observer&& observe) {
  using namespace dopri5;
  using State = OdeState<N>;
  OdeStats stats;
  if (grid.empty()) return stats;

  const auto axpy = [](const State& base, double h,
                       std::initializer_list<std::pair<double, const State*>> terms) {
    State out = base;
    for (const auto& [coef, k] : terms) {
      if (coef == 0.0) continue;
      for (std::size_t i = 0; i < N; ++i) out[i] += h * coef * (*k)[i];
    }
    return out;
  };
  const auto fail = [](const char* what, double t) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << " (last good tau = " << t << ")";
    throw NumericalError("moments", msg.str());
  };

  double t = grid[0];
  observe(std::size_t{0}, std::as_const(y));
  if (grid.size() == 1) return stats;

  State k1 = rhs(t, y);
  double h = 0.0;
  {
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = opts.atol + opts.rtol * std::abs(y[i]);
      d0 += (y[i] / sc) * (y[i] / sc);
      d1 += (k1[i] / sc) * (k1[i] / sc);
    }
    d0 = std::sqrt(d0 / N);
    d1 = std::sqrt(d1 / N);
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  }

  std::size_t steps = 0;
  for (std::size_t target = 1; target < grid.size(); ++target) {
    const double t_end = grid[target];
    while (t < t_end) {
      if (++steps > opts.max_steps) fail("step budget exhausted", t);
      const double remaining = t_end - t;
      const bool landing = h >= remaining * (1.0 - 1e-12);
      const double step = landing ? remaining : h;
      if (step <= 1e-14 * std::max(1.0, std::abs(t))) fail("step size underflow", t);

      const State k2 = rhs(t + c2 * step, axpy(y, step, {{a21, &k1}}));
      const State k3 = rhs(t + c3 * step, axpy(y, step, {{a31, &k1}, {a32, &k2}}));
      const State k4 = rhs(t + c4 * step,
                           axpy(y, step, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
      const State k5 = rhs(t + c5 * step, axpy(y, step,
                                                {{a51, &k1}, {a52, &k2},
                                                 {a53, &k3}, {a54, &k4}}));
      const State k6 = rhs(t + step, axpy(y, step,
                                          {{a61, &k1}, {a62, &k2}, {a63, &k3},
                                           {a64, &k4}, {a65, &k5}}));
      const State y_new = axpy(y, step, {{a71, &k1}, {a73, &k3}, {a74, &k4},
                                         {a75, &k5}, {a76, &k6}});
      const double t_new = landing ? t_end : t + step;
      const State k7 = rhs(t_new, y_new);

      double err = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double e = step * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                                 e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double sc =
            opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
        err += (e / sc) * (e / sc);
      }
      err = std::sqrt(err / N);
      if (!std::isfinite(err)) {
        h = 0.25 * step;
        ++stats.rejected;
        continue;
      }

      const double factor =
          std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
      if (err <= 1.0) {
        y = y_new;
        k1 = k7;
        t = t_new;
        ++stats.accepted;
        // A shortened landing step says little about the natural step size.
        h = landing ? std::max(h, step * factor) : step * factor;
      } else {
        h = step * std::min(factor, 1.0);
        ++stats.rejected;
      }
    }
    observe(target, std::as_const(y));
  }
  return stats;
}

}  // namespace trilinear
