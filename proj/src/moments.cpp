#include "trilinear/moments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "trilinear/errors.hpp"

namespace trilinear::moments {

double mean_second_derivative(const ConservedCharges& q, double mean, double var) {
  return 6.0 * (var + mean * mean) - 2.0 * q.a_bar * mean + 2.0 * q.b_bar;
}

MomentState asymmetry_rhs(const ConservedCharges& q, const MomentState& s) {
  const double n = s.mean;
  const double v = s.var;
  const double n_dd = mean_second_derivative(q, n, v);
  // (N^2)'' expanded with N'' substituted, so the system stays first order.
  const double n2_dd = 2.0 * s.mean_dot * s.mean_dot + 2.0 * n * n_dd;
  const double v_dd = 20.0 * n * n * n + 60.0 * v * n - 8.0 * q.a_bar * (v + n * n) +
                      4.0 * (1.0 + 3.0 * q.b_bar) * n + 2.0 * q.c_bar - n2_dd;
  return {s.mean_dot, n_dd, s.var_dot, v_dd};
}

double quartic_rhs(const ConservedCharges& q, double n, double n_dd) {
  const double a = q.a_bar;
  const double b = q.b_bar;
  return -10.0 * a * n_dd + 60.0 * n * n_dd - 240.0 * n * n * n +
         120.0 * a * n * n + n * (24.0 - 48.0 * b - 16.0 * a * a) +
         12.0 * q.c_bar + 16.0 * a * b;
}

double vanishing_variance_energy(const ConservedCharges& q, double mean,
                                 double mean_dot) {
  return mean_dot * mean_dot - 4.0 * mean * mean * mean +
         2.0 * q.a_bar * mean * mean - 4.0 * q.b_bar * mean;
}

namespace {

struct Guards {
  double lo;
  double hi;
  double var_floor;
};

Guards make_guards(const ConservedCharges& q, const ClosureOptions& opts) {
  const double scale = std::max(q.s_a, 1.0);
  return {-opts.mean_band * scale, (1.0 + opts.mean_band) * scale,
          -(opts.negative_variance_abort * scale * scale + opts.negative_variance_floor)};
}

[[noreturn]] void leave_regime(const char* what, double tau, double value) {
  std::ostringstream msg;
  msg.precision(17);
  msg << what << " = " << value << " at tau = " << tau
      << "; closure left its validity regime";
  throw NumericalError("moments", msg.str());
}

void check_mean(const Guards& g, double tau, double mean) {
  if (!(mean >= g.lo && mean <= g.hi)) leave_regime("mean N_e", tau, mean);
}

double checked_variance(const Guards& g, double tau, double var) {
  if (!(var >= g.var_floor)) leave_regime("Delta_e^2", tau, var);
  return std::max(var, 0.0);
}

Trajectory start(Method method, const ConservedCharges& q,
                 std::span<const double> tau) {
  require_ascending(tau, "moments");
  Trajectory traj;
  traj.method = method;
  traj.tau.assign(tau.begin(), tau.end());
  traj.mean_ne.resize(tau.size());
  traj.variance_ne.resize(tau.size());
  traj.charges = q;
  return traj;
}

}  // namespace

Trajectory vanishing_variance_trajectory(const ConservedCharges& q, double n0,
                                         std::span<const double> tau,
                                         const ClosureOptions& opts) {
  Trajectory traj = start(Method::vanishing_variance, q, tau);
  const Guards g = make_guards(q, opts);
  const auto rhs = [&q](double, const OdeState<2>& y) -> OdeState<2> {
    return {y[1], mean_second_derivative(q, y[0], 0.0)};
  };
  integrate_dopri5<2>(rhs, {n0, 0.0}, tau, opts.ode,
                      [&](std::size_t i, const OdeState<2>& y) {
                        check_mean(g, tau[i], y[0]);
                        traj.mean_ne[i] = y[0];
                        traj.variance_ne[i] = 0.0;
                      });
  return traj;
}

Trajectory vanishing_asymmetry_trajectory(const ConservedCharges& q, double n0,
                                          std::span<const double> tau,
                                          const ClosureOptions& opts) {
  Trajectory traj = start(Method::vanishing_asymmetry, q, tau);
  const Guards g = make_guards(q, opts);
  const auto rhs = [&q](double, const OdeState<4>& y) -> OdeState<4> {
    const MomentState d = asymmetry_rhs(q, {y[0], y[1], y[2], y[3]});
    return {d.mean, d.mean_dot, d.var, d.var_dot};
  };
  integrate_dopri5<4>(rhs, {n0, 0.0, 0.0, 0.0}, tau, opts.ode,
                      [&](std::size_t i, const OdeState<4>& y) {
                        check_mean(g, tau[i], y[0]);
                        traj.mean_ne[i] = y[0];
                        traj.variance_ne[i] = checked_variance(g, tau[i], y[2]);
                      });
  return traj;
}

Trajectory quartic_trajectory(const ConservedCharges& q, double n0,
                              std::span<const double> tau,
                              const ClosureOptions& opts) {
  Trajectory traj = start(Method::quartic, q, tau);
  const Guards g = make_guards(q, opts);
  const auto rhs = [&q](double, const OdeState<4>& y) -> OdeState<4> {
    return {y[1], y[2], y[3], quartic_rhs(q, y[0], y[2])};
  };
  const double n_dd0 = mean_second_derivative(q, n0, 0.0);
  integrate_dopri5<4>(rhs, {n0, 0.0, n_dd0, 0.0}, tau, opts.ode,
                      [&](std::size_t i, const OdeState<4>& y) {
                        check_mean(g, tau[i], y[0]);
                        traj.mean_ne[i] = y[0];
                        const double var = (y[2] - 6.0 * y[0] * y[0] +
                                            2.0 * q.a_bar * y[0] - 2.0 * q.b_bar) /
                                           6.0;
                        traj.variance_ne[i] = checked_variance(g, tau[i], var);
                      });
  return traj;
}

std::vector<double> quartic_residual(const Trajectory& traj,
                                     const ConservedCharges& q) {
  constexpr std::size_t kWidth = 9;
  constexpr std::array<double, kWidth> kD2 = {
      -1.0 / 560, 8.0 / 315, -1.0 / 5, 8.0 / 5, -205.0 / 72,
      8.0 / 5,    -1.0 / 5,  8.0 / 315, -1.0 / 560};
  constexpr std::array<double, kWidth> kD4 = {
      7.0 / 240, -2.0 / 5, 169.0 / 60, -122.0 / 15, 91.0 / 8,
      -122.0 / 15, 169.0 / 60, -2.0 / 5, 7.0 / 240};

  const auto& tau = traj.tau;
  const auto& n = traj.mean_ne;
  if (tau.size() < kWidth || n.size() != tau.size()) {
    throw DomainError("moments", "quartic residual needs at least 9 grid points");
  }
  const double h = (tau.back() - tau.front()) / static_cast<double>(tau.size() - 1);
  for (std::size_t i = 1; i < tau.size(); ++i) {
    if (std::abs((tau[i] - tau[i - 1]) - h) > 1e-6 * h) {
      throw DomainError("moments", "quartic residual needs a uniform grid");
    }
  }

  const double h2 = h * h;
  const double h4 = h2 * h2;
  std::vector<double> out(tau.size() - (kWidth - 1));
  for (std::size_t c = kWidth / 2; c + kWidth / 2 < tau.size(); ++c) {
    double d2 = 0.0;
    double d4 = 0.0;
    for (std::size_t j = 0; j < kWidth; ++j) {
      const double v = n[c + j - kWidth / 2] - n[c];  // weights sum to 0
      d2 += kD2[j] * v;
      d4 += kD4[j] * v;
    }
    d2 /= h2;
    d4 /= h4;
    out[c - kWidth / 2] = d4 - quartic_rhs(q, n[c], d2);
  }
  return out;
}

}  // namespace trilinear::moments
