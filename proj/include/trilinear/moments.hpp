#pragma once

// Moment-closure dynamics for N_e.
//
// vanishing variance:  N'' = 6 N^2 - 2 A N + 2 B            (Delta = 0)
// vanishing asymmetry: N'' = 6 (V + N^2) - 2 A N + 2 B
//                      V'' = 20 N^3 + 60 V N - 8 A (V + N^2)
//                            + 4 (1 + 3 B) N + 2 C - (N^2)''
// with V = Delta_e^2 and (N^2)'' = 2 N'^2 + 2 N N''. Eliminating V gives the
// decoupled fourth-order equation
//   N'''' = -10 A N'' + 60 N N'' - 240 N^3 + 120 A N^2
//           + N (24 - 48 B - 16 A^2) + 12 C + 16 A B.
// A, B, C stand for the conserved expectation values a_bar, b_bar, c_bar.

#include <span>
#include <vector>

#include "trilinear/ode.hpp"
#include "trilinear/types.hpp"

namespace trilinear::moments {

struct MomentState {
  double mean = 0.0;
  double mean_dot = 0.0;
  double var = 0.0;
  double var_dot = 0.0;
};

struct ClosureOptions {
  /// The closure systems amplify local errors by several decades per period,
  /// hence tolerances well below the usual 1e-9.
  OdeOptions ode{1e-12, 1e-12};
  /// Abort when Delta_e^2 < -(negative_variance_abort * s_a^2 +
  /// negative_variance_floor); smaller negative values are clipped to 0 in
  /// the output. The asymmetry closure dips to Delta_e^2 = -1/6 near the
  /// maxima of N for every n, hence the n-independent floor.
  double negative_variance_abort = 1e-6;
  double negative_variance_floor = 0.5;
  /// Abort when N leaves [-band * s_a, (1 + band) * s_a].
  double mean_band = 0.05;
};

/// Right-hand sides, exposed for tests and diagnostics.
double mean_second_derivative(const ConservedCharges& q, double mean, double var);
MomentState asymmetry_rhs(const ConservedCharges& q, const MomentState& s);
double quartic_rhs(const ConservedCharges& q, double mean, double mean_dd);

/// First integral of the vanishing-variance equation,
/// N'^2 - 4 N^3 + 2 A N^2 - 4 B N. It is the scalar counterpart of the
/// exact operator identity for N'^2 without the ordering terms 2 N + C.
double vanishing_variance_energy(const ConservedCharges& q, double mean,
                                 double mean_dot);

/// N(0) = n0, N'(0) = 0. Variance channel is identically zero.
Trajectory vanishing_variance_trajectory(const ConservedCharges& q, double n0,
                                         std::span<const double> tau,
                                         const ClosureOptions& opts = {});

/// N(0) = n0, V(0) = 0, N'(0) = V'(0) = 0 (number state).
Trajectory vanishing_asymmetry_trajectory(const ConservedCharges& q, double n0,
                                          std::span<const double> tau,
                                          const ClosureOptions& opts = {});

/// The decoupled fourth-order equation with number-state data
/// N(0) = n0, N'(0) = N'''(0) = 0 and N''(0) from the first closure equation
/// at V = 0. Variance recovered algebraically from that equation.
Trajectory quartic_trajectory(const ConservedCharges& q, double n0,
                              std::span<const double> tau,
                              const ClosureOptions& opts = {});

/// Residual of the fourth-order equation along `traj.mean_ne`, with N'' and
/// N'''' from 9-point central differences (orders 8 and 6). The grid must be
/// uniform with at least 9 points; the result has one entry per interior
/// point, i.e. indices 4 .. size - 5 of the trajectory.
std::vector<double> quartic_residual(const Trajectory& traj,
                                     const ConservedCharges& q);

}  // namespace trilinear::moments
