#pragma once

// Number-state solution of the fourth-order moment equation,
//   N(tau) = n - (1/2) m omega^2 cn^2(omega tau - K(m) | m),
// with (m, omega) fixed by two polynomial conditions in m and omega^2 that
// make the cn^2 ansatz an exact solution.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trilinear/types.hpp"

namespace trilinear::closed_form {

/// Smallest atom number served by the closed form; below it the exact
/// oracle is the only route.
inline constexpr int kMinAtoms = 4;

/// Both parameter conditions divided by omega^4.
struct ParamResiduals {
  double first = 0.0;
  double second = 0.0;
  double max_abs() const;
};

struct EllipticParams {
  double m = 0.0;
  double omega = 0.0;
  double k_complete = 0.0;
  int n = 0;
  ParamResiduals residuals;
  int newton_iterations = 0;
  /// "asymptotic_seed" when Newton converged from (1 - 2/n, n + 2),
  /// "grid_scan" when the fallback scan supplied the starting point.
  std::string branch = "asymptotic_seed";

  /// Exact period 2 K(m) / omega of N(tau).
  double period() const { return 2.0 * k_complete / omega; }
  /// Depth of the dip, m omega^2 / 2.
  double dip_depth() const { return 0.5 * m * omega * omega; }
};

/// Conditions evaluated with number-state constants A = 4n + 1, B = n^2,
/// C = 2n^2 - n and N(0) = n, at parameter m and omega^2.
ParamResiduals parameter_residuals(double n, double m, double omega_sq);

/// Damped 2D Newton in (m, omega^2) seeded on the asymptotic branch, with a
/// log-spaced grid scan as fallback. Throws DomainError for n < kMinAtoms and
/// NumericalError (carrying the last iterate) when no root below 1e-9 is
/// found.
EllipticParams solve_elliptic_params(int n);

Trajectory closed_form_mean(const EllipticParams& params,
                            std::span<const double> tau);

/// Delta_e^2 from the first closure equation,
///   Delta^2 = [N'' - 6 N^2 + 2 A N - 2 B] / 6,
/// with N'' taken analytically. Throws NumericalError if Delta^2 < -0.05 n^2.
std::vector<double> closed_form_variance(const EllipticParams& params,
                                         const ConservedCharges& charges,
                                         std::span<const double> tau);

/// closed_form_mean with the variance channel filled in.
Trajectory closed_form_trajectory(const EllipticParams& params,
                                  std::span<const double> tau);

struct RevivalPrediction {
  double nbar = 0.0;
  /// ln(8 n) / sqrt(n + 2).
  double t_period = 0.0;
  /// 2 K(m) / omega for the nearest integer n, when it is >= kMinAtoms.
  std::optional<double> t_period_exact;
  /// 2 sqrt(n) ln^2(8 n) / (ln(8 n) - 2).
  double t_revival = 0.0;
  /// r -> t_revival / r for r = 2 .. max_fraction.
  std::map<int, double> fractional;
  /// n (1 - 1 / ln(8 n)).
  double plateau = 0.0;
};

/// All times in units of 1/Omega. Throws DomainError when ln(8 n) <= 2 or
/// n < kMinAtoms.
RevivalPrediction predict_times(double nbar, int max_fraction = 6);

}  // namespace trilinear::closed_form
