#pragma once

// Mean N_e for a superposition or mixture of number states |psi_l> (all l
// atoms excited, no photons). S_A is conserved, so states of different l
// never interfere and the mean is the weighted sum of per-l curves; for a
// coherent state or a Poissonian mixture the weights are Poisson(nbar).

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "trilinear/parallel.hpp"
#include "trilinear/types.hpp"

namespace trilinear::ensemble {

enum class PerLMethod { closed_form, exact };

inline constexpr double kMaxTailMass = 1e-10;
inline constexpr double kMaxExactNbar = 300.0;

struct EnsembleSpec {
  double nbar = 0.0;
  /// Empty means Poisson(nbar). Otherwise l -> probability, summing to 1.
  std::map<int, double> custom_weights;
  PerLMethod per_l_method = PerLMethod::closed_form;
  double truncation_sigmas = 8.0;

  static EnsembleSpec poisson(double nbar,
                              PerLMethod method = PerLMethod::closed_form) {
    return {nbar, {}, method, 8.0};
  }
  static EnsembleSpec custom(std::map<int, double> weights,
                             PerLMethod method = PerLMethod::closed_form);
};

/// Weights for l = first_l, first_l + 1, ...; `tail_mass` is the
/// probability left outside the window.
struct WeightTable {
  int first_l = 0;
  std::vector<double> weights;
  double tail_mass = 0.0;

  double mean() const;
};

/// Poisson weights on [nbar - s sqrt(nbar), nbar + s sqrt(nbar)] or the
/// custom table. Throws NumericalError when the tail mass reaches
/// kMaxTailMass and DomainError for invalid custom weights; nothing is
/// silently renormalized.
WeightTable build_weights(const EnsembleSpec& spec);

/// Weighted sum of per-l curves. Per-l closed-form curves need l >=
/// closed_form::kMinAtoms; lower l fall back to the exact oracle. With
/// exact per-l curves the mixture variance is filled in as well.
Trajectory ensemble_mean(const EnsembleSpec& spec, std::span<const double> tau,
                         Execution exec = Execution::parallel);

struct Revival {
  double tau_center = 0.0;
  /// Topographic prominence of the envelope of |N - baseline|.
  double prominence = 0.0;
  /// Envelope value at the peak, i.e. the excursion from the baseline.
  double height = 0.0;
};

struct RevivalOptions {
  /// Minimum prominence as a fraction of nbar (taken as mean_ne at tau = 0).
  double threshold_fraction = 0.03;
  /// Half-width of the sliding maximum that turns |N - baseline| into an
  /// envelope. Defaults to ln(8 nbar) / sqrt(nbar + 2), one dip period.
  std::optional<double> window;
};

/// Interior peaks of the envelope of |N - baseline|, sorted by tau.
std::vector<Revival> detect_revivals(const Trajectory& traj, double baseline,
                                     const RevivalOptions& opts = {});

struct RevivalCriterion {
  double t_revival_numeric = 0.0;
  double t_revival_formula = 0.0;
  long r = 0;
  /// |T_a - T_b| in periods of the l = nbar curve.
  double phase_mismatch = 0.0;
};

/// Solves  omega_a T - K_a = 2 r K_a  and  omega_b T - K_b = 2 (r + 1) K_b
/// for integer r, with exact parameters for l = nbar (a) and l = nbar + 1
/// (b), and reports T beside the leading-order formula. Only nbar enters;
/// the weights of the mixture do not. Requires integer nbar >= 10.
RevivalCriterion revival_criterion_check(double nbar,
                                         double phase_tolerance = 0.1);

/// Mean of the piecewise-linear interpolant of `values` over [t0, t1].
double time_average(std::span<const double> tau, std::span<const double> values,
                    double t0, double t1);

}  // namespace trilinear::ensemble
