#include "trilinear/closed_form.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "trilinear/elliptic.hpp"
#include "trilinear/errors.hpp"

namespace trilinear::closed_form {
namespace {

struct Coefficients {
  double n, a, b, c;
};

Coefficients number_state(double n) {
  return {n, 4.0 * n + 1.0, n * n, 2.0 * n * n - n};
}

// Raw conditions E1, E2 and their Jacobian in (m, W = omega^2).
struct System {
  double e1, e2;
  double d1_dm, d1_dw, d2_dm, d2_dw;
};

System evaluate(const Coefficients& k, double m, double w) {
  const double g = 5.0 * (6.0 * k.n - k.a);  // 5 [6 N(0) - A]
  const double mm1 = m * (m - 1.0);
  const double two_m1 = 2.0 * m - 1.0;
  const double bracket = g - 2.0 * w * two_m1;
  const double const1 = -120.0 * k.n * k.n * k.n + 60.0 * k.a * k.n * k.n +
                        8.0 * k.a * k.b + 6.0 * k.c +
                        4.0 * k.n * (3.0 - 2.0 * k.a * k.a - 6.0 * k.b);
  const double h = k.a - 6.0 * k.n;
  const double const2 = 180.0 * k.n * k.n - 60.0 * k.a * k.n - 6.0 +
                        4.0 * k.a * k.a + 12.0 * k.b;

  System s{};
  s.e1 = w * w * mm1 * bracket + const1;
  s.e2 = w * w * (4.0 + 19.0 * mm1) + 10.0 * w * two_m1 * h + const2;
  s.d1_dm = w * w * (two_m1 * bracket - 4.0 * w * mm1);
  s.d1_dw = 2.0 * w * mm1 * bracket - 2.0 * w * w * mm1 * two_m1;
  s.d2_dm = 19.0 * w * w * two_m1 + 20.0 * w * h;
  s.d2_dw = 2.0 * w * (4.0 + 19.0 * mm1) + 10.0 * two_m1 * h;
  return s;
}

double normalized_norm(const System& s, double w) {
  return std::hypot(s.e1 / (w * w), s.e2 / (w * w));
}

bool admissible(double m, double w) { return m > 0.0 && m < 1.0 && w > 0.0; }

struct NewtonResult {
  double m, w;
  int iterations;
  bool converged;
};

NewtonResult newton(const Coefficients& k, double m, double w) {
  constexpr int kMaxIter = 100;
  constexpr double kTarget = 1e-13;
  System s = evaluate(k, m, w);
  double norm = normalized_norm(s, w);
  for (int it = 0; it < kMaxIter; ++it) {
    if (norm < kTarget) return {m, w, it, true};
    const double det = s.d1_dm * s.d2_dw - s.d1_dw * s.d2_dm;
    if (det == 0.0 || !std::isfinite(det)) return {m, w, it, false};
    const double dm = -(s.e1 * s.d2_dw - s.e2 * s.d1_dw) / det;
    const double dw = -(s.d1_dm * s.e2 - s.d2_dm * s.e1) / det;

    double lambda = 1.0;
    bool improved = false;
    for (int half = 0; half < 40; ++half, lambda *= 0.5) {
      const double mt = m + lambda * dm;
      const double wt = w + lambda * dw;
      if (!admissible(mt, wt)) continue;
      const System st = evaluate(k, mt, wt);
      const double nt = normalized_norm(st, wt);
      if (nt < norm) {
        m = mt;
        w = wt;
        s = st;
        norm = nt;
        improved = true;
        break;
      }
    }
    if (!improved) return {m, w, it, norm < 1e-9};
  }
  return {m, w, kMaxIter, norm < 1e-9};
}

}  // namespace

double ParamResiduals::max_abs() const {
  return std::max(std::abs(first), std::abs(second));
}

ParamResiduals parameter_residuals(double n, double m, double omega_sq) {
  const System s = evaluate(number_state(n), m, omega_sq);
  const double w2 = omega_sq * omega_sq;
  return {s.e1 / w2, s.e2 / w2};
}

EllipticParams solve_elliptic_params(int n) {
  if (n < kMinAtoms) {
    std::ostringstream msg;
    msg << "closed form needs n >= " << kMinAtoms << " (got " << n
        << "); use the exact oracle";
    throw DomainError("closedform", msg.str());
  }
  const double nd = static_cast<double>(n);
  const Coefficients k = number_state(nd);

  EllipticParams out;
  out.n = n;
  NewtonResult r = newton(k, 1.0 - 2.0 / nd, nd + 2.0);
  if (!r.converged) {
    // Fallback: log-spaced scan over 1 - m and omega^2 around the branch.
    double best = std::numeric_limits<double>::infinity();
    double bm = 0.0;
    double bw = 0.0;
    constexpr int kSteps = 80;
    for (int i = 0; i < kSteps; ++i) {
      const double one_minus_m = std::pow(10.0, -8.0 + 8.0 * i / (kSteps - 1.0));
      const double m = 1.0 - one_minus_m;
      if (!admissible(m, 1.0)) continue;
      for (int j = 0; j < kSteps; ++j) {
        const double w = (nd + 2.0) * std::pow(10.0, -1.0 + 2.0 * j / (kSteps - 1.0));
        const double val = normalized_norm(evaluate(k, m, w), w);
        if (val < best) {
          best = val;
          bm = m;
          bw = w;
        }
      }
    }
    r = newton(k, bm, bw);
    out.branch = "grid_scan";
  }

  out.m = r.m;
  out.omega = std::sqrt(r.w);
  out.newton_iterations = r.iterations;
  out.residuals = parameter_residuals(nd, r.m, r.w);
  if (!r.converged || !admissible(r.m, r.w) || out.residuals.max_abs() >= 1e-9) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "parameter solve failed for n = " << n << ": last iterate m = " << r.m
        << ", omega^2 = " << r.w << ", residuals = (" << out.residuals.first
        << ", " << out.residuals.second << ")";
    throw NumericalError("closedform", msg.str());
  }
  out.k_complete = elliptic::complete_elliptic_k(out.m);
  return out;
}

Trajectory closed_form_mean(const EllipticParams& params,
                            std::span<const double> tau) {
  require_ascending(tau, "closedform");
  Trajectory traj;
  traj.method = Method::closed_form;
  traj.tau.assign(tau.begin(), tau.end());
  traj.mean_ne.resize(tau.size());
  traj.charges = ConservedCharges::number_state(params.n);
  const double n = params.n;
  const double depth = params.dip_depth();
  for (std::size_t i = 0; i < tau.size(); ++i) {
    const double z = params.omega * tau[i] - params.k_complete;
    const double cn = elliptic::jacobi_cn_sn_dn(z, params.m).cn;
    traj.mean_ne[i] = n - depth * cn * cn;
  }
  return traj;
}

std::vector<double> closed_form_variance(const EllipticParams& params,
                                         const ConservedCharges& charges,
                                         std::span<const double> tau) {
  require_ascending(tau, "closedform");
  const double n = params.n;
  const double depth = params.dip_depth();
  const double w2 = params.omega * params.omega;
  const double floor = -0.05 * n * n;
  std::vector<double> var(tau.size());
  for (std::size_t i = 0; i < tau.size(); ++i) {
    const double z = params.omega * tau[i] - params.k_complete;
    const auto f = elliptic::cn_squared_derivatives(z, params.m);
    const double mean = n - depth * f.f;
    const double mean_dd = -depth * w2 * f.d2f;
    var[i] = (mean_dd - 6.0 * mean * mean + 2.0 * charges.a_bar * mean -
              2.0 * charges.b_bar) /
             6.0;
    if (var[i] < floor) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "Delta_e^2 = " << var[i] << " at tau = " << tau[i]
          << " below -0.05 n^2; parameter solve is suspect";
      throw NumericalError("closedform", msg.str());
    }
  }
  return var;
}

Trajectory closed_form_trajectory(const EllipticParams& params,
                                  std::span<const double> tau) {
  Trajectory traj = closed_form_mean(params, tau);
  traj.variance_ne = closed_form_variance(params, *traj.charges, tau);
  return traj;
}

RevivalPrediction predict_times(double nbar, int max_fraction) {
  const double log8n = std::log(8.0 * nbar);
  if (!(log8n > 2.0)) {
    throw DomainError("closedform", "revival formulas need ln(8 nbar) > 2");
  }
  if (nbar < kMinAtoms) {
    throw DomainError("closedform", "revival formulas need nbar >= 4");
  }
  RevivalPrediction p;
  p.nbar = nbar;
  p.t_period = log8n / std::sqrt(nbar + 2.0);
  p.t_revival = 2.0 * std::sqrt(nbar) * log8n * log8n / (log8n - 2.0);
  for (int r = 2; r <= max_fraction; ++r) p.fractional[r] = p.t_revival / r;
  p.plateau = nbar * (1.0 - 1.0 / log8n);
  const auto nearest = static_cast<int>(std::lround(nbar));
  if (nearest >= kMinAtoms) {
    p.t_period_exact = solve_elliptic_params(nearest).period();
  }
  return p;
}

}  // namespace trilinear::closed_form
