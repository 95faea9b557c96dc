#include "trilinear/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <memory>
#include <sstream>
#include <variant>

#include "trilinear/closed_form.hpp"
#include "trilinear/elliptic.hpp"
#include "trilinear/errors.hpp"
#include "trilinear/fock_oracle.hpp"
#include "trilinear/summation.hpp"

namespace trilinear::ensemble {

EnsembleSpec EnsembleSpec::custom(std::map<int, double> weights,
                                  PerLMethod method) {
  EnsembleSpec spec;
  spec.custom_weights = std::move(weights);
  spec.per_l_method = method;
  double mean = 0.0;
  for (const auto& [l, w] : spec.custom_weights) mean += l * w;
  spec.nbar = mean;
  return spec;
}

double WeightTable::mean() const {
  CompensatedSum s;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    s.add(static_cast<double>(first_l + static_cast<int>(i)) * weights[i]);
  }
  return s.value();
}

namespace {

double log_poisson(double nbar, int l) {
  return l * std::log(nbar) - nbar - std::lgamma(l + 1.0);
}

WeightTable poisson_table(const EnsembleSpec& spec) {
  const double nbar = spec.nbar;
  if (!(nbar > 0.0) || !std::isfinite(nbar)) {
    throw DomainError("ensemble", "nbar must be positive");
  }
  const double half = spec.truncation_sigmas * std::sqrt(nbar);
  const int lo = std::max(0, static_cast<int>(std::floor(nbar - half)));
  const int hi = static_cast<int>(std::ceil(nbar + half));

  WeightTable table;
  table.first_l = lo;
  table.weights.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (int l = lo; l <= hi; ++l) table.weights.push_back(std::exp(log_poisson(nbar, l)));

  CompensatedSum tail;
  for (int l = 0; l < lo; ++l) tail.add(std::exp(log_poisson(nbar, l)));
  for (int l = hi + 1;; ++l) {
    const double w = std::exp(log_poisson(nbar, l));
    tail.add(w);
    if (w < 1e-30 && l > nbar) break;
  }
  table.tail_mass = tail.value();
  if (table.tail_mass >= kMaxTailMass) {
    std::ostringstream msg;
    msg << "Poisson tail mass " << table.tail_mass << " outside l in [" << lo
        << ", " << hi << "] exceeds " << kMaxTailMass
        << "; increase truncation_sigmas";
    throw NumericalError("ensemble", msg.str());
  }
  return table;
}

WeightTable custom_table(const EnsembleSpec& spec) {
  const auto& w = spec.custom_weights;
  const int lo = w.begin()->first;
  const int hi = w.rbegin()->first;
  if (lo < 0) throw DomainError("ensemble", "atom numbers must be nonnegative");
  WeightTable table;
  table.first_l = lo;
  table.weights.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
  CompensatedSum total;
  for (const auto& [l, p] : w) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw DomainError("ensemble", "weights must be nonnegative probabilities");
    }
    table.weights[static_cast<std::size_t>(l - lo)] = p;
    total.add(p);
  }
  if (std::abs(total.value() - 1.0) > kMaxTailMass) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "custom weights sum to " << total.value() << ", not 1";
    throw DomainError("ensemble", msg.str());
  }
  return table;
}

// One per-l curve source: closed form, exact chain, or the empty system.
using CurveSource = std::variant<std::monostate, closed_form::EllipticParams,
                                 std::shared_ptr<const fock::ExactPropagator>>;

CurveSource make_source(int l, PerLMethod method) {
  if (l == 0) return std::monostate{};
  if (method == PerLMethod::closed_form && l >= closed_form::kMinAtoms) {
    return closed_form::solve_elliptic_params(l);
  }
  return std::make_shared<const fock::ExactPropagator>(SystemSpec::number_state(l));
}

struct Curve {
  std::vector<double> mean;
  std::vector<double> second_moment;  // exact sources only
};

Curve evaluate(const CurveSource& src, std::span<const double> tau,
               bool want_second) {
  Curve c;
  c.mean.assign(tau.size(), 0.0);
  if (want_second) c.second_moment.assign(tau.size(), 0.0);
  if (const auto* p = std::get_if<closed_form::EllipticParams>(&src)) {
    const double n = p->n;
    const double depth = p->dip_depth();
    for (std::size_t i = 0; i < tau.size(); ++i) {
      const double cn =
          elliptic::jacobi_cn_sn_dn(p->omega * tau[i] - p->k_complete, p->m).cn;
      c.mean[i] = n - depth * cn * cn;
    }
  } else if (const auto* e =
                 std::get_if<std::shared_ptr<const fock::ExactPropagator>>(&src)) {
    for (std::size_t i = 0; i < tau.size(); ++i) {
      const auto obs = (*e)->observables(tau[i]);
      c.mean[i] = obs.mean_ne;
      if (want_second) c.second_moment[i] = obs.variance_ne + obs.mean_ne * obs.mean_ne;
    }
  }
  return c;
}

}  // namespace

WeightTable build_weights(const EnsembleSpec& spec) {
  return spec.custom_weights.empty() ? poisson_table(spec) : custom_table(spec);
}

Trajectory ensemble_mean(const EnsembleSpec& spec, std::span<const double> tau,
                         Execution exec) {
  require_ascending(tau, "ensemble");
  if (spec.per_l_method == PerLMethod::exact && spec.nbar > kMaxExactNbar) {
    throw DomainError("ensemble", "exact per-l curves are limited to nbar <= 300");
  }
  const WeightTable table = build_weights(spec);
  const bool exact = spec.per_l_method == PerLMethod::exact;
  const auto count = static_cast<std::ptrdiff_t>(table.weights.size());
  const bool parallel = exec == Execution::parallel;

  // Stage 1: per-l curves, independent of each other.
  std::vector<Curve> curves(table.weights.size());
  const auto build = [&](std::ptrdiff_t j) {
    if (table.weights[j] == 0.0) return;
    const CurveSource src = make_source(table.first_l + static_cast<int>(j),
                                        spec.per_l_method);
    curves[j] = evaluate(src, tau, exact);
  };
  {
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (std::ptrdiff_t j = 0; j < count; ++j) {
      try {
        build(j);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  // Stage 2: reduction over l in ascending order at every tau.
  Trajectory traj;
  traj.method = Method::ensemble;
  traj.tau.assign(tau.begin(), tau.end());
  traj.mean_ne.resize(tau.size());
  if (exact) traj.variance_ne.resize(tau.size());
  const auto points = static_cast<std::ptrdiff_t>(tau.size());
#pragma omp parallel for schedule(static) if (parallel)
  for (std::ptrdiff_t i = 0; i < points; ++i) {
    CompensatedSum mean;
    CompensatedSum second;
    for (std::ptrdiff_t j = 0; j < count; ++j) {
      const double w = table.weights[j];
      if (w == 0.0) continue;
      mean.add(w * curves[j].mean[i]);
      if (exact) second.add(w * curves[j].second_moment[i]);
    }
    traj.mean_ne[i] = mean.value();
    if (exact) {
      traj.variance_ne[i] = second.value() - mean.value() * mean.value();
    }
  }
  return traj;
}

std::vector<Revival> detect_revivals(const Trajectory& traj, double baseline,
                                     const RevivalOptions& opts) {
  const auto& tau = traj.tau;
  const std::size_t n = tau.size();
  if (n < 3) return {};
  const double nbar = std::abs(traj.mean_ne.front());
  double window = 1.0;
  if (opts.window) {
    window = *opts.window;
  } else if (nbar >= closed_form::kMinAtoms) {
    window = std::log(8.0 * nbar) / std::sqrt(nbar + 2.0);
  }
  const double threshold = opts.threshold_fraction * nbar;

  std::vector<double> dev(n);
  for (std::size_t i = 0; i < n; ++i) dev[i] = std::abs(traj.mean_ne[i] - baseline);

  // Sliding maximum over [tau_i - window, tau_i + window].
  std::vector<double> env(n);
  std::deque<std::size_t> q;
  std::size_t right = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (right < n && tau[right] <= tau[i] + window) {
      while (!q.empty() && dev[q.back()] <= dev[right]) q.pop_back();
      q.push_back(right++);
    }
    while (tau[q.front()] < tau[i] - window) q.pop_front();
    env[i] = dev[q.front()];
  }

  std::vector<Revival> out;
  std::size_t s = 0;
  while (s < n) {
    std::size_t e = s;
    while (e + 1 < n && env[e + 1] == env[s]) ++e;
    const double v = env[s];
    const bool interior = s > 0 && e + 1 < n;
    if (interior && env[s - 1] < v && env[e + 1] < v) {
      double left_min = v;
      for (std::size_t k = s; k-- > 0 && env[k] <= v;) left_min = std::min(left_min, env[k]);
      double right_min = v;
      for (std::size_t k = e + 1; k < n && env[k] <= v; ++k) {
        right_min = std::min(right_min, env[k]);
      }
      const double prominence = v - std::max(left_min, right_min);
      if (prominence >= threshold) {
        std::size_t at = s + (e - s) / 2;
        for (std::size_t k = s; k <= e; ++k) {
          if (dev[k] == v) {
            at = k;
            break;
          }
        }
        out.push_back({tau[at], prominence, v});
      }
    }
    s = e + 1;
  }
  return out;
}

RevivalCriterion revival_criterion_check(double nbar, double phase_tolerance) {
  if (!(nbar >= 10.0) || std::abs(nbar - std::round(nbar)) > 1e-9) {
    throw DomainError("ensemble", "revival criterion needs integer nbar >= 10");
  }
  const int la = static_cast<int>(std::lround(nbar));
  const auto a = closed_form::solve_elliptic_params(la);
  const auto b = closed_form::solve_elliptic_params(la + 1);
  const double qa = a.k_complete / a.omega;
  const double qb = b.k_complete / b.omega;

  // (2r + 1) qa = (2r + 3) qb, solved for real r, then the nearest integers.
  const double r_star = (3.0 * qb - qa) / (2.0 * (qa - qb));
  RevivalCriterion best;
  best.phase_mismatch = std::numeric_limits<double>::infinity();
  for (const double r : {std::floor(r_star), std::ceil(r_star)}) {
    if (r < 0.0) continue;
    const double ta = (2.0 * r + 1.0) * qa;
    const double tb = (2.0 * r + 3.0) * qb;
    const double mismatch = std::abs(ta - tb) / a.period();
    if (mismatch < best.phase_mismatch) {
      best.phase_mismatch = mismatch;
      best.r = static_cast<long>(r);
      best.t_revival_numeric = 0.5 * (ta + tb);
    }
  }
  best.t_revival_formula = closed_form::predict_times(nbar).t_revival;
  if (!(best.phase_mismatch <= phase_tolerance)) {
    std::ostringstream msg;
    msg << "no integer r gives simultaneous maxima within " << phase_tolerance
        << " periods; best r = " << best.r << " with mismatch "
        << best.phase_mismatch << " at T = " << best.t_revival_numeric;
    throw NumericalError("ensemble", msg.str());
  }
  return best;
}

double time_average(std::span<const double> tau, std::span<const double> values,
                    double t0, double t1) {
  if (tau.size() != values.size() || tau.size() < 2 || !(t1 > t0) ||
      t0 < tau.front() || t1 > tau.back()) {
    throw DomainError("ensemble", "time average window outside the sampled range");
  }
  const auto interp = [&](std::size_t i, double t) {
    const double u = (t - tau[i]) / (tau[i + 1] - tau[i]);
    return values[i] + u * (values[i + 1] - values[i]);
  };
  CompensatedSum area;
  for (std::size_t i = 0; i + 1 < tau.size(); ++i) {
    const double a = std::max(tau[i], t0);
    const double b = std::min(tau[i + 1], t1);
    if (!(b > a)) continue;
    area.add(0.5 * (b - a) * (interp(i, a) + interp(i, b)));
  }
  return area.value() / (t1 - t0);
}

}  // namespace trilinear::ensemble
