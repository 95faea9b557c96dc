#include "trilinear/fock_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "trilinear/errors.hpp"

namespace trilinear::fock {

ChainState build_chain(const SystemSpec& spec) {
  spec.validate();
  ChainState chain;
  chain.n_excited0 = spec.n_excited;
  chain.n_ground0 = spec.n_ground;
  chain.n_photons0 = spec.n_photons;
  chain.k_min = -std::min(spec.n_ground, spec.n_photons);
  chain.k_max = spec.n_excited;

  const auto dim = static_cast<std::size_t>(chain.k_max - chain.k_min + 1);
  if (dim > kMaxChainDim) {
    std::ostringstream msg;
    msg << "chain dimension " << dim << " exceeds the cap of " << kMaxChainDim;
    throw DomainError("fockoracle", msg.str());
  }

  chain.couplings.resize(dim - 1);
  for (std::size_t i = 0; i + 1 < dim; ++i) {
    const double ne = chain.excited_at(i);
    const double ng = chain.ground_at(i);
    const double na = chain.photons_at(i);
    chain.couplings[i] = std::sqrt(ne * (ng + 1.0) * (na + 1.0));
  }
  chain.amplitudes.assign(dim, {0.0, 0.0});
  chain.amplitudes[chain.initial_index()] = {1.0, 0.0};
  return chain;
}

ConservedCharges conserved_charges(const SystemSpec& spec) {
  const ChainState chain = build_chain(spec);
  const std::size_t k0 = chain.initial_index();
  // <psi|H^2|psi> for a basis vector is the sum of its squared couplings.
  double h2 = 0.0;
  if (k0 > 0) h2 += chain.couplings[k0 - 1] * chain.couplings[k0 - 1];
  if (k0 < chain.couplings.size()) h2 += chain.couplings[k0] * chain.couplings[k0];

  ConservedCharges q;
  q.s_a = static_cast<double>(spec.n_excited + spec.n_ground);
  q.s_e = static_cast<double>(spec.n_excited + spec.n_photons);
  q.a_bar = 2.0 * q.s_e + 2.0 * q.s_a + 1.0;
  q.b_bar = q.s_a * q.s_e;
  q.c_bar = 2.0 * q.s_a * q.s_e - h2;
  return q;
}

ExactPropagator::ExactPropagator(const SystemSpec& spec)
    : chain_(build_chain(spec)), charges_(conserved_charges(spec)) {
  const std::size_t dim = chain_.dim();
  std::vector<double> diag(dim, 0.0);
  std::vector<double> off(chain_.couplings.size());
  std::transform(chain_.couplings.begin(), chain_.couplings.end(), off.begin(),
                 [](double h) { return -h; });
  eigen_ = eigen_tridiagonal(diag, off);

  overlap_.resize(dim);
  const std::size_t k0 = chain_.initial_index();
  for (std::size_t j = 0; j < dim; ++j) overlap_[j] = eigen_.vector(k0, j);
}

std::vector<std::complex<double>> ExactPropagator::amplitudes(double tau) const {
  // psi(tau) = psi(0) + sum_j |j><j|psi(0)> (exp(-i lambda_j tau) - 1).
  // Writing the correction against psi(0) keeps tau = 0 exact and small tau
  // accurate; cos(x) - 1 = -2 sin^2(x / 2).
  const std::size_t dim = chain_.dim();
  std::vector<double> re(dim, 0.0);
  std::vector<double> im(dim, 0.0);
  for (std::size_t j = 0; j < dim; ++j) {
    const double phase = eigen_.values[j] * tau;
    const double half = std::sin(0.5 * phase);
    const double a = -2.0 * overlap_[j] * half * half;
    const double b = -overlap_[j] * std::sin(phase);
    const double* v = eigen_.vectors.data() + j * dim;
    for (std::size_t i = 0; i < dim; ++i) {
      re[i] += v[i] * a;
      im[i] += v[i] * b;
    }
  }
  re[chain_.initial_index()] += 1.0;
  std::vector<std::complex<double>> out(dim);
  for (std::size_t i = 0; i < dim; ++i) out[i] = {re[i], im[i]};
  return out;
}

namespace {

// (H c)_i for the chain Hamiltonian with elements -h.
std::vector<std::complex<double>> apply_hamiltonian(
    const ChainState& chain, std::span<const std::complex<double>> c) {
  const std::size_t dim = c.size();
  std::vector<std::complex<double>> hc(dim, {0.0, 0.0});
  for (std::size_t i = 0; i + 1 < dim; ++i) {
    const double h = chain.couplings[i];
    hc[i] -= h * c[i + 1];
    hc[i + 1] -= h * c[i];
  }
  return hc;
}

}  // namespace

Observables ExactPropagator::observables(double tau) const {
  const auto c = amplitudes(tau);
  Observables obs;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double p = std::norm(c[i]);
    obs.norm += p;
    obs.mean_ne += p * chain_.excited_at(i);
  }
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double d = chain_.excited_at(i) - obs.mean_ne;
    obs.variance_ne += std::norm(c[i]) * d * d;
  }
  const auto hc = apply_hamiltonian(chain_, c);
  for (std::size_t i = 0; i < c.size(); ++i) {
    obs.energy += (std::conj(c[i]) * hc[i]).real();
    obs.energy_sq += std::norm(hc[i]);
  }
  return obs;
}

ConservedCharges ExactPropagator::charges_at(double tau) const {
  const auto c = amplitudes(tau);
  ConservedCharges q;
  double sa_se = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double p = std::norm(c[i]);
    const double sa = chain_.excited_at(i) + chain_.ground_at(i);
    const double se = chain_.excited_at(i) + chain_.photons_at(i);
    q.s_a += p * sa;
    q.s_e += p * se;
    sa_se += p * sa * se;
  }
  double h2 = 0.0;
  for (const auto& v : apply_hamiltonian(chain_, c)) h2 += std::norm(v);
  q.a_bar = 2.0 * q.s_e + 2.0 * q.s_a + 1.0;
  q.b_bar = sa_se;
  q.c_bar = 2.0 * sa_se - h2;
  return q;
}

Trajectory evolve_exact(const ExactPropagator& propagator,
                        std::span<const double> tau, Execution exec) {
  require_ascending(tau, "fockoracle");
  Trajectory traj;
  traj.method = Method::exact;
  traj.tau.assign(tau.begin(), tau.end());
  traj.mean_ne.resize(tau.size());
  traj.variance_ne.resize(tau.size());
  traj.charges = propagator.charges();

  const auto n = static_cast<std::ptrdiff_t>(tau.size());
  const auto point = [&](std::ptrdiff_t i) {
    const Observables obs = propagator.observables(tau[i]);
    traj.mean_ne[i] = obs.mean_ne;
    traj.variance_ne[i] = obs.variance_ne;
  };
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) point(i);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) point(i);
  }
  return traj;
}

Trajectory evolve_exact(const SystemSpec& spec, std::span<const double> tau,
                        Execution exec) {
  return evolve_exact(ExactPropagator(spec), tau, exec);
}

}  // namespace trilinear::fock
