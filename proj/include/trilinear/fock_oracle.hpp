#pragma once

// Exact evolution under H = -hbar Omega (b_g^+ b_e a^+ + b_g b_e^+ a) in the
// number basis. S_A and S_E are conserved, so the initial Fock state only
// couples to the chain |n_e0 - k, n_g0 + k, n_a0 + k>, k in [-min(n_g0,
// n_a0), n_e0]. The chain Hamiltonian is real symmetric tridiagonal with
// zero diagonal; one eigen-decomposition gives the state at any tau.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "trilinear/parallel.hpp"
#include "trilinear/tridiagonal.hpp"
#include "trilinear/types.hpp"

namespace trilinear::fock {

inline constexpr std::size_t kMaxChainDim = 100'000;

struct ChainState {
  std::int64_t k_min = 0;  // most negative k (photon absorption side)
  std::int64_t k_max = 0;
  std::int64_t n_excited0 = 0;
  std::int64_t n_ground0 = 0;
  std::int64_t n_photons0 = 0;
  /// h_k = sqrt((n_e0 - k)(n_g0 + k + 1)(n_a0 + k + 1)) linking k and k + 1.
  /// The Hamiltonian element is -h_k.
  std::vector<double> couplings;
  std::vector<std::complex<double>> amplitudes;

  std::size_t dim() const noexcept { return couplings.size() + 1; }
  std::size_t initial_index() const noexcept {
    return static_cast<std::size_t>(-k_min);
  }
  std::int64_t k_at(std::size_t i) const noexcept {
    return k_min + static_cast<std::int64_t>(i);
  }
  double excited_at(std::size_t i) const noexcept {
    return static_cast<double>(n_excited0 - k_at(i));
  }
  double ground_at(std::size_t i) const noexcept {
    return static_cast<double>(n_ground0 + k_at(i));
  }
  double photons_at(std::size_t i) const noexcept {
    return static_cast<double>(n_photons0 + k_at(i));
  }
};

/// Chain for the initial Fock state of `spec`, amplitude 1 at k = 0.
/// Throws DomainError past kMaxChainDim.
ChainState build_chain(const SystemSpec& spec);

/// Conserved expectation values for the initial number state of `spec`.
ConservedCharges conserved_charges(const SystemSpec& spec);

/// Moments of the evolved state at one tau (energies in units of hbar Omega).
struct Observables {
  double norm = 0.0;
  double mean_ne = 0.0;
  double variance_ne = 0.0;
  double energy = 0.0;
  double energy_sq = 0.0;
};

/// Immutable after construction; concurrent const calls are safe.
class ExactPropagator {
 public:
  explicit ExactPropagator(const SystemSpec& spec);

  std::vector<std::complex<double>> amplitudes(double tau) const;
  Observables observables(double tau) const;
  /// Charges recomputed from the evolved state, for conservation checks.
  ConservedCharges charges_at(double tau) const;

  const ChainState& chain() const noexcept { return chain_; }
  const TridiagonalEigen& spectrum() const noexcept { return eigen_; }
  const ConservedCharges& charges() const noexcept { return charges_; }

 private:
  ChainState chain_;
  TridiagonalEigen eigen_;
  std::vector<double> overlap_;  // <j|psi(0)> per eigenvector j
  ConservedCharges charges_;
};

/// N_e and Delta_e^2 on `tau`. The parallel flavour splits the grid across
/// OpenMP threads; each point is computed identically in both flavours.
Trajectory evolve_exact(const SystemSpec& spec, std::span<const double> tau,
                        Execution exec = Execution::parallel);

/// Same, reusing an existing decomposition.
Trajectory evolve_exact(const ExactPropagator& propagator,
                        std::span<const double> tau,
                        Execution exec = Execution::parallel);

}  // namespace trilinear::fock
