#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace trilinear {

/// Initial Fock configuration |n_e0, n_g0, n_a0> plus the Rabi frequency.
/// Time is dimensionless (tau = Omega t) everywhere in the library; the Rabi
/// frequency only converts tau to seconds at the output boundary.
struct SystemSpec {
  std::int64_t n_excited = 0;
  std::int64_t n_ground = 0;
  std::int64_t n_photons = 0;
  double rabi_frequency = 1.0;  // rad/s

  /// Throws DomainError on negative occupations, an empty system or a
  /// non-positive Rabi frequency.
  void validate() const;

  /// All atoms excited, no photons.
  static SystemSpec number_state(std::int64_t n) { return {n, 0, 0, 1.0}; }
};

/// Expectation values of the conserved operators S_A, S_E and of the
/// derived constants A = 2 S_E + 2 S_A + 1, B = S_A S_E and
/// C = -H^2 / (hbar Omega)^2 + 2 S_A S_E.
struct ConservedCharges {
  double s_a = 0.0;
  double s_e = 0.0;
  double a_bar = 1.0;
  double b_bar = 0.0;
  double c_bar = 0.0;

  /// Charges of the number state with n excited atoms and no photons:
  /// (n, n, 4n + 1, n^2, 2n^2 - n).
  static ConservedCharges number_state(double n);
};

enum class Method {
  exact,
  vanishing_variance,
  vanishing_asymmetry,
  quartic,
  closed_form,
  ensemble,
};

std::string_view to_string(Method method);
std::optional<Method> method_from_string(std::string_view name);

/// Sampled N_e(tau). `variance_ne` holds Delta_e^2 and is either empty (no
/// variance available for the method) or the same length as `tau`.
struct Trajectory {
  Method method = Method::exact;
  std::vector<double> tau;
  std::vector<double> mean_ne;
  std::vector<double> variance_ne;
  std::optional<ConservedCharges> charges;

  std::size_t size() const noexcept { return tau.size(); }
  bool has_variance() const noexcept { return !variance_ne.empty(); }

  /// Standard deviation Delta_e. Negative Delta_e^2 is reported as 0; the
  /// producing module has already rejected anything beyond its tolerance.
  std::vector<double> delta_e() const;
};

/// `samples` equally spaced points on [0, tau_max], both ends included.
std::vector<double> uniform_grid(double tau_max, std::size_t samples);

/// Throws DomainError unless `tau` is strictly increasing.
void require_ascending(std::span<const double> tau, const char* module);

}  // namespace trilinear
