#include "trilinear/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "trilinear/errors.hpp"

namespace trilinear {

void SystemSpec::validate() const {
  if (n_excited < 0 || n_ground < 0 || n_photons < 0) {
    throw DomainError("fockoracle", "occupation numbers must be nonnegative");
  }
  if (n_excited + n_ground < 1) {
    throw DomainError("fockoracle", "system needs at least one atom");
  }
  if (!(rabi_frequency > 0.0) || !std::isfinite(rabi_frequency)) {
    throw DomainError("fockoracle", "Rabi frequency must be positive");
  }
}

ConservedCharges ConservedCharges::number_state(double n) {
  return {n, n, 4.0 * n + 1.0, n * n, 2.0 * n * n - n};
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::exact: return "exact";
    case Method::vanishing_variance: return "vanishing_variance";
    case Method::vanishing_asymmetry: return "vanishing_asymmetry";
    case Method::quartic: return "quartic";
    case Method::closed_form: return "closed_form";
    case Method::ensemble: return "ensemble";
  }
  return "unknown";
}

std::optional<Method> method_from_string(std::string_view name) {
  for (Method m : {Method::exact, Method::vanishing_variance,
                   Method::vanishing_asymmetry, Method::quartic,
                   Method::closed_form, Method::ensemble}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::vector<double> Trajectory::delta_e() const {
  std::vector<double> out(variance_ne.size());
  std::transform(variance_ne.begin(), variance_ne.end(), out.begin(),
                 [](double v) { return std::sqrt(std::max(v, 0.0)); });
  return out;
}

std::vector<double> uniform_grid(double tau_max, std::size_t samples) {
  if (samples < 2 || !(tau_max > 0.0)) {
    throw DomainError("cli", "grid needs samples >= 2 and tau_max > 0");
  }
  std::vector<double> tau(samples);
  const double denom = static_cast<double>(samples - 1);
  for (std::size_t i = 0; i < samples; ++i) {
    tau[i] = tau_max * (static_cast<double>(i) / denom);
  }
  return tau;
}

void require_ascending(std::span<const double> tau, const char* module) {
  for (std::size_t i = 1; i < tau.size(); ++i) {
    if (!(tau[i] > tau[i - 1])) {
      std::ostringstream msg;
      msg << "tau grid not strictly increasing at index " << i;
      throw DomainError(module, msg.str());
    }
  }
}

}  // namespace trilinear
