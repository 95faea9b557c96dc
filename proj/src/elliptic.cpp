#include "trilinear/elliptic.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "trilinear/errors.hpp"

namespace trilinear::elliptic {
namespace {

void require_parameter(double m, bool allow_one) {
  const bool ok = allow_one ? (m >= 0.0 && m <= 1.0) : (m >= 0.0 && m < 1.0);
  if (!ok) {
    std::ostringstream msg;
    msg << "elliptic parameter m = " << m << " outside "
        << (allow_one ? "[0, 1]" : "[0, 1)");
    throw DomainError("elliptic", msg.str());
  }
}

}  // namespace

double complete_elliptic_k(double m) {
  require_parameter(m, false);
  double a = 1.0;
  double b = std::sqrt(1.0 - m);
  for (int i = 0; i < kMaxIterations; ++i) {
    if (std::abs(a - b) <= 4.0 * std::numeric_limits<double>::epsilon() * a) {
      return std::numbers::pi / (a + b);
    }
    const double next_a = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = next_a;
  }
  throw NumericalError("elliptic", "AGM did not converge for K(m)");
}

// Descending Landen chain in the cotangent form due to Bulirsch. The chain
// runs on the complementary parameter, so it stays well conditioned as
// m -> 1 where sn approaches 1 and cn carries all the information.
JacobiTriple jacobi_cn_sn_dn(double z, double m) {
  require_parameter(m, true);
  if (!std::isfinite(z)) throw DomainError("elliptic", "argument must be finite");
  const double mc = 1.0 - m;
  if (mc < kHyperbolicSwitch) {
    const double sech = 1.0 / std::cosh(z);
    return {sech, std::tanh(z), sech};
  }
  if (m == 0.0) {
    return {std::cos(z), std::sin(z), 1.0};
  }

  constexpr double kTol = 1e-8;  // one more AGM step takes this to eps
  std::array<double, kMaxIterations> am{};
  std::array<double, kMaxIterations> bm{};
  double a = 1.0;
  double emc = mc;
  double c = 0.0;
  int last = -1;
  for (int i = 0; i < kMaxIterations; ++i) {
    am[i] = a;
    emc = std::sqrt(emc);
    bm[i] = emc;
    c = 0.5 * (a + emc);
    if (std::abs(a - emc) <= kTol * a) {
      last = i;
      break;
    }
    emc *= a;
    a = c;
  }
  if (last < 0) {
    throw NumericalError("elliptic", "Landen chain did not converge");
  }

  const double u = z * c;
  double sn = std::sin(u);
  double cn = std::cos(u);
  if (sn != 0.0) {
    double ratio = cn / sn;
    c *= ratio;
    double dn = 1.0;
    for (int i = last; i >= 0; --i) {
      const double b = am[i];
      ratio *= c;
      c *= dn;
      dn = (bm[i] + ratio) / (b + ratio);
      ratio = c / b;
    }
    const double s = 1.0 / std::sqrt(c * c + 1.0);
    sn = sn >= 0.0 ? s : -s;
    cn = c * sn;
  }
  // dn^2 = mc + m cn^2 has no cancellation, unlike 1 - m sn^2.
  return {cn, sn, std::sqrt(mc + m * cn * cn)};
}

CnSquared cn_squared_derivatives(double z, double m) {
  const auto [cn, sn, dn] = jacobi_cn_sn_dn(z, m);
  const double cn2 = cn * cn;
  const double sn2 = sn * sn;
  const double dn2 = dn * dn;
  return {cn2, -2.0 * cn * sn * dn,
          2.0 * (sn2 * dn2 - cn2 * dn2 + m * sn2 * cn2)};
}

}  // namespace trilinear::elliptic
