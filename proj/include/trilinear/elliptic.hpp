#pragma once

// Complete elliptic integral of the first kind and the Jacobian elliptic
// functions for real argument and parameter m in [0, 1].

namespace trilinear::elliptic {

/// Below this complementary parameter 1 - m the hyperbolic limit is used.
inline constexpr double kHyperbolicSwitch = 1e-12;

/// Iteration cap shared by the AGM and the Landen chain.
inline constexpr int kMaxIterations = 64;

struct JacobiTriple {
  double cn;
  double sn;
  double dn;
};

/// cn^2 and its first two derivatives with respect to z.
struct CnSquared {
  double f;
  double df;
  double d2f;
};

/// K(m) by the arithmetic-geometric mean. Throws DomainError unless
/// 0 <= m < 1.
double complete_elliptic_k(double m);

/// cn, sn and dn evaluated together. Throws DomainError unless 0 <= m <= 1
/// and z is finite.
JacobiTriple jacobi_cn_sn_dn(double z, double m);

CnSquared cn_squared_derivatives(double z, double m);

}  // namespace trilinear::elliptic
