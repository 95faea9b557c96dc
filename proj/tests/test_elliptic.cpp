#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "trilinear/elliptic.hpp"
#include "trilinear/errors.hpp"

using namespace trilinear;

namespace {

// K(m) = (1/2) int_0^pi dtheta / sqrt(1 - m sin^2 theta). The integrand is
// smooth and pi-periodic, so the plain trapezoid rule converges geometrically.
double k_by_trapezoid(double m, int nodes) {
  const double h = std::numbers::pi / nodes;
  double sum = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double s = std::sin(i * h);
    sum += 1.0 / std::sqrt(1.0 - m * s * s);
  }
  return 0.5 * h * sum;
}

}  // namespace

TEST_CASE("K against a quadrature oracle") {
  for (double m : {0.0, 0.1, 0.5, 0.9, 0.98}) {
    CAPTURE(m);
    const double oracle = k_by_trapezoid(m, 4096);
    CHECK(std::abs(elliptic::complete_elliptic_k(m) - oracle) < 1e-11 * oracle);
  }
  CHECK(elliptic::complete_elliptic_k(0.0) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));
}

TEST_CASE("K approaches the logarithmic limit") {
  for (double target : {1e-4, 1e-6, 1e-9}) {
    const double m = 1.0 - target;
    const double mc = 1.0 - m;  // exact, unlike target
    const double k = elliptic::complete_elliptic_k(m);
    const double lead = 0.5 * std::log(16.0 / mc);
    // next term is (mc / 4)(lead - 1)
    CHECK(std::abs(k - lead) < mc * lead);
  }
}

TEST_CASE("Pythagorean identities on random arguments") {
  std::mt19937_64 rng(20261015);
  std::uniform_real_distribution<double> zdist(-20.0, 20.0);
  std::uniform_real_distribution<double> mdist(0.0, 1.0);
  double worst1 = 0.0, worst2 = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double z = zdist(rng), m = mdist(rng);
    const auto t = elliptic::jacobi_cn_sn_dn(z, m);
    worst1 = std::max(worst1, std::abs(t.sn * t.sn + t.cn * t.cn - 1.0));
    worst2 = std::max(worst2, std::abs(t.dn * t.dn + m * t.sn * t.sn - 1.0));
  }
  CHECK(worst1 < 1e-12);
  CHECK(worst2 < 1e-12);
}

TEST_CASE("special parameters") {
  for (double z : {-2.0, 0.3, 1.7, 9.0}) {
    const auto circ = elliptic::jacobi_cn_sn_dn(z, 0.0);
    CHECK(circ.cn == doctest::Approx(std::cos(z)).epsilon(1e-14));
    CHECK(circ.sn == doctest::Approx(std::sin(z)).epsilon(1e-14));
    CHECK(circ.dn == 1.0);
    const auto hyp = elliptic::jacobi_cn_sn_dn(z, 1.0);
    CHECK(hyp.cn == doctest::Approx(1.0 / std::cosh(z)).epsilon(1e-14));
    CHECK(hyp.sn == doctest::Approx(std::tanh(z)).epsilon(1e-14));
    CHECK(hyp.dn == doctest::Approx(1.0 / std::cosh(z)).epsilon(1e-14));
  }
}

TEST_CASE("quarter period and periodicity") {
  for (double m : {0.2, 0.7, 0.98039051356209514, 0.999}) {
    CAPTURE(m);
    const double k = elliptic::complete_elliptic_k(m);
    const auto q = elliptic::jacobi_cn_sn_dn(k, m);
    CHECK(std::abs(q.cn) < 1e-12);
    CHECK(q.sn == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(q.dn == doctest::Approx(std::sqrt(1.0 - m)).epsilon(1e-10));
    for (double z : {0.1, 0.77, 2.5}) {
      const auto a = elliptic::jacobi_cn_sn_dn(z, m);
      const auto b = elliptic::jacobi_cn_sn_dn(z + 4.0 * k, m);
      const auto c = elliptic::jacobi_cn_sn_dn(z + 2.0 * k, m);
      CHECK(b.cn == doctest::Approx(a.cn).epsilon(1e-10));
      CHECK(b.sn == doctest::Approx(a.sn).epsilon(1e-10));
      CHECK(c.cn == doctest::Approx(-a.cn).epsilon(1e-10));
      CHECK(c.dn == doctest::Approx(a.dn).epsilon(1e-10));
    }
  }
}

TEST_CASE("parity") {
  const auto p = elliptic::jacobi_cn_sn_dn(0.9, 0.6);
  const auto n = elliptic::jacobi_cn_sn_dn(-0.9, 0.6);
  CHECK(p.cn == n.cn);
  CHECK(p.sn == -n.sn);
  CHECK(p.dn == n.dn);
}

TEST_CASE("hyperbolic switch is continuous") {
  const double m_in = 1.0 - 0.5 * elliptic::kHyperbolicSwitch;
  const double m_out = 1.0 - 2.0 * elliptic::kHyperbolicSwitch;
  for (double z : {0.5, 3.0}) {
    const auto a = elliptic::jacobi_cn_sn_dn(z, m_in);
    const auto b = elliptic::jacobi_cn_sn_dn(z, m_out);
    CHECK(std::abs(a.cn - b.cn) < 1e-9);
    CHECK(std::abs(a.sn - b.sn) < 1e-9);
  }
}

TEST_CASE("cn^2 derivatives match finite differences") {
  const double h = 1e-4;
  for (double m : {0.3, 0.98}) {
    for (double z : {-1.3, 0.2, 2.1}) {
      auto f = [&](double x) { return elliptic::cn_squared_derivatives(x, m).f; };
      const auto d = elliptic::cn_squared_derivatives(z, m);
      const double fd1 = (f(z - 2 * h) - 8 * f(z - h) + 8 * f(z + h) - f(z + 2 * h)) / (12 * h);
      const double fd2 = (-f(z - 2 * h) + 16 * f(z - h) - 30 * f(z) + 16 * f(z + h) - f(z + 2 * h)) /
                         (12 * h * h);
      CHECK(d.df == doctest::Approx(fd1).epsilon(1e-8));
      CHECK(d.d2f == doctest::Approx(fd2).epsilon(1e-5));
    }
  }
}

TEST_CASE("second derivative at the dip") {
  // cn(-K) = 0, sn(-K) = -1, dn(-K) = sqrt(1 - m) give (cn^2)'' = 2 (1 - m).
  for (double m : {0.5, 0.98}) {
    const double k = elliptic::complete_elliptic_k(m);
    const auto d = elliptic::cn_squared_derivatives(-k, m);
    CHECK(std::abs(d.f) < 1e-20);
    CHECK(d.d2f == doctest::Approx(2.0 * (1.0 - m)).epsilon(1e-9));
  }
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(elliptic::complete_elliptic_k(1.0), DomainError);
  CHECK_THROWS_AS(elliptic::complete_elliptic_k(-0.1), DomainError);
  CHECK_THROWS_AS(elliptic::complete_elliptic_k(std::nan("")), DomainError);
  CHECK_THROWS_AS(elliptic::jacobi_cn_sn_dn(0.1, 1.5), DomainError);
  CHECK_THROWS_AS(elliptic::jacobi_cn_sn_dn(std::nan(""), 0.5), DomainError);
}
