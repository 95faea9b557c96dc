#include "trilinear/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "trilinear/errors.hpp"

namespace trilinear {

TridiagonalEigen eigen_tridiagonal(std::span<const double> diag,
                                   std::span<const double> offdiag) {
  const std::size_t n = diag.size();
  if (n == 0) return {};
  if (offdiag.size() + 1 != n) {
    throw DomainError("fockoracle", "off-diagonal length must be dim - 1");
  }

  std::vector<double> d(diag.begin(), diag.end());
  std::vector<double> e(n, 0.0);
  std::copy(offdiag.begin(), offdiag.end(), e.begin());
  std::vector<double> z(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) z[i * n + i] = 1.0;

  constexpr double kEps = std::numeric_limits<double>::epsilon();
  constexpr int kMaxSweeps = 60;
  const auto col = [&](std::size_t c) { return z.data() + c * n; };

  const auto ni = static_cast<std::ptrdiff_t>(n);
  for (std::ptrdiff_t l = 0; l < ni; ++l) {
    int sweeps = 0;
    std::ptrdiff_t m = l;
    do {
      for (m = l; m < ni - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= kEps * dd) break;
      }
      if (m == l) break;
      if (++sweeps > kMaxSweeps) {
        throw NumericalError("fockoracle",
                             "tridiagonal QL did not converge at row " +
                                 std::to_string(l) + " of " + std::to_string(n));
      }
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0;
      double c = 1.0;
      double p = 0.0;
      std::ptrdiff_t i = m - 1;
      for (; i >= l; --i) {
        double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        double* zi = col(static_cast<std::size_t>(i));
        double* zi1 = col(static_cast<std::size_t>(i + 1));
        for (std::size_t k = 0; k < n; ++k) {
          f = zi1[k];
          zi1[k] = s * zi[k] + c * f;
          zi[k] = c * zi[k] - s * f;
        }
      }
      if (r == 0.0 && i >= l) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    } while (m != l);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });

  TridiagonalEigen out;
  out.dim = n;
  out.values.resize(n);
  out.vectors.resize(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = d[order[j]];
    std::copy_n(col(order[j]), n, out.vectors.data() + j * n);
  }
  return out;
}

}  // namespace trilinear
