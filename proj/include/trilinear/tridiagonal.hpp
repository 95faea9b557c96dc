#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace trilinear {

/// Eigen-decomposition of a real symmetric tridiagonal matrix.
/// Eigenvalues are sorted ascending; `vectors` is column-major, column j
/// being the unit eigenvector for `values[j]`.
struct TridiagonalEigen {
  std::vector<double> values;
  std::vector<double> vectors;
  std::size_t dim = 0;

  double vector(std::size_t row, std::size_t col) const {
    return vectors[col * dim + row];
  }
};

/// Implicit-shift QL on diag/offdiag (offdiag.size() == diag.size() - 1).
/// Throws NumericalError if an eigenvalue needs more than 60 sweeps.
TridiagonalEigen eigen_tridiagonal(std::span<const double> diag,
                                   std::span<const double> offdiag);

}  // namespace trilinear
