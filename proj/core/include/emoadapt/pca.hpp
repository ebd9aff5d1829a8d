#pragma once

#include <array>
#include <vector>

#include "emoadapt/tensor.hpp"

namespace emoadapt {

struct SymmetricEigen {
  std::vector<double> values;  // descending
  Tensor<double> vectors;      // [n,n], column j pairs with values[j]
  std::size_t sweeps = 0;
};

// Cyclic Jacobi eigensolver for a symmetric [n,n] matrix. Rotations run in
// fixed (p,q) order until the off-diagonal Frobenius norm drops below
// tolerance times the matrix norm.
SymmetricEigen jacobi_eigen(const Tensor<double>& symmetric, double tolerance = 1e-12, std::size_t max_sweeps = 100);

struct Pca3 {
  Tensor<double> projection;          // [samples,3]
  Tensor<double> basis;               // [dims,3], unit columns (zero if degenerate)
  std::array<double, 3> eigenvalues{};  // population covariance eigenvalues, descending
  std::array<bool, 3> degenerate{};     // zero-variance component, projection column is 0
  bool rank_deficient() const { return degenerate[0] || degenerate[1] || degenerate[2]; }
};

// Top-3 principal components of a [samples,dims] matrix after subtracting the
// pooled column mean. Each basis column is sign-fixed so its largest-magnitude
// entry is positive. Uses the dims x dims covariance when dims <= samples and
// the samples x samples Gram matrix otherwise; both give the same subspace.
Pca3 pca3(const Tensor<double>& matrix);

}  // namespace emoadapt
