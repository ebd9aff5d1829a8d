#include "emoadapt/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "emoadapt/error.hpp"

namespace emoadapt {

SymmetricEigen jacobi_eigen(const Tensor<double>& sym, double tolerance, std::size_t max_sweeps) {
  if (sym.rank() != 2 || sym.dim(0) != sym.dim(1)) {
    throw ShapeError("jacobi_eigen: expected a square matrix, got " + shape_to_string(sym.shape()));
  }
  const std::size_t n = sym.dim(0);
  std::vector<double> a(sym.data().begin(), sym.data().end());
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  auto norms = [&] {
    double total = 0.0, off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double x = a[i * n + j] * a[i * n + j];
        total += x;
        if (i != j) off += x;
      }
    return std::pair{std::sqrt(total), std::sqrt(off)};
  };

  SymmetricEigen out;
  for (; out.sweeps < max_sweeps; ++out.sweeps) {
    auto [total, off] = norms();
    if (off <= tolerance * total || off == 0.0) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // A <- J^T A J with J the (p,q) rotation.
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        a[p * n + q] = 0.0;
        a[q * n + p] = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p], vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a[i * n + i] > a[j * n + j]; });
  out.values.resize(n);
  out.vectors = Tensor<double>({n, n});
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a[order[j] * n + order[j]];
    for (std::size_t k = 0; k < n; ++k) out.vectors[k * n + j] = v[k * n + order[j]];
  }
  return out;
}

namespace {

// Components at or below this fraction of the leading eigenvalue are treated
// as zero variance.
constexpr double kDegenerateRatio = 1e-10;

}  // namespace

Pca3 pca3(const Tensor<double>& matrix) {
  if (matrix.rank() != 2) throw ShapeError("pca3: expected [samples,dims], got " + shape_to_string(matrix.shape()));
  const std::size_t S = matrix.dim(0), D = matrix.dim(1);
  if (S < 4) throw ArgumentError("pca3: need at least 4 samples, got " + std::to_string(S));
  if (D < 3) throw ArgumentError("pca3: need at least 3 dimensions, got " + std::to_string(D) + " (no padding policy)");

  std::vector<double> x(matrix.data().begin(), matrix.data().end());
  for (std::size_t d = 0; d < D; ++d) {
    double mean = 0.0;
    for (std::size_t i = 0; i < S; ++i) mean += x[i * D + d];
    mean /= static_cast<double>(S);
    for (std::size_t i = 0; i < S; ++i) x[i * D + d] -= mean;
  }

  Pca3 out;
  out.basis = Tensor<double>({D, 3});
  out.projection = Tensor<double>({S, 3});
  const double inv_s = 1.0 / static_cast<double>(S);

  if (D <= S) {
    Tensor<double> cov({D, D});
    for (std::size_t i = 0; i < D; ++i) {
      for (std::size_t j = i; j < D; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < S; ++k) acc += x[k * D + i] * x[k * D + j];
        cov[i * D + j] = cov[j * D + i] = acc * inv_s;
      }
    }
    auto eig = jacobi_eigen(cov);
    for (std::size_t c = 0; c < 3; ++c) {
      out.eigenvalues[c] = eig.values[c];
      for (std::size_t d = 0; d < D; ++d) out.basis[d * 3 + c] = eig.vectors[d * D + c];
    }
  } else {
    Tensor<double> gram({S, S});
    for (std::size_t i = 0; i < S; ++i) {
      for (std::size_t j = i; j < S; ++j) {
        double acc = 0.0;
        for (std::size_t d = 0; d < D; ++d) acc += x[i * D + d] * x[j * D + d];
        gram[i * S + j] = gram[j * S + i] = acc * inv_s;
      }
    }
    auto eig = jacobi_eigen(gram);
    for (std::size_t c = 0; c < 3; ++c) {
      out.eigenvalues[c] = eig.values[c];
      // v = X^T u, normalised.
      std::vector<double> col(D, 0.0);
      for (std::size_t i = 0; i < S; ++i) {
        const double u = eig.vectors[i * S + c];
        for (std::size_t d = 0; d < D; ++d) col[d] += u * x[i * D + d];
      }
      double norm = 0.0;
      for (double vd : col) norm += vd * vd;
      norm = std::sqrt(norm);
      for (std::size_t d = 0; d < D; ++d) out.basis[d * 3 + c] = norm > 0.0 ? col[d] / norm : 0.0;
    }
  }

  const double lead = std::max(out.eigenvalues[0], 0.0);
  for (std::size_t c = 0; c < 3; ++c) {
    out.degenerate[c] = !(out.eigenvalues[c] > kDegenerateRatio * lead) || lead == 0.0;
    if (out.degenerate[c]) {
      out.eigenvalues[c] = std::max(out.eigenvalues[c], 0.0);
      for (std::size_t d = 0; d < D; ++d) out.basis[d * 3 + c] = 0.0;
      continue;
    }
    std::size_t arg = 0;
    for (std::size_t d = 1; d < D; ++d)
      if (std::abs(out.basis[d * 3 + c]) > std::abs(out.basis[arg * 3 + c])) arg = d;
    if (out.basis[arg * 3 + c] < 0.0)
      for (std::size_t d = 0; d < D; ++d) out.basis[d * 3 + c] = -out.basis[d * 3 + c];
    for (std::size_t i = 0; i < S; ++i) {
      double acc = 0.0;
      for (std::size_t d = 0; d < D; ++d) acc += x[i * D + d] * out.basis[d * 3 + c];
      out.projection[i * 3 + c] = acc;
    }
  }
  return out;
}

}  // namespace emoadapt
