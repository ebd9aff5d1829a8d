#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "emoadapt/error.hpp"
#include "emoadapt/pca.hpp"
#include "eigen_oracles.hpp"
#include "oracles.hpp"

using namespace emoadapt;

namespace {

using oracle::anisotropic;
using oracle::max_principal_angle;
using oracle::to_eigen;

TEST(Jacobi, DiagonalAndKnownMatrix) {
  auto e = jacobi_eigen(Tensor<double>({3, 3}, {2, 0, 0, 0, 5, 0, 0, 0, 1}));
  EXPECT_EQ(e.values, (std::vector<double>{5, 2, 1}));
  auto f = jacobi_eigen(Tensor<double>({2, 2}, {2, 1, 1, 2}));
  EXPECT_NEAR(f.values[0], 3.0, 1e-14);
  EXPECT_NEAR(f.values[1], 1.0, 1e-14);
  EXPECT_THROW(jacobi_eigen(Tensor<double>({2, 3})), ShapeError);
}

TEST(Jacobi, MatchesEigenOnRandomSymmetric) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> dim(1, 12);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = dim(rng);
    auto a = oracle::random_tensor<double>({n, n}, rng, -2, 2);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) a[i * n + j] = a[j * n + i];
    auto e = jacobi_eigen(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(a));
    for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(e.values[k], es.eigenvalues()(n - 1 - k), 1e-12) << trial;
    // A v = lambda v for every returned pair.
    Eigen::MatrixXd v = to_eigen(e.vectors);
    Eigen::MatrixXd av = to_eigen(a) * v;
    for (std::size_t k = 0; k < n; ++k) EXPECT_LT((av.col(k) - e.values[k] * v.col(k)).norm(), 1e-11) << trial;
  }
}

TEST(Pca3, AxisAlignedRecoversColumns) {
  // Corners of a box with half-widths 3, 2, 1 in shuffled column order.
  std::vector<double> rows;
  for (int a : {-1, 1})
    for (int b : {-1, 1})
      for (int c : {-1, 1}) {
        rows.push_back(2.0 * b + 10);
        rows.push_back(1.0 * c - 4);
        rows.push_back(3.0 * a);
      }
  Tensor<double> m({8, 3}, rows);
  auto p = pca3(m);
  EXPECT_NEAR(p.eigenvalues[0], 9.0, 1e-9);
  EXPECT_NEAR(p.eigenvalues[1], 4.0, 1e-9);
  EXPECT_NEAR(p.eigenvalues[2], 1.0, 1e-9);
  EXPECT_FALSE(p.rank_deficient());
  const std::array<std::size_t, 3> source_col = {2, 0, 1};
  const std::array<double, 3> offset = {10, -4, 0};  // by source column
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t c = 0; c < 3; ++c) {
      const double centred = m[i * 3 + source_col[c]] - offset[source_col[c]];
      EXPECT_NEAR(std::abs(p.projection[i * 3 + c]), std::abs(centred), 1e-9);
      EXPECT_NEAR(p.projection[i * 3 + c], centred, 1e-9);  // sign rule: basis entries are +1
    }
}

TEST(Pca3, IdenticalRowsAreDegenerate) {
  Tensor<double> m({6, 4});
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 4; ++j) m[i * 4 + j] = static_cast<double>(j) - 1.5;
  auto p = pca3(m);
  for (double v : p.projection.data()) EXPECT_EQ(v, 0.0);
  for (double v : p.eigenvalues) EXPECT_EQ(v, 0.0);
  EXPECT_TRUE(p.degenerate[0] && p.degenerate[1] && p.degenerate[2]);
}

TEST(Pca3, RankTwoFlagsThirdComponent) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0, 1);
  Tensor<double> m({20, 5});
  for (std::size_t i = 0; i < 20; ++i) {
    const double a = n(rng), b = n(rng);
    for (std::size_t j = 0; j < 5; ++j) m[i * 5 + j] = a * (j + 1) + b * (j % 2 ? 1 : -1);
  }
  auto p = pca3(m);
  EXPECT_FALSE(p.degenerate[0]);
  EXPECT_FALSE(p.degenerate[1]);
  EXPECT_TRUE(p.degenerate[2]);
  EXPECT_TRUE(p.rank_deficient());
  for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(p.projection[i * 3 + 2], 0.0);
}

TEST(Pca3, Rejections) {
  EXPECT_THROW(pca3(Tensor<double>({10, 2})), ArgumentError);
  EXPECT_THROW(pca3(Tensor<double>({3, 5})), ArgumentError);
  EXPECT_THROW(pca3(Tensor<double>({3, 5, 1})), ShapeError);
}

TEST(Pca3, MatchesEigenOracleOnRandomMatrices) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::size_t> samples(8, 60), dims(3, 40);
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t s = trial == 0 ? 50 : samples(rng), d = trial == 0 ? 10 : dims(rng);
    auto m = anisotropic(s, d, rng);
    auto p = pca3(m);
    auto o = oracle::pca_reference(m);
    for (std::size_t c = 0; c < 3; ++c) {
      EXPECT_NEAR(p.eigenvalues[c], o.values(c), 1e-8 * o.values(0)) << "trial " << trial << " s=" << s << " d=" << d;
    }
    Eigen::MatrixXd ours = to_eigen(p.basis);
    EXPECT_LT(max_principal_angle(ours, o.vectors.leftCols(3)), 1e-6) << "trial " << trial << " s=" << s << " d=" << d;
    EXPECT_LT((ours.transpose() * ours - Eigen::Matrix3d::Identity()).norm(), 1e-10);
    // Projection is the centred data times the basis.
    Eigen::MatrixXd x = to_eigen(m);
    x.rowwise() -= x.colwise().mean();
    EXPECT_LT((x * ours - to_eigen(p.projection)).norm(), 1e-9 * (1 + x.norm()));
    // Sign rule.
    for (std::size_t c = 0; c < 3; ++c) {
      Eigen::Index arg;
      ours.col(c).cwiseAbs().maxCoeff(&arg);
      EXPECT_GT(ours(arg, c), 0.0);
    }
  }
}

TEST(Pca3, GramAndCovarianceRoutesAgree) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto wide = anisotropic(12, 12, rng);  // dims == samples, covariance route
    Tensor<double> wider({12, 13});      // one zero column forces the Gram route
    for (std::size_t i = 0; i < 12; ++i)
      for (std::size_t j = 0; j < 12; ++j) wider[i * 13 + j] = wide[i * 12 + j];
    auto a = pca3(wide), b = pca3(wider);
    for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(a.eigenvalues[c], b.eigenvalues[c], 1e-10 * a.eigenvalues[0]);
    for (std::size_t i = 0; i < a.projection.size(); ++i) EXPECT_NEAR(a.projection[i], b.projection[i], 1e-8);
  }
}

}  // namespace
