#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <random>

#include "ghostlab/detection.hpp"
#include "ghostlab/errors.hpp"
#include "ghostlab/linalg.hpp"

using namespace ghostlab;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix m(r, c);
  for (double& v : m.data) v = u(rng);
  return m;
}

Eigen::VectorXd eigen_singular_values(const Matrix& m) {
  Eigen::MatrixXd e(m.rows, m.cols);
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) e(i, j) = m(i, j);
  }
  return Eigen::JacobiSVD<Eigen::MatrixXd>(e).singularValues();
}

}  // namespace

TEST(Linalg, TopSingularValuesMatchEigen) {
  const Matrix m = random_matrix(30, 22, 4);
  const std::vector<double> s = top_singular_values(m, 5, 1e-13);
  const Eigen::VectorXd ref = eigen_singular_values(m);
  ASSERT_GE(s.size(), 1u);
  for (std::size_t i = 0; i < std::min<std::size_t>(s.size(), 3); ++i) EXPECT_NEAR(s[i], ref(i), 1e-8 * ref(0));
}

TEST(Rank1, IdentityResidual) {
  Matrix id(64, 64);
  for (std::size_t i = 0; i < 64; ++i) id(i, i) = 1.0;
  EXPECT_NEAR(rank1_residual(id).residual, 1.0 - 1.0 / 64.0, 1e-9);
}

TEST(Rank1, OuterProductIsFactorizable) {
  std::vector<double> u(40), v(25);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = 1.0 + std::sin(0.3 * i);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(-0.1 * i);
  const FactorizabilityReport r = rank1_residual(Matrix::outer(u, v));
  EXPECT_LT(r.residual, 1e-12);
  EXPECT_TRUE(r.factorizable);
}

TEST(Rank1, ScaleAndPermutationInvariance) {
  const Matrix m = random_matrix(20, 20, 9);
  const double base = rank1_residual(m).residual;
  Matrix scaled = m;
  for (double& v : scaled.data) v *= 37.5;
  EXPECT_NEAR(rank1_residual(scaled).residual, base, 1e-10);
  std::vector<std::size_t> perm(20);
  for (std::size_t i = 0; i < 20; ++i) perm[i] = (7 * i + 3) % 20;
  Matrix p(20, 20);
  for (std::size_t i = 0; i < 20; ++i) {
    for (std::size_t j = 0; j < 20; ++j) p(i, j) = m(perm[i], perm[(j + 5) % 20]);
  }
  EXPECT_NEAR(rank1_residual(p).residual, base, 1e-10);
}

TEST(Rank1, AgreesWithEigenSvd) {
  const Matrix m = random_matrix(16, 24, 1);
  const Eigen::VectorXd s = eigen_singular_values(m);
  EXPECT_NEAR(rank1_residual(m).residual, 1.0 - s(0) * s(0) / s.squaredNorm(), 1e-9);
}

TEST(Rank1, RejectsNegativeOrZeroMaps) {
  Matrix m(3, 3, 1.0);
  m(1, 1) = -0.5;
  EXPECT_THROW(rank1_residual(m), InvalidArgument);
  EXPECT_THROW(rank1_residual(Matrix(3, 3, 0.0)), InvalidArgument);
}
