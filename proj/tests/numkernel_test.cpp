#include "irlscs/numkernel.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace irlscs {
namespace {

RealVector vec(std::initializer_list<double> values) {
  RealVector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

DenseMatrix random_matrix(std::mt19937_64& gen, Eigen::Index rows,
                          Eigen::Index cols) {
  std::normal_distribution<double> normal;
  DenseMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(gen);
  return m;
}

RealVector random_vector(std::mt19937_64& gen, Eigen::Index n) {
  return random_matrix(gen, n, 1).col(0);
}

WeightVector random_weights(std::mt19937_64& gen, Eigen::Index n) {
  std::uniform_real_distribution<double> u(0.05, 20.0);
  RealVector w(n);
  for (Eigen::Index i = 0; i < n; ++i) w[i] = u(gen);
  return WeightVector(w);
}

TEST(Rearrangement, Examples) {
  EXPECT_EQ(nonincreasing_rearrangement(vec({3, -5, 2})), vec({5, 3, 2}));
  EXPECT_EQ(nonincreasing_rearrangement(vec({0, 0, 0})), vec({0, 0, 0}));
  EXPECT_EQ(nonincreasing_rearrangement(vec({-1, -1, 4})), vec({4, 1, 1}));
}

TEST(Rearrangement, EmptyInputRejected) {
  EXPECT_THROW(nonincreasing_rearrangement(RealVector()), std::invalid_argument);
}

TEST(Rearrangement, MatchesSortingOracle) {
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<int> len(1, 1000);
  for (int trial = 0; trial < 50; ++trial) {
    const RealVector x = random_vector(gen, len(gen));
    std::vector<double> oracle;
    for (Eigen::Index i = 0; i < x.size(); ++i) oracle.push_back(std::fabs(x[i]));
    std::sort(oracle.begin(), oracle.end(), std::greater<>());
    const RealVector r = nonincreasing_rearrangement(x);
    ASSERT_EQ(r.size(), x.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      ASSERT_EQ(r[i], oracle[static_cast<std::size_t>(i)]);
      ASSERT_EQ(rearranged_entry(x, static_cast<std::size_t>(i) + 1),
                oracle[static_cast<std::size_t>(i)]);
    }
  }
}

TEST(SigmaTail, Examples) {
  EXPECT_DOUBLE_EQ(sigma_tail(vec({3, -5, 2}), 1), 5.0);
  EXPECT_DOUBLE_EQ(sigma_tail(vec({1, 1, 1, 1}), 0), 4.0);
  EXPECT_DOUBLE_EQ(sigma_tail(vec({0, 7, 0, -2, 0}), 2), 0.0);
  EXPECT_DOUBLE_EQ(sigma_tail(vec({3, -5, 2}), 3), 0.0);
}

TEST(SigmaTail, OrderAboveLengthRejected) {
  EXPECT_THROW(sigma_tail(vec({1, 2}), 3), std::invalid_argument);
}

TEST(SigmaTail, MonotoneAndZeroExactlyWhenSparse) {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 40; ++trial) {
    RealVector x = random_vector(gen, 30);
    const int zeros = trial % 30;
    for (int i = 0; i < zeros; ++i) x[i] = 0.0;
    const std::size_t nnz = static_cast<std::size_t>(30 - zeros);
    for (std::size_t j = 0; j < 30; ++j) {
      EXPECT_LE(sigma_tail(x, j + 1), sigma_tail(x, j));
      EXPECT_EQ(sigma_tail(x, j) == 0.0, j >= nnz);
      EXPECT_EQ(is_sparse(x, j), j >= nnz);
    }
    EXPECT_NEAR(sigma_tail(x, 0), x.lpNorm<1>(), 1e-12 * x.lpNorm<1>());
  }
}

TEST(SmoothedObjective, Examples) {
  EXPECT_DOUBLE_EQ(smoothed_objective(vec({0, 0}), 1.0), 2.0);
  EXPECT_DOUBLE_EQ(smoothed_objective(vec({3, 4}), 0.0), 7.0);
  EXPECT_NEAR(smoothed_objective(vec({3, 4}), 1.0), std::sqrt(10.0) + std::sqrt(17.0),
              1e-15);
  EXPECT_NEAR(smoothed_objective(vec({3, 4}), 1.0), 7.28538, 1e-5);
}

TEST(SmoothedObjective, BracketedByL1Norm) {
  std::mt19937_64 gen(13);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const RealVector x = random_vector(gen, 25);
    const double eps = u(gen);
    const double j = smoothed_objective(x, eps);
    const double l1 = x.lpNorm<1>();
    EXPECT_GE(j, l1 * (1 - 1e-12));
    EXPECT_LE(j, (l1 + 25 * eps) * (1 + 1e-12));
  }
}

TEST(WeightVector, RejectsNonpositiveAndNonfinite) {
  EXPECT_THROW(WeightVector(vec({1, 0})), std::invalid_argument);
  EXPECT_THROW(WeightVector(vec({1, -2})), std::invalid_argument);
  EXPECT_THROW(WeightVector(vec({1, std::nan("")})), std::invalid_argument);
  EXPECT_THROW(WeightVector(vec({INFINITY})), std::invalid_argument);
  EXPECT_NO_THROW(WeightVector(vec({1e-300, 5})));
}

TEST(WeightedInner, Examples) {
  EXPECT_DOUBLE_EQ(weighted_inner(vec({1, 1}), vec({1, 1}), WeightVector(vec({1, 4}))), 5.0);
  EXPECT_DOUBLE_EQ(weighted_inner(vec({1, 0}), vec({0, 1}), WeightVector(vec({3, 7}))), 0.0);
  EXPECT_DOUBLE_EQ(
      weighted_inner(vec({2, 3}), vec({1, -1}), WeightVector(vec({0.5, 2}))), -5.0);
  EXPECT_DOUBLE_EQ(weighted_norm(vec({1, 1}), WeightVector(vec({1, 4}))), std::sqrt(5.0));
}

TEST(WeightedInner, LengthMismatchRejected) {
  EXPECT_THROW(weighted_inner(vec({1, 2}), vec({1}), WeightVector(vec({1, 1}))),
               std::invalid_argument);
  EXPECT_THROW(weighted_inner(vec({1, 2}), vec({1, 2}), WeightVector(vec({1}))),
               std::invalid_argument);
}

TEST(WeightedInner, SymmetricAndPositive) {
  std::mt19937_64 gen(14);
  for (int trial = 0; trial < 50; ++trial) {
    const RealVector u = random_vector(gen, 12);
    const RealVector v = random_vector(gen, 12);
    const WeightVector w = random_weights(gen, 12);
    EXPECT_NEAR(weighted_inner(u, v, w), weighted_inner(v, u, w), 1e-12);
    EXPECT_GT(weighted_inner(u, u, w), 0.0);
  }
  EXPECT_EQ(weighted_inner(RealVector::Zero(3), RealVector::Zero(3),
                           WeightVector(vec({1, 2, 3}))),
            0.0);
}

TEST(ConstrainedWeightedLs, Examples) {
  DenseMatrix phi(1, 2);
  phi << 1, 1;
  const RealVector y = vec({2});
  const RealVector even = constrained_weighted_ls(phi, y, WeightVector(vec({1, 1})));
  EXPECT_NEAR(even[0], 1.0, 1e-14);
  EXPECT_NEAR(even[1], 1.0, 1e-14);

  // Stationarity 2 x1 = lambda, 8 x2 = lambda with x1 + x2 = 2 gives x1 = 4 x2.
  const RealVector skew = constrained_weighted_ls(phi, y, WeightVector(vec({1, 4})));
  EXPECT_NEAR(skew[0], 8.0 / 5.0, 1e-14);
  EXPECT_NEAR(skew[1], 2.0 / 5.0, 1e-14);

  std::mt19937_64 gen(15);
  const RealVector rhs = random_vector(gen, 6);
  const RealVector id = constrained_weighted_ls(DenseMatrix::Identity(6, 6), rhs,
                                                random_weights(gen, 6));
  EXPECT_LT((id - rhs).lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(ConstrainedWeightedLs, MatchesNormalEquationFormula) {
  std::mt19937_64 gen(16);
  for (int trial = 0; trial < 20; ++trial) {
    const DenseMatrix phi = random_matrix(gen, 8, 20);
    const RealVector y = random_vector(gen, 8);
    const WeightVector w = random_weights(gen, 20);
    const RealVector d = w.entries().cwiseInverse();
    const DenseMatrix gram = phi * d.asDiagonal() * phi.transpose();
    const RealVector oracle = d.asDiagonal() * phi.transpose() * gram.ldlt().solve(y);
    const RealVector x = constrained_weighted_ls(phi, y, w);
    EXPECT_LT((x - oracle).norm(), 1e-9 * (1 + oracle.norm()));
  }
}

TEST(ConstrainedWeightedLs, OrthogonalityAndOptimality) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 30; ++trial) {
    const DenseMatrix phi = random_matrix(gen, 10, 25);
    const RealVector y = random_vector(gen, 10);
    const WeightVector w = random_weights(gen, 25);
    const RealVector xhat = constrained_weighted_ls(phi, y, w);
    EXPECT_LE((phi * xhat - y).lpNorm<Eigen::Infinity>(),
              kFeasibilityTol * (1 + y.lpNorm<Eigen::Infinity>()));

    // Feasible points xhat + (I - P) v with P the projector onto range(Phi^T).
    const Eigen::JacobiSVD<DenseMatrix> svd(phi, Eigen::ComputeFullV);
    const DenseMatrix null_basis = svd.matrixV().rightCols(15);
    for (int k = 0; k < 5; ++k) {
      const RealVector x = xhat + null_basis * random_vector(gen, 15);
      const RealVector diff = x - xhat;
      EXPECT_LE(std::fabs(weighted_inner(xhat, diff, w)),
                1e-8 * weighted_norm(xhat, w) * weighted_norm(diff, w));
      EXPECT_LE(weighted_inner(xhat, xhat, w), weighted_inner(x, x, w));
    }
  }
}

TEST(ConstrainedWeightedLs, RankDeficientSystemIsSingular) {
  DenseMatrix phi(2, 3);
  phi << 1, 2, 3,
         2, 4, 6;
  try {
    constrained_weighted_ls(phi, vec({1, 2}), WeightVector(vec({1, 1, 1})));
    FAIL() << "expected SingularSystemError";
  } catch (const SingularSystemError& e) {
    EXPECT_EQ(e.pivot(), 1);
  }
}

TEST(ConstrainedWeightedLs, ShapeMismatchRejected) {
  DenseMatrix phi(2, 3);
  phi.setOnes();
  EXPECT_THROW(constrained_weighted_ls(phi, vec({1, 2, 3}), WeightVector(vec({1, 1, 1}))),
               std::invalid_argument);
  EXPECT_THROW(constrained_weighted_ls(phi, vec({1, 2}), WeightVector(vec({1, 1}))),
               std::invalid_argument);
}

TEST(WeightedRegressionLs, Examples) {
  DenseMatrix a(2, 1);
  a << 1, 1;
  EXPECT_NEAR(weighted_regression_ls(a, vec({0, 2}), WeightVector(vec({1, 1})))[0], 1.0,
              1e-15);
  // Weighted mean (3 * 0 + 1 * 2) / 4.
  EXPECT_NEAR(weighted_regression_ls(a, vec({0, 2}), WeightVector(vec({3, 1})))[0], 0.5,
              1e-15);

  std::mt19937_64 gen(18);
  const DenseMatrix tall = random_matrix(gen, 30, 6);
  const RealVector z0 = random_vector(gen, 6);
  const RealVector z = weighted_regression_ls(tall, tall * z0, random_weights(gen, 30));
  EXPECT_LT((z - z0).norm(), 1e-12 * (1 + z0.norm()));
}

TEST(WeightedRegressionLs, Stationarity) {
  std::mt19937_64 gen(19);
  for (int trial = 0; trial < 30; ++trial) {
    const DenseMatrix a = random_matrix(gen, 40, 7);
    const RealVector b = random_vector(gen, 40);
    const WeightVector theta = random_weights(gen, 40);
    const RealVector z = weighted_regression_ls(a, b, theta);
    const RealVector grad =
        a.transpose() * theta.entries().asDiagonal() * (a * z - b);
    const double scale = (a.transpose() * theta.entries().asDiagonal()).cwiseAbs().maxCoeff() *
                         (a.cwiseAbs() * z.cwiseAbs() + b.cwiseAbs()).maxCoeff();
    EXPECT_LE(grad.lpNorm<Eigen::Infinity>(), 1e-8 * scale);
  }
}

TEST(WeightedRegressionLs, RankDeficientIsSingular) {
  DenseMatrix a(3, 2);
  a << 1, 2,
       1, 2,
       1, 2;
  EXPECT_THROW(weighted_regression_ls(a, vec({1, 2, 3}), WeightVector(vec({1, 1, 1}))),
               SingularSystemError);
}

}  // namespace
}  // namespace irlscs
