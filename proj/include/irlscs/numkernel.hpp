#pragma once

// Dense linear algebra and the scalar functionals shared by both IRLS forms.
//
// Storage convention: DenseMatrix is Eigen's default column-major MatrixXd.

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace irlscs {

using DenseMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Raised when a least-squares system has a (numerically) zero pivot.
class SingularSystemError : public std::runtime_error {
 public:
  SingularSystemError(const std::string& what, Eigen::Index pivot)
      : std::runtime_error(what), pivot_(pivot) {}

  Eigen::Index pivot() const { return pivot_; }

 private:
  Eigen::Index pivot_;
};

// Raised when the computed constrained minimizer does not reproduce the data,
// i.e. y was not in the range of Phi.
class InconsistentSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Strictly positive weights defining <u, v>_w = sum_i w_i u_i v_i.
class WeightVector {
 public:
  // Throws std::invalid_argument unless every entry is finite and > 0.
  explicit WeightVector(RealVector entries);

  const RealVector& entries() const { return entries_; }
  Eigen::Index size() const { return entries_.size(); }
  double operator[](Eigen::Index i) const { return entries_[i]; }

 private:
  RealVector entries_;
};

// Relative pivot size below which a factorization is declared singular. The
// test is applied to the diagonal of the triangular factor.
inline constexpr double kSingularPivotRatio = 1e-12;

// Feasibility post-check: ||Phi x - y||_inf <= kFeasibilityTol * (1 + ||y||_inf).
inline constexpr double kFeasibilityTol = 1e-8;

// r(x): absolute values of x sorted nonincreasing.
RealVector nonincreasing_rearrangement(const RealVector& x);

// r_i(x), 1-based as in the usual notation (i in [1, N]).
double rearranged_entry(const RealVector& x, std::size_t i);

// sigma_j(x) = sum_{nu > j} r_nu(x). sigma_0 is the l1 norm, sigma_N is 0.
double sigma_tail(const RealVector& x, std::size_t j);

bool is_sparse(const RealVector& x, std::size_t order);

// J(x, eps) = sum_i sqrt(x_i^2 + eps^2).
double smoothed_objective(const RealVector& x, double eps);

double weighted_inner(const RealVector& u, const RealVector& v,
                      const WeightVector& w);
double weighted_norm(const RealVector& u, const WeightVector& w);

// argmin { ||x||_w^2 : Phi x = y } = D Phi^T (Phi D Phi^T)^{-1} y, D = diag(1/w).
//
// Computed from a Householder QR of D^{1/2} Phi^T, whose R factor satisfies
// R^T R = Phi D Phi^T. Throws SingularSystemError when Phi D Phi^T is
// rank deficient, InconsistentSystemError when the result violates Phi x = y,
// and std::invalid_argument on shape mismatch.
RealVector constrained_weighted_ls(const DenseMatrix& phi, const RealVector& y,
                                   const WeightVector& w);

// argmin_z sum_i theta_i (a_i^T z - b_i)^2, i.e. the solution of
// (A^T diag(theta) A) z = A^T diag(theta) b, via QR of diag(sqrt(theta)) A.
RealVector weighted_regression_ls(const DenseMatrix& a, const RealVector& b,
                                  const WeightVector& theta);

}  // namespace irlscs
