#include "irlscs/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

namespace irlscs {
namespace {

void require_finite(const Eigen::Ref<const Eigen::MatrixXd>& m,
                    const char* what) {
  if (!m.allFinite()) {
    throw std::invalid_argument(std::string(what) +
                                " contains non-finite entries");
  }
}

std::vector<double> absolute_values(const RealVector& x) {
  std::vector<double> out(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    out[static_cast<std::size_t>(i)] = std::abs(x[i]);
  }
  return out;
}

// Rejects triangular factors with a relatively tiny diagonal entry.
void check_triangular_factor(const Eigen::Ref<const Eigen::MatrixXd>& packed,
                             Eigen::Index n, const char* system) {
  const auto diag = packed.diagonal().head(n).cwiseAbs();
  const double largest = diag.maxCoeff();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!std::isfinite(diag[j]) || !(diag[j] > kSingularPivotRatio * largest)) {
      std::ostringstream msg;
      msg << system << " is singular: pivot " << j << " has |R_jj| = "
          << diag[j] << " against largest " << largest;
      throw SingularSystemError(msg.str(), j);
    }
  }
}

}  // namespace

WeightVector::WeightVector(RealVector entries) : entries_(std::move(entries)) {
  for (Eigen::Index i = 0; i < entries_.size(); ++i) {
    if (!std::isfinite(entries_[i]) || !(entries_[i] > 0.0)) {
      std::ostringstream msg;
      msg << "weight " << i << " = " << entries_[i]
          << " is not a finite positive number";
      throw std::invalid_argument(msg.str());
    }
  }
}

RealVector nonincreasing_rearrangement(const RealVector& x) {
  if (x.size() == 0) {
    throw std::invalid_argument("nonincreasing_rearrangement: empty vector");
  }
  std::vector<double> values = absolute_values(x);
  std::sort(values.begin(), values.end(), std::greater<>());
  return Eigen::Map<RealVector>(values.data(), x.size());
}

double rearranged_entry(const RealVector& x, std::size_t i) {
  const auto n = static_cast<std::size_t>(x.size());
  if (i == 0 || i > n) {
    throw std::invalid_argument("rearranged_entry: index " + std::to_string(i) +
                                " outside [1, " + std::to_string(n) + "]");
  }
  std::vector<double> values = absolute_values(x);
  auto nth = values.begin() + static_cast<std::ptrdiff_t>(i - 1);
  std::nth_element(values.begin(), nth, values.end(), std::greater<>());
  return *nth;
}

double sigma_tail(const RealVector& x, std::size_t j) {
  const auto n = static_cast<std::size_t>(x.size());
  if (j > n) {
    throw std::invalid_argument("sigma_tail: j = " + std::to_string(j) +
                                " exceeds length " + std::to_string(n));
  }
  if (j == n) return 0.0;
  std::vector<double> values = absolute_values(x);
  // The tail is the n - j smallest magnitudes; summing them smallest first.
  auto split = values.begin() + static_cast<std::ptrdiff_t>(n - j);
  std::nth_element(values.begin(), split, values.end());
  std::sort(values.begin(), split);
  double sum = 0.0;
  for (auto it = values.begin(); it != split; ++it) sum += *it;
  return sum;
}

bool is_sparse(const RealVector& x, std::size_t order) {
  return static_cast<std::size_t>((x.array() != 0.0).count()) <= order;
}

double smoothed_objective(const RealVector& x, double eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) {
    throw std::invalid_argument("smoothed_objective: eps must be finite, >= 0");
  }
  require_finite(x, "smoothed_objective: x");
  const double eps2 = eps * eps;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    sum += std::sqrt(x[i] * x[i] + eps2);
  }
  return sum;
}

double weighted_inner(const RealVector& u, const RealVector& v,
                      const WeightVector& w) {
  if (u.size() != v.size() || u.size() != w.size()) {
    throw std::invalid_argument("weighted_inner: length mismatch");
  }
  return (w.entries().array() * u.array() * v.array()).sum();
}

double weighted_norm(const RealVector& u, const WeightVector& w) {
  return std::sqrt(weighted_inner(u, u, w));
}

RealVector constrained_weighted_ls(const DenseMatrix& phi, const RealVector& y,
                                   const WeightVector& w) {
  const Eigen::Index m = phi.rows();
  const Eigen::Index n = phi.cols();
  if (m == 0 || n == 0 || y.size() != m || w.size() != n) {
    throw std::invalid_argument(
        "constrained_weighted_ls: expected Phi m x N, y of length m, w of "
        "length N");
  }
  if (m > n) {
    throw SingularSystemError(
        "constrained_weighted_ls: Phi has more rows than columns", n);
  }
  require_finite(phi, "constrained_weighted_ls: Phi");
  require_finite(y, "constrained_weighted_ls: y");

  const RealVector d_half = w.entries().cwiseSqrt().cwiseInverse();
  // N x m, with M^T M = Phi D Phi^T.
  const DenseMatrix scaled = d_half.asDiagonal() * phi.transpose();
  const Eigen::HouseholderQR<DenseMatrix> qr(scaled);
  check_triangular_factor(qr.matrixQR(), m, "Phi D Phi^T");

  const auto r = qr.matrixQR().topLeftCorner(m, m).triangularView<Eigen::Upper>();
  RealVector t = RealVector::Zero(n);
  t.head(m) = r.transpose().solve(y);
  const RealVector u = qr.householderQ() * t;
  RealVector x = d_half.cwiseProduct(u);

  const double residual = (phi * x - y).lpNorm<Eigen::Infinity>();
  const double bound =
      kFeasibilityTol * (1.0 + (m > 0 ? y.lpNorm<Eigen::Infinity>() : 0.0));
  if (!(residual <= bound)) {
    std::ostringstream msg;
    msg << "constrained_weighted_ls: ||Phi x - y||_inf = " << residual
        << " exceeds " << bound;
    throw InconsistentSystemError(msg.str());
  }
  return x;
}

RealVector weighted_regression_ls(const DenseMatrix& a, const RealVector& b,
                                  const WeightVector& theta) {
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  if (rows == 0 || cols == 0 || b.size() != rows || theta.size() != rows) {
    throw std::invalid_argument(
        "weighted_regression_ls: expected A N x p, b and theta of length N");
  }
  if (cols > rows) {
    throw SingularSystemError(
        "weighted_regression_ls: A has more columns than rows", rows);
  }
  require_finite(a, "weighted_regression_ls: A");
  require_finite(b, "weighted_regression_ls: b");

  const RealVector root = theta.entries().cwiseSqrt();
  const DenseMatrix scaled = root.asDiagonal() * a;
  const Eigen::HouseholderQR<DenseMatrix> qr(scaled);
  check_triangular_factor(qr.matrixQR(), cols, "A^T diag(theta) A");

  const RealVector rhs = qr.householderQ().transpose() * root.cwiseProduct(b);
  return qr.matrixQR()
      .topLeftCorner(cols, cols)
      .triangularView<Eigen::Upper>()
      .solve(rhs.head(cols));
}

}  // namespace irlscs
