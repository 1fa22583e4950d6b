#include "irlscs/problem.hpp"

#include <stdexcept>

namespace irlscs {

std::vector<Eigen::Index> support_of(const RealVector& x) {
  std::vector<Eigen::Index> out;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] != 0.0) out.push_back(i);
  }
  return out;
}

CsInstance to_cs_instance(const RegressionInstance& instance) {
  const DenseMatrix& a = instance.a;
  const Eigen::Index n = a.rows();
  const Eigen::Index p = a.cols();
  if (p >= n) {
    throw std::invalid_argument(
        "to_cs_instance: A must have more rows than columns");
  }
  const Eigen::HouseholderQR<DenseMatrix> qr(a);
  const DenseMatrix q = qr.householderQ() * DenseMatrix::Identity(n, n);

  CsInstance out;
  out.phi = q.rightCols(n - p).transpose();
  out.y = -(out.phi * instance.b);
  out.x_star = instance.x_star();
  if (out.x_star) out.support = support_of(*out.x_star);
  return out;
}

}  // namespace irlscs
