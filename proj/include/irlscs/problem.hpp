#pragma once

#include "irlscs/numkernel.hpp"

#include <optional>
#include <string>
#include <vector>

namespace irlscs {

// Find a sparse x with Phi x = y.
struct CsInstance {
  DenseMatrix phi;
  RealVector y;
  std::optional<RealVector> x_star;
  // Support of x_star (0-based), when known.
  std::optional<std::vector<Eigen::Index>> support;
};

// min_z ||A z - b||_1. When range(A) = Null(Phi) and Phi b = -y, the residual
// x = A z - b ranges over the solution set of Phi x = y.
struct RegressionInstance {
  DenseMatrix a;
  RealVector b;
  std::optional<RealVector> z_star;
  std::vector<std::string> notes;

  // A z* - b, when z* is known.
  std::optional<RealVector> x_star() const {
    if (!z_star) return std::nullopt;
    return RealVector(a * *z_star - b);
  }
};

// Indices of the nonzero entries of x.
std::vector<Eigen::Index> support_of(const RealVector& x);

// Phi whose rows span the orthogonal complement of range(A), so that
// range(A) = Null(Phi), together with y = -Phi b.
CsInstance to_cs_instance(const RegressionInstance& instance);

}  // namespace irlscs
