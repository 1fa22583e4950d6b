#pragma once

// Sampling-based check of the null space property in its regression form:
//   ||(A z)_T||_1 <= gamma ||(A z)_{T^c}||_1  for all z and all |T| <= K.
//
// The check is one-sided: a ratio above gamma refutes the property, while a
// pass is only evidence. Probes are the coordinate vectors e_1..e_p followed
// by `samples` random unit vectors.

#include "irlscs/numkernel.hpp"

#include <cstdint>
#include <vector>

namespace irlscs {

struct NspOptions {
  int order = 1;
  double gamma = 0.5;
  int samples = 10000;
  // Enumerate every support of size K when binomial(N, K) <= cap; otherwise
  // use the K largest |(Az)_i|, which maximise the ratio for that z.
  std::uint64_t exhaustive_cap = 100000;
  std::uint64_t seed = 1;
};

struct NspReport {
  int order_K = 0;
  double gamma = 0.0;
  // Largest observed ratio; +inf when ||(Az)_{T^c}||_1 = 0 was encountered.
  double gamma_estimate = 0.0;
  // Random probes drawn (coordinate probes not counted).
  int samples = 0;
  bool exhaustive = false;
  bool passed = false;
  RealVector witness_z;
  std::vector<Eigen::Index> witness_support;
};

// Ratio ||(Az)_T||_1 / ||(Az)_{T^c}||_1 for one probe and support.
double nsp_ratio(const DenseMatrix& a, const RealVector& z,
                 const std::vector<Eigen::Index>& support);

NspReport nsp_check(const DenseMatrix& a, const NspOptions& options);

// Number of K-subsets of an N-set, saturating at UINT64_MAX.
std::uint64_t binomial_saturating(std::uint64_t n, std::uint64_t k);

}  // namespace irlscs
