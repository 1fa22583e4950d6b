#pragma once

// Portable seeded randomness. std::mt19937_64 has a fully specified output
// sequence; the standard distributions do not, so the conversions to uniform
// and normal variates are defined here:
//
//   uniform(): (next_u64() >> 11) * 2^-53, in [0, 1).
//   normal():  Marsaglia polar method on u, v = 2 * uniform() - 1, rejecting
//              s = u^2 + v^2 outside (0, 1); returns u * f and caches v * f,
//              f = sqrt(-2 ln s / s).

#include "irlscs/numkernel.hpp"

#include <cstdint>
#include <optional>
#include <random>

namespace irlscs {

inline constexpr std::uint64_t kDefaultSeed = 20240101;

// SplitMix64 finalizer, used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t value);

class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Stream for trial `stream` of a run seeded with `master`.
  static Rng for_stream(std::uint64_t master, std::uint64_t stream);

  std::uint64_t next_u64() { return engine_(); }
  double uniform();
  double normal();

  RealVector normal_vector(Eigen::Index n, double std_dev = 1.0);
  // Column-major fill.
  DenseMatrix normal_matrix(Eigen::Index rows, Eigen::Index cols,
                            double std_dev = 1.0);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

}  // namespace irlscs
