#include "irlscs/random.hpp"

#include <cmath>

namespace irlscs {

std::uint64_t mix_seed(std::uint64_t value) {
  value += 0x9e3779b97f4a7c15ULL;
  value = (value ^ (value >> 30)) * 0xbf58476d1ce4e5b9ULL;
  value = (value ^ (value >> 27)) * 0x94d049bb133111ebULL;
  return value ^ (value >> 31);
}

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

Rng Rng::for_stream(std::uint64_t master, std::uint64_t stream) {
  return Rng(mix_seed(mix_seed(master) ^ mix_seed(stream + 1)));
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (spare_) {
    const double out = *spare_;
    spare_.reset();
    return out;
  }
  double u = 0.0;
  double v = 0.0;
  double s = 0.0;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  return u * f;
}

RealVector Rng::normal_vector(Eigen::Index n, double std_dev) {
  RealVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = std_dev * normal();
  return v;
}

DenseMatrix Rng::normal_matrix(Eigen::Index rows, Eigen::Index cols,
                               double std_dev) {
  DenseMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = std_dev * normal();
  }
  return m;
}

}  // namespace irlscs
