#include "irlscs/nsp.hpp"

#include "irlscs/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace irlscs {
namespace {

struct Best {
  double sum = -1.0;
  std::vector<Eigen::Index> support;
};

// Max over all K-subsets of the summed magnitudes, by depth-first enumeration
// with running partial sums.
void enumerate_supports(const std::vector<double>& mags, int order,
                        std::size_t first, double partial,
                        std::vector<Eigen::Index>& chosen, Best& best) {
  if (static_cast<int>(chosen.size()) == order) {
    if (partial > best.sum) {
      best.sum = partial;
      best.support = chosen;
    }
    return;
  }
  const std::size_t remaining = static_cast<std::size_t>(order) - chosen.size();
  for (std::size_t i = first; i + remaining <= mags.size(); ++i) {
    chosen.push_back(static_cast<Eigen::Index>(i));
    enumerate_supports(mags, order, i + 1, partial + mags[i], chosen, best);
    chosen.pop_back();
  }
}

Best largest_entries(const std::vector<double>& mags, int order) {
  std::vector<Eigen::Index> idx(mags.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + order, idx.end(),
                    [&](Eigen::Index l, Eigen::Index r) {
                      return mags[static_cast<std::size_t>(l)] >
                             mags[static_cast<std::size_t>(r)];
                    });
  Best best;
  best.support.assign(idx.begin(), idx.begin() + order);
  std::sort(best.support.begin(), best.support.end());
  best.sum = 0.0;
  for (const auto i : best.support) best.sum += mags[static_cast<std::size_t>(i)];
  return best;
}

}  // namespace

std::uint64_t binomial_saturating(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    acc = acc * (n - k + i) / i;
    if (acc > kMax) return kMax;
  }
  return static_cast<std::uint64_t>(acc);
}

double nsp_ratio(const DenseMatrix& a, const RealVector& z,
                 const std::vector<Eigen::Index>& support) {
  const RealVector v = a * z;
  std::vector<bool> in(static_cast<std::size_t>(v.size()), false);
  for (const auto i : support) in.at(static_cast<std::size_t>(i)) = true;
  double inside = 0.0;
  double outside = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    (in[static_cast<std::size_t>(i)] ? inside : outside) += std::abs(v[i]);
  }
  if (outside == 0.0) return std::numeric_limits<double>::infinity();
  return inside / outside;
}

NspReport nsp_check(const DenseMatrix& a, const NspOptions& options) {
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  if (rows == 0 || cols == 0) throw std::invalid_argument("nsp_check: empty matrix");
  if (options.order < 1 || options.order > rows) {
    throw std::invalid_argument("nsp_check: need 1 <= K <= number of rows");
  }
  if (!(options.gamma > 0.0 && options.gamma < 1.0)) {
    throw std::invalid_argument("nsp_check: gamma must lie in (0, 1)");
  }
  if (options.samples < 0) throw std::invalid_argument("nsp_check: samples < 0");

  NspReport report;
  report.order_K = options.order;
  report.gamma = options.gamma;
  report.samples = options.samples;
  report.exhaustive =
      binomial_saturating(static_cast<std::uint64_t>(rows),
                          static_cast<std::uint64_t>(options.order)) <=
      options.exhaustive_cap;
  report.gamma_estimate = -1.0;

  std::vector<double> mags(static_cast<std::size_t>(rows));
  std::vector<Eigen::Index> chosen;
  chosen.reserve(static_cast<std::size_t>(options.order));

  auto probe = [&](const RealVector& z) {
    const RealVector v = a * z;
    double total = 0.0;
    for (Eigen::Index i = 0; i < rows; ++i) {
      mags[static_cast<std::size_t>(i)] = std::abs(v[i]);
      total += mags[static_cast<std::size_t>(i)];
    }
    Best best;
    if (report.exhaustive) {
      enumerate_supports(mags, options.order, 0, 0.0, chosen, best);
    } else {
      best = largest_entries(mags, options.order);
    }
    const double outside = total - best.sum;
    const double ratio = outside > 0.0 ? best.sum / outside
                                       : std::numeric_limits<double>::infinity();
    if (ratio > report.gamma_estimate) {
      report.gamma_estimate = ratio;
      report.witness_z = z;
      report.witness_support = std::move(best.support);
    }
  };

  for (Eigen::Index j = 0; j < cols; ++j) probe(RealVector::Unit(cols, j));

  Rng rng(options.seed);
  for (int s = 0; s < options.samples; ++s) {
    RealVector z = rng.normal_vector(cols);
    const double norm = z.norm();
    if (norm == 0.0) continue;
    probe(z / norm);
  }
  report.passed = report.gamma_estimate <= options.gamma;
  return report;
}

}  // namespace irlscs
