#pragma once

// Problem constructors, most importantly the l1-regression family on which
// DDFG-IRLS provably stalls.
//
// Family layout for block size k (c := k(2k+1) rows, k columns):
//   tilde_A = 2k+1 stacked k x k identities.
//   A_gamma = tilde_A with entry (ik, 0), 0 <= i < k (0-based), replaced by
//             alpha = gamma (k+1)/k.
//   b       = A_gamma z* + delta e~, e~ = sum_{j<k} e_{jk}.
// The residual x* = A_gamma z* - b = -delta e~ is k-sparse.

#include "irlscs/numkernel.hpp"
#include "irlscs/problem.hpp"
#include "irlscs/random.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace irlscs {

// nu(k) = sqrt((4c^2 + 1) / (4c^2 + 4)), c = k(2k+1).
double critical_gamma(int k);

DenseMatrix build_tilde_A(int k);

// gamma must lie in (k/(k+1), 1).
DenseMatrix build_A_gamma(int k, double gamma);

// A_gamma, b = A_gamma z* + delta e~ with z* as given. Only the shape
// requirements of A_gamma are enforced.
RegressionInstance build_failure_family(int k, double gamma, double delta,
                                        const RealVector& z_star);

// |N(0, 1)| + 0.1 entrywise, so that z* is strictly positive.
RealVector random_positive_z_star(int k, Rng& rng);

struct CounterexampleParams {
  int k = 5;
  double gamma = 0.0;
  // Defaults to k(2k+1).
  std::optional<double> delta;
  RealVector z_star;
};

struct CounterexampleInstance {
  CounterexampleParams params;
  RegressionInstance problem;
  RealVector z0;
  double alpha = 0.0;
  double xi = 0.0;
  double nu = 0.0;
  // Endpoints of the admissible open interval for z0_1.
  double z0_lower = 0.0;
  double z0_upper = 0.0;
  double z0_position = 0.5;
  // s* = k(2k+1) sqrt(xi^2 - 1), the fixed point of the failure dynamics.
  double s_star = 0.0;
  // lim z^n_1 - z*_1 = delta s* / (1 + alpha s*).
  double limit_gap = 0.0;

  int block_rows() const { return params.k * (2 * params.k + 1); }
  double b_first() const { return problem.b[0]; }
  // b entry of the first row of block k, equal to z*_1.
  double b_pivot() const { return problem.b[params.k * params.k]; }
};

// Validates gamma in [nu(k), 1), delta in (0, k(2k+1)], and z* of length k.
// Nonpositive entries of z* are replaced by |z_i| + 0.1 and a note is added.
// z0_1 = lower + z0_position (upper - lower), z0_i = z*_i for i >= 2.
// Throws std::invalid_argument on parameter violations and std::logic_error
// if the derived inequalities alpha > 1, xi > 1, gamma / s* > 1 fail.
CounterexampleInstance build_counterexample(CounterexampleParams params,
                                            double z0_position = 0.5);

// s_n = (z^n_1 - b_pivot) / (b_first - alpha z^n_1).
double failure_ratio(const CounterexampleInstance& instance, double z1);

struct OracleStep {
  int n = 0;
  double s = 0.0;
  double eps = 0.0;
  double z1 = 0.0;
};

// Closed-form failure dynamics for DDFG-IRLS started at instance.z0 with
// eps_0 = 1: s_0 = e_0/(delta - alpha e_0) with e_0 = z0_1 - z*_1,
// s_1 = gamma sqrt((e_0^2 + 1)/((delta - alpha e_0)^2 + 1)),
// s_{n+1} = xi s_n / sqrt(1 + s_n^2 / c^2), and for n >= 1
// e_n = delta s_n / (1 + alpha s_n), eps_n = e_n / c, z1_n = z*_1 + e_n.
std::vector<OracleStep> scalar_recursion_oracle(
    const CounterexampleInstance& instance, int n_steps);

// A_gamma + sigma R with R i.i.d. N(0, 1), and b rebuilt from the same z*.
RegressionInstance perturb_counterexample(const CounterexampleInstance& instance,
                                          double sigma, std::uint64_t seed);

// Phi i.i.d. N(0, 1) (drawn column-major first), x* supported on the first
// `sparsity` coordinates with N(0, value_std^2) entries, y = Phi x*.
CsInstance random_gaussian_instance(int m, int n, int sparsity,
                                    double value_std, std::uint64_t seed);

// Writes A.csv, b.csv, zstar.csv, z0.csv, Phi.csv, y.csv, xstar.csv, x0.csv
// and params.txt into `dir` (created if missing).
void save_counterexample(const CounterexampleInstance& instance,
                         const std::filesystem::path& dir, std::uint64_t seed);

// Phi.csv, y.csv, xstar.csv (when known), params.txt.
void save_cs_instance(const CsInstance& instance,
                      const std::filesystem::path& dir,
                      const std::string& params_text);

}  // namespace irlscs
