#pragma once

// Iteratively reweighted least squares for basis pursuit, in two ε-update
// flavours sharing one loop:
//
//   kDdfg:     eps_{n+1} = min(eps_n, r_{K+1}(x^{n+1}) / N)
//   kModified: eps_{n+1} = min(eps_n, eta (1 - gamma) sigma_K(x^{n+1}) / N)
//
// Each iteration computes w^n_i = (x_i^2 + eps_n^2)^{-1/2} and
// x^{n+1} = argmin { ||x||_{w^n}^2 : Phi x = y }. The regression form drives
// the same loop through the residual x^n = A z^n - b.

#include "irlscs/numkernel.hpp"
#include "irlscs/problem.hpp"
#include "irlscs/random.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace irlscs {

enum class Variant { kDdfg, kModified };

enum class Status {
  kRunning,
  kEpsZero,
  kStepTol,
  kMaxIter,
  // Ground-truth error dropped below IrlsConfig::success_tol.
  kTargetReached,
};

std::string_view to_string(Variant v);
std::string_view to_string(Status s);
Variant parse_variant(std::string_view text);

struct IrlsConfig {
  Variant variant = Variant::kModified;
  // NSP order K. Unset means floor(N / 2).
  std::optional<int> order;
  double gamma = 0.9;
  double eta = 0.9;
  // Replaces eta * (1 - gamma) in the modified update when set.
  std::optional<double> eta_one_minus_gamma;
  double eps0 = 1.0;
  int max_iter = 100000;
  // Stop once ||x^{n+1} - x^n||_2 <= step_tol.
  double step_tol = 1e-10;
  // Stop once ||x^n - x*||_2 <= success_tol (needs ground truth). Off when unset.
  std::optional<double> success_tol;
  // Keep every m-th iterate vector in the trace (plus the final one).
  int iterate_stride = 1;
  // Recorded with outputs; the solver itself draws no random numbers.
  std::uint64_t seed = kDefaultSeed;

  int resolved_order(Eigen::Index n) const;
  double modified_factor() const;
  // Throws std::invalid_argument on out-of-range parameters.
  void validate(Eigen::Index n) const;
};

// "key = value" lines for every field, resolved against N when given.
std::string describe(const IrlsConfig& config,
                     std::optional<Eigen::Index> n = std::nullopt);

struct IterationRecord {
  int n = 0;
  double eps = 0.0;
  // J(x^n, eps_n).
  double objective = 0.0;
  // Distance to ground truth; NaN without one.
  double err1 = 0.0;
  double err2 = 0.0;
  // ||x^n - x^{n-1}||_{w^{n-1}}, the weighted length of the step producing
  // x^n; 0 for n = 0.
  double step_w = 0.0;
  Status status = Status::kRunning;
};

struct StoredIterate {
  int n = 0;
  RealVector x;
  // Regression coefficients z^n; empty for the compressed-sensing form.
  RealVector z;
};

struct IterationTrace {
  std::vector<IterationRecord> records;
  std::vector<StoredIterate> iterates;
};

struct IrlsResult {
  RealVector final_x;
  std::optional<RealVector> final_z;
  IterationTrace trace;
  Status status = Status::kRunning;
  int iterations_used = 0;
};

// Called after x^n and eps_n are known, for n = 0, 1, ...
struct IterateView {
  int n;
  const RealVector& x;
  const RealVector* z;
  double eps;
};
using IterationObserver = std::function<void(const IterateView&)>;

WeightVector weights_from_iterate(const RealVector& x, double eps);

double eps_update_ddfg(double eps, const RealVector& x_next, int order);
double eps_update_modified(double eps, const RealVector& x_next, int order,
                           double gamma, double eta);
// Same rule parameterised by the single product eta * (1 - gamma).
double eps_update_modified_product(double eps, const RealVector& x_next,
                                   int order, double factor);

// x0 defaults to the minimum l2-norm point of Phi x = y.
IrlsResult run_irls_cs(const CsInstance& instance, const IrlsConfig& config,
                       const std::optional<RealVector>& x0 = std::nullopt,
                       const IterationObserver& observer = {});

// z0 defaults to the ordinary least-squares fit.
IrlsResult run_irls_l1r(const RegressionInstance& instance,
                        const IrlsConfig& config,
                        const std::optional<RealVector>& z0 = std::nullopt,
                        const IterationObserver& observer = {});

// CSV with header n,eps,J,err1,err2,step_w,status.
void write_trace_csv(std::ostream& out, const IterationTrace& trace);

struct LinearRateReport {
  bool entered_local_regime = false;
  int n0 = -1;
  double mu = 0.0;
  // Pairs (n, n + g) of stored iterates checked against mu^g.
  int pairs_checked = 0;
  int violations = 0;
  double worst_ratio = 0.0;
  bool holds = false;
  std::string message;
};

// Locates the first stored n0 with ||(x^{n0} - x*)_{T^c}||_1 <= rho min_T |x*_i|
// and checks ||(x^{n+1} - x*)_{T^c}||_1 <= mu ||(x^n - x*)_{T^c}||_1 from
// there on, mu = gamma (1 + eta (1 - gamma)) / (1 - rho). Errors at or below
// `floor` count as converged.
LinearRateReport linear_rate_certificate(const IterationTrace& trace,
                                         const RealVector& x_star,
                                         const std::vector<Eigen::Index>& support,
                                         double gamma, double eta, double rho,
                                         double floor = 1e-12);

// Compares ||z - z'||_1 with c [||z'||_1 - ||z||_1 + 2 sigma_K(z)] for
// c = (1 - gamma)/(1 + gamma) and its reciprocal. Diagnostic only.
struct DistanceBoundCheck {
  double lhs = 0.0;
  double bracket = 0.0;
  bool holds_small_constant = false;
  bool holds_large_constant = false;
};
DistanceBoundCheck check_l1_distance_bound(const RealVector& z,
                                           const RealVector& z_prime, int order,
                                           double gamma);

}  // namespace irlscs
