#include "irlscs/irls.hpp"

#include "irlscs/matrix_io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <utility>

namespace irlscs {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_unit_interval(double value, const char* name) {
  if (!(value > 0.0 && value < 1.0)) {
    std::ostringstream msg;
    msg << name << " = " << value << " must lie in (0, 1)";
    throw std::invalid_argument(msg.str());
  }
}

void require_eps(double eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) {
    throw std::invalid_argument("eps must be finite and >= 0");
  }
}

struct Iterate {
  RealVector x;
  RealVector z;
};

// The loop shared by both forms. `solve` maps weights w^n to the next iterate.
template <class Solve>
IrlsResult run_engine(Iterate current, Solve&& solve,
                      const std::optional<RealVector>& x_star,
                      const IrlsConfig& config,
                      const IterationObserver& observer) {
  const Eigen::Index n_coords = current.x.size();
  config.validate(n_coords);
  if (x_star && x_star->size() != n_coords) {
    throw std::invalid_argument("ground truth length does not match iterate");
  }
  const int order = config.resolved_order(n_coords);

  IrlsResult result;
  auto& trace = result.trace;
  const bool regression = current.z.size() > 0;

  auto record = [&](int n, double eps, double step_w) {
    IterationRecord rec;
    rec.n = n;
    rec.eps = eps;
    rec.objective = smoothed_objective(current.x, eps);
    rec.err1 = x_star ? (current.x - *x_star).lpNorm<1>() : kNaN;
    rec.err2 = x_star ? (current.x - *x_star).norm() : kNaN;
    rec.step_w = step_w;
    trace.records.push_back(rec);
    if (n % config.iterate_stride == 0) {
      trace.iterates.push_back({n, current.x, current.z});
    }
    if (observer) {
      observer(IterateView{n, current.x, regression ? &current.z : nullptr, eps});
    }
  };
  auto reached_target = [&](const IterationRecord& rec) {
    return config.success_tol && x_star && rec.err2 <= *config.success_tol;
  };

  double eps = config.eps0;
  record(0, eps, 0.0);

  Status status = Status::kRunning;
  if (reached_target(trace.records.back())) status = Status::kTargetReached;

  int n = 0;
  while (status == Status::kRunning) {
    if (n >= config.max_iter) {
      status = Status::kMaxIter;
      break;
    }
    // Every path that sets eps to zero stops before the next weight update.
    if (!(eps > 0.0)) throw std::logic_error("IRLS loop reached eps <= 0");
    const WeightVector w = weights_from_iterate(current.x, eps);
    Iterate next = solve(w);

    const double next_eps =
        config.variant == Variant::kDdfg
            ? eps_update_ddfg(eps, next.x, order)
            : eps_update_modified_product(eps, next.x, order,
                                          config.modified_factor());
    const RealVector diff = next.x - current.x;
    const double step_w = weighted_norm(diff, w);
    const double step_2 = diff.norm();

    current = std::move(next);
    eps = next_eps;
    ++n;
    record(n, eps, step_w);

    if (eps == 0.0) {
      status = Status::kEpsZero;
    } else if (reached_target(trace.records.back())) {
      status = Status::kTargetReached;
    } else if (step_2 <= config.step_tol) {
      status = Status::kStepTol;
    } else if (n >= config.max_iter) {
      status = Status::kMaxIter;
    }
  }

  trace.records.back().status = status;
  if (trace.iterates.empty() || trace.iterates.back().n != n) {
    trace.iterates.push_back({n, current.x, current.z});
  }
  result.final_x = std::move(current.x);
  if (regression) result.final_z = std::move(current.z);
  result.status = status;
  result.iterations_used = n;
  return result;
}

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kDdfg: return "ddfg";
    case Variant::kModified: return "modified";
  }
  return "?";
}

std::string_view to_string(Status s) {
  switch (s) {
    case Status::kRunning: return "running";
    case Status::kEpsZero: return "eps_zero";
    case Status::kStepTol: return "step_tol";
    case Status::kMaxIter: return "max_iter";
    case Status::kTargetReached: return "target_reached";
  }
  return "?";
}

Variant parse_variant(std::string_view text) {
  if (text == "ddfg") return Variant::kDdfg;
  if (text == "modified") return Variant::kModified;
  throw std::invalid_argument("unknown variant '" + std::string(text) +
                              "' (expected ddfg or modified)");
}

int IrlsConfig::resolved_order(Eigen::Index n) const {
  return order ? *order : static_cast<int>(n / 2);
}

double IrlsConfig::modified_factor() const {
  return eta_one_minus_gamma ? *eta_one_minus_gamma : eta * (1.0 - gamma);
}

void IrlsConfig::validate(Eigen::Index n) const {
  if (n <= 0) throw std::invalid_argument("problem has no unknowns");
  const int k = resolved_order(n);
  if (k < 0) throw std::invalid_argument("K must be nonnegative");
  if (variant == Variant::kDdfg && k + 1 > n) {
    throw std::invalid_argument("DDFG update needs K + 1 <= N (K = " +
                                std::to_string(k) + ", N = " +
                                std::to_string(n) + ")");
  }
  if (variant == Variant::kModified && k > n) {
    throw std::invalid_argument("K = " + std::to_string(k) + " exceeds N = " +
                                std::to_string(n));
  }
  require_unit_interval(gamma, "gamma");
  require_unit_interval(eta, "eta");
  if (eta_one_minus_gamma) {
    require_unit_interval(*eta_one_minus_gamma, "eta*(1-gamma)");
  }
  if (!(eps0 > 0.0) || !std::isfinite(eps0)) {
    throw std::invalid_argument("eps0 must be finite and > 0");
  }
  if (max_iter <= 0) throw std::invalid_argument("max_iter must be positive");
  if (!(step_tol >= 0.0)) throw std::invalid_argument("step_tol must be >= 0");
  if (success_tol && !(*success_tol >= 0.0)) {
    throw std::invalid_argument("success_tol must be >= 0");
  }
  if (iterate_stride <= 0) {
    throw std::invalid_argument("iterate_stride must be positive");
  }
}

std::string describe(const IrlsConfig& config, std::optional<Eigen::Index> n) {
  std::ostringstream out;
  out << "variant = " << to_string(config.variant) << '\n';
  out << "K = ";
  if (config.order) {
    out << *config.order;
  } else if (n) {
    out << config.resolved_order(*n) << "  # floor(N/2), N = " << *n;
  } else {
    out << "floor(N/2)";
  }
  out << '\n';
  out << "gamma = " << format_real(config.gamma) << '\n';
  out << "eta = " << format_real(config.eta) << '\n';
  out << "eta_one_minus_gamma = " << format_real(config.modified_factor());
  if (!config.eta_one_minus_gamma) out << "  # eta*(1-gamma)";
  out << '\n';
  out << "eps0 = " << format_real(config.eps0) << '\n';
  out << "max_iter = " << config.max_iter << '\n';
  out << "step_tol = " << format_real(config.step_tol) << '\n';
  out << "success_tol = "
      << (config.success_tol ? format_real(*config.success_tol) : "off") << '\n';
  out << "iterate_stride = " << config.iterate_stride << '\n';
  out << "seed = " << config.seed << '\n';
  return out.str();
}

WeightVector weights_from_iterate(const RealVector& x, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw std::invalid_argument("weights_from_iterate: eps must be > 0");
  }
  const double eps2 = eps * eps;
  RealVector w(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    w[i] = 1.0 / std::sqrt(x[i] * x[i] + eps2);
  }
  return WeightVector(std::move(w));
}

double eps_update_ddfg(double eps, const RealVector& x_next, int order) {
  require_eps(eps);
  const auto n = x_next.size();
  if (order < 0 || order + 1 > n) {
    throw std::invalid_argument("eps_update_ddfg: need 0 <= K and K + 1 <= N");
  }
  const double candidate =
      rearranged_entry(x_next, static_cast<std::size_t>(order) + 1) /
      static_cast<double>(n);
  return std::min(eps, candidate);
}

double eps_update_modified(double eps, const RealVector& x_next, int order,
                           double gamma, double eta) {
  require_unit_interval(gamma, "gamma");
  require_unit_interval(eta, "eta");
  return eps_update_modified_product(eps, x_next, order, eta * (1.0 - gamma));
}

double eps_update_modified_product(double eps, const RealVector& x_next,
                                   int order, double factor) {
  require_eps(eps);
  require_unit_interval(factor, "eta*(1-gamma)");
  const auto n = x_next.size();
  if (order < 0 || order > n) {
    throw std::invalid_argument("eps_update_modified: need 0 <= K <= N");
  }
  const double candidate =
      factor * sigma_tail(x_next, static_cast<std::size_t>(order)) /
      static_cast<double>(n);
  return std::min(eps, candidate);
}

IrlsResult run_irls_cs(const CsInstance& instance, const IrlsConfig& config,
                       const std::optional<RealVector>& x0,
                       const IterationObserver& observer) {
  const DenseMatrix& phi = instance.phi;
  const RealVector& y = instance.y;
  Iterate start;
  if (x0) {
    if (x0->size() != phi.cols()) {
      throw std::invalid_argument("x0 length does not match Phi");
    }
    start.x = *x0;
  } else {
    start.x = constrained_weighted_ls(
        phi, y, WeightVector(RealVector::Ones(phi.cols())));
  }
  return run_engine(
      std::move(start),
      [&](const WeightVector& w) {
        return Iterate{constrained_weighted_ls(phi, y, w), RealVector()};
      },
      instance.x_star, config, observer);
}

IrlsResult run_irls_l1r(const RegressionInstance& instance,
                        const IrlsConfig& config,
                        const std::optional<RealVector>& z0,
                        const IterationObserver& observer) {
  const DenseMatrix& a = instance.a;
  const RealVector& b = instance.b;
  if (b.size() != a.rows()) {
    throw std::invalid_argument("b length does not match A");
  }
  Iterate start;
  if (z0) {
    if (z0->size() != a.cols()) {
      throw std::invalid_argument("z0 length does not match A");
    }
    start.z = *z0;
  } else {
    start.z = weighted_regression_ls(a, b, WeightVector(RealVector::Ones(a.rows())));
  }
  start.x = a * start.z - b;
  return run_engine(
      std::move(start),
      [&](const WeightVector& w) {
        Iterate next;
        next.z = weighted_regression_ls(a, b, w);
        next.x = a * next.z - b;
        return next;
      },
      instance.x_star(), config, observer);
}

void write_trace_csv(std::ostream& out, const IterationTrace& trace) {
  out << "n,eps,J,err1,err2,step_w,status\n";
  for (const auto& r : trace.records) {
    out << r.n << ',' << format_real(r.eps) << ',' << format_real(r.objective)
        << ',' << format_real(r.err1) << ',' << format_real(r.err2) << ','
        << format_real(r.step_w) << ',' << to_string(r.status) << '\n';
  }
}

LinearRateReport linear_rate_certificate(
    const IterationTrace& trace, const RealVector& x_star,
    const std::vector<Eigen::Index>& support, double gamma, double eta,
    double rho, double floor) {
  require_unit_interval(gamma, "gamma");
  require_unit_interval(eta, "eta");
  const double rho_max = 1.0 - gamma * (1.0 + eta * (1.0 - gamma));
  if (!(rho > 0.0 && rho < rho_max)) {
    std::ostringstream msg;
    msg << "rho = " << rho << " must lie in (0, " << rho_max << ")";
    throw std::invalid_argument(msg.str());
  }

  LinearRateReport report;
  report.mu = gamma * (1.0 + eta * (1.0 - gamma)) / (1.0 - rho);

  std::vector<bool> on_support(static_cast<std::size_t>(x_star.size()), false);
  double smallest = std::numeric_limits<double>::infinity();
  for (const auto i : support) {
    if (i < 0 || i >= x_star.size()) {
      throw std::invalid_argument("support index out of range");
    }
    on_support[static_cast<std::size_t>(i)] = true;
    smallest = std::min(smallest, std::abs(x_star[i]));
  }
  if (support.empty()) smallest = 0.0;
  const double threshold = rho * smallest;

  auto off_support_error = [&](const RealVector& x) {
    if (x.size() != x_star.size()) {
      throw std::invalid_argument("iterate length does not match x*");
    }
    double sum = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (!on_support[static_cast<std::size_t>(i)]) sum += std::abs(x[i] - x_star[i]);
    }
    return sum;
  };

  const auto& its = trace.iterates;
  std::size_t start = its.size();
  std::vector<double> errors(its.size());
  for (std::size_t j = 0; j < its.size(); ++j) {
    errors[j] = off_support_error(its[j].x);
    if (start == its.size() && errors[j] <= threshold) start = j;
  }
  if (start == its.size()) {
    report.message = "not entered local regime";
    return report;
  }
  report.entered_local_regime = true;
  report.n0 = its[start].n;

  for (std::size_t j = start; j + 1 < its.size(); ++j) {
    const int gap = its[j + 1].n - its[j].n;
    const double bound = std::pow(report.mu, gap) * errors[j];
    const double next = errors[j + 1];
    ++report.pairs_checked;
    if (errors[j] > 0.0) {
      report.worst_ratio = std::max(report.worst_ratio, next / errors[j]);
    }
    if (!(next <= bound || next <= floor)) ++report.violations;
  }
  report.holds = report.violations == 0;
  std::ostringstream msg;
  msg << "n0 = " << report.n0 << ", mu = " << format_real(report.mu) << ", "
      << report.pairs_checked << " pairs, " << report.violations
      << " violations, worst ratio " << format_real(report.worst_ratio);
  report.message = msg.str();
  return report;
}

DistanceBoundCheck check_l1_distance_bound(const RealVector& z,
                                           const RealVector& z_prime, int order,
                                           double gamma) {
  require_unit_interval(gamma, "gamma");
  if (z.size() != z_prime.size()) {
    throw std::invalid_argument("check_l1_distance_bound: length mismatch");
  }
  if (order < 0 || order > z.size()) {
    throw std::invalid_argument("check_l1_distance_bound: K out of range");
  }
  DistanceBoundCheck out;
  out.lhs = (z - z_prime).lpNorm<1>();
  out.bracket = z_prime.lpNorm<1>() - z.lpNorm<1>() +
                2.0 * sigma_tail(z, static_cast<std::size_t>(order));
  const double small = (1.0 - gamma) / (1.0 + gamma);
  out.holds_small_constant = out.lhs <= small * out.bracket;
  out.holds_large_constant = out.lhs <= out.bracket / small;
  return out;
}

}  // namespace irlscs
