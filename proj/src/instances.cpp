#include "irlscs/instances.hpp"

#include "irlscs/matrix_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace irlscs {
namespace {

void require_block_size(int k) {
  if (k < 1) {
    throw std::invalid_argument("block size k must be >= 1, got " +
                                std::to_string(k));
  }
}

RealVector tilde_e(int k) {
  RealVector e = RealVector::Zero(k * (2 * k + 1));
  for (int j = 0; j < k; ++j) e[j * k] = 1.0;
  return e;
}

std::string fmt(double v) { return format_real(v); }

}  // namespace

double critical_gamma(int k) {
  require_block_size(k);
  const double c = static_cast<double>(k) * (2.0 * k + 1.0);
  const double four_c2 = 4.0 * c * c;
  return std::sqrt((four_c2 + 1.0) / (four_c2 + 4.0));
}

DenseMatrix build_tilde_A(int k) {
  require_block_size(k);
  DenseMatrix a(k * (2 * k + 1), k);
  for (int block = 0; block < 2 * k + 1; ++block) {
    a.middleRows(block * k, k).setIdentity();
  }
  return a;
}

DenseMatrix build_A_gamma(int k, double gamma) {
  require_block_size(k);
  const double lower = static_cast<double>(k) / (k + 1);
  if (!(gamma > lower && gamma < 1.0)) {
    std::ostringstream msg;
    msg << "gamma = " << gamma << " must lie in (k/(k+1), 1) = (" << lower
        << ", 1)";
    throw std::invalid_argument(msg.str());
  }
  DenseMatrix a = build_tilde_A(k);
  const double alpha = gamma * (k + 1) / k;
  for (int i = 0; i < k; ++i) a(i * k, 0) = alpha;
  return a;
}

RegressionInstance build_failure_family(int k, double gamma, double delta,
                                        const RealVector& z_star) {
  if (z_star.size() != k) {
    throw std::invalid_argument("z* must have length k = " + std::to_string(k));
  }
  RegressionInstance out;
  out.a = build_A_gamma(k, gamma);
  out.b = out.a * z_star + delta * tilde_e(k);
  out.z_star = z_star;
  return out;
}

RealVector random_positive_z_star(int k, Rng& rng) {
  require_block_size(k);
  return rng.normal_vector(k).cwiseAbs().array() + 0.1;
}

CounterexampleInstance build_counterexample(CounterexampleParams params,
                                            double z0_position) {
  const int k = params.k;
  require_block_size(k);
  const double c = static_cast<double>(k) * (2.0 * k + 1.0);

  CounterexampleInstance out;
  out.nu = critical_gamma(k);
  const double gamma = params.gamma;
  if (!(gamma >= out.nu && gamma < 1.0)) {
    std::ostringstream msg;
    msg << "gamma = " << fmt(gamma) << " violates nu(k) <= gamma < 1 with nu("
        << k << ") = " << fmt(out.nu);
    throw std::invalid_argument(msg.str());
  }
  if (!params.delta) params.delta = c;
  const double delta = *params.delta;
  if (!(delta > 0.0 && delta <= c)) {
    std::ostringstream msg;
    msg << "delta = " << fmt(delta) << " violates 0 < delta <= k(2k+1) = " << c;
    throw std::invalid_argument(msg.str());
  }
  if (params.z_star.size() != k) {
    throw std::invalid_argument("z* must have length k = " + std::to_string(k));
  }
  if (!(z0_position >= 0.0 && z0_position <= 1.0)) {
    throw std::invalid_argument("z0 position must lie in [0, 1]");
  }
  if ((params.z_star.array() <= 0.0).any()) {
    for (Eigen::Index i = 0; i < k; ++i) {
      if (params.z_star[i] <= 0.0) params.z_star[i] = std::abs(params.z_star[i]) + 0.1;
    }
    out.problem.notes.push_back(
        "z* had nonpositive entries; replaced them by |z_i| + 0.1");
  }

  out.alpha = gamma * (k + 1) / k;
  out.xi = gamma * std::sqrt(1.0 + 1.0 / (c * c));
  out.s_star = c * std::sqrt(out.xi * out.xi - 1.0);
  if (!(out.alpha > 1.0)) {
    throw std::logic_error("derived inequality alpha > 1 fails: alpha = " +
                           fmt(out.alpha));
  }
  if (!(out.xi > 1.0)) {
    throw std::logic_error("derived inequality xi > 1 fails: xi = " +
                           fmt(out.xi));
  }
  if (!(gamma / out.s_star > 1.0)) {
    throw std::logic_error(
        "derived inequality gamma / (k(2k+1) sqrt(xi^2 - 1)) > 1 fails: " +
        fmt(gamma / out.s_star));
  }

  RegressionInstance family =
      build_failure_family(k, gamma, delta, params.z_star);
  family.notes.insert(family.notes.begin(), out.problem.notes.begin(),
                      out.problem.notes.end());
  out.problem = std::move(family);

  const double z1 = params.z_star[0];
  out.z0_lower = z1 + delta / (out.alpha + gamma / out.s_star);
  out.z0_upper = z1 + delta / (out.alpha + 1.0);
  out.z0_position = z0_position;
  out.z0 = params.z_star;
  out.z0[0] = out.z0_lower + z0_position * (out.z0_upper - out.z0_lower);
  out.limit_gap = delta * out.s_star / (1.0 + out.alpha * out.s_star);
  out.params = std::move(params);
  return out;
}

double failure_ratio(const CounterexampleInstance& instance, double z1) {
  return (z1 - instance.b_pivot()) / (instance.b_first() - instance.alpha * z1);
}

std::vector<OracleStep> scalar_recursion_oracle(
    const CounterexampleInstance& instance, int n_steps) {
  if (n_steps < 0) throw std::invalid_argument("n_steps must be >= 0");
  const double c = instance.block_rows();
  const double delta = *instance.params.delta;
  const double alpha = instance.alpha;
  const double gamma = instance.params.gamma;
  const double z_star1 = instance.params.z_star[0];

  std::vector<OracleStep> out;
  out.reserve(static_cast<std::size_t>(n_steps) + 1);
  const double e0 = instance.z0[0] - z_star1;
  out.push_back({0, e0 / (delta - alpha * e0), 1.0, instance.z0[0]});

  double s = 0.0;
  for (int n = 1; n <= n_steps; ++n) {
    if (n == 1) {
      const double rest = delta - alpha * e0;
      s = gamma * std::sqrt((e0 * e0 + 1.0) / (rest * rest + 1.0));
    } else {
      s = instance.xi * s / std::sqrt(1.0 + s * s / (c * c));
    }
    const double e = delta * s / (1.0 + alpha * s);
    out.push_back({n, s, e / c, z_star1 + e});
  }
  return out;
}

RegressionInstance perturb_counterexample(const CounterexampleInstance& instance,
                                          double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
  RegressionInstance out = instance.problem;
  if (sigma == 0.0) return out;
  Rng rng(seed);
  out.a += rng.normal_matrix(out.a.rows(), out.a.cols(), sigma);
  out.b = out.a * *out.z_star + *instance.params.delta * tilde_e(instance.params.k);
  out.notes.push_back("A perturbed by sigma = " + fmt(sigma) +
                      " times i.i.d. N(0,1), seed " + std::to_string(seed));
  return out;
}

CsInstance random_gaussian_instance(int m, int n, int sparsity,
                                    double value_std, std::uint64_t seed) {
  if (!(sparsity >= 0 && sparsity <= m && m >= 1 && m < n)) {
    throw std::invalid_argument(
        "random_gaussian_instance: need 0 <= sparsity <= m < N");
  }
  if (!(value_std > 0.0)) {
    throw std::invalid_argument("random_gaussian_instance: value_std must be > 0");
  }
  Rng rng(seed);
  CsInstance out;
  out.phi = rng.normal_matrix(m, n);
  RealVector x = RealVector::Zero(n);
  x.head(sparsity) = rng.normal_vector(sparsity, value_std);
  out.y = out.phi * x;
  out.support = support_of(x);
  out.x_star = std::move(x);
  return out;
}

void save_counterexample(const CounterexampleInstance& instance,
                         const std::filesystem::path& dir, std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  const RegressionInstance& p = instance.problem;
  write_matrix_csv(dir / "A.csv", p.a);
  write_vector_csv(dir / "b.csv", p.b);
  write_vector_csv(dir / "zstar.csv", *p.z_star);
  write_vector_csv(dir / "z0.csv", instance.z0);

  const CsInstance cs = to_cs_instance(p);
  write_matrix_csv(dir / "Phi.csv", cs.phi);
  write_vector_csv(dir / "y.csv", cs.y);
  write_vector_csv(dir / "xstar.csv", *cs.x_star);
  write_vector_csv(dir / "x0.csv", RealVector(p.a * instance.z0 - p.b));

  std::ofstream out(dir / "params.txt");
  out << "k = " << instance.params.k << '\n'
      << "gamma = " << fmt(instance.params.gamma) << '\n'
      << "delta = " << fmt(*instance.params.delta) << '\n'
      << "seed = " << seed << '\n'
      << "nu = " << fmt(instance.nu) << '\n'
      << "alpha = " << fmt(instance.alpha) << '\n'
      << "xi = " << fmt(instance.xi) << '\n'
      << "s_star = " << fmt(instance.s_star) << '\n'
      << "limit_gap = " << fmt(instance.limit_gap) << '\n'
      << "z0_lower = " << fmt(instance.z0_lower) << '\n'
      << "z0_upper = " << fmt(instance.z0_upper) << '\n'
      << "z0_position = " << fmt(instance.z0_position) << '\n';
  for (const auto& note : p.notes) out << "# " << note << '\n';
}

void save_cs_instance(const CsInstance& instance,
                      const std::filesystem::path& dir,
                      const std::string& params_text) {
  std::filesystem::create_directories(dir);
  write_matrix_csv(dir / "Phi.csv", instance.phi);
  write_vector_csv(dir / "y.csv", instance.y);
  if (instance.x_star) write_vector_csv(dir / "xstar.csv", *instance.x_star);
  std::ofstream out(dir / "params.txt");
  out << params_text;
}

}  // namespace irlscs
