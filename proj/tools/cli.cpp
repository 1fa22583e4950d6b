#include "cli.hpp"

#include "irlscs/experiments.hpp"
#include "irlscs/instances.hpp"
#include "irlscs/irls.hpp"
#include "irlscs/matrix_io.hpp"
#include "irlscs/nsp.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace irlscs::cli {
namespace {

constexpr const char* kFooter =
    "Exit codes:\n"
    "  0  success (solve: status eps_zero, step_tol or target_reached;\n"
    "     nsp-check: estimate <= gamma; experiment: all trials completed)\n"
    "  1  usage, input, parse, shape or parameter error\n"
    "  2  solve stopped at max_iter\n"
    "  3  nsp-check found a violation witness\n"
    "Randomness is controlled by --seed only; the default seed is 20240101.";

// Solver options shared by `solve` and a key=value config file.
struct SolveFlags {
  std::string phi_path;
  std::string y_path;
  std::optional<std::string> variant;
  std::optional<int> order;
  std::optional<double> gamma;
  std::optional<double> eta;
  std::optional<double> eta_one_minus_gamma;
  std::optional<double> eps0;
  std::optional<int> max_iter;
  std::optional<double> step_tol;
  std::optional<double> success_tol;
  std::optional<std::uint64_t> seed;
  std::string trace_out;
  std::string xstar_path;
  std::string x0_path;
  std::string out_path;
  std::string config_path;
};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(const std::string& text, const std::string& where) {
  std::istringstream in(text);
  T value{};
  in >> value;
  if (!in || !(in >> std::ws).eof()) {
    throw std::invalid_argument(where + ": cannot parse '" + text + "'");
  }
  return value;
}

IrlsConfig read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  IrlsConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = path + ":" + std::to_string(line_no);
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(where + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "variant") {
      config.variant = parse_variant(value);
    } else if (key == "K" || key == "order") {
      config.order = parse_number<int>(value, where);
    } else if (key == "gamma") {
      config.gamma = parse_number<double>(value, where);
    } else if (key == "eta") {
      config.eta = parse_number<double>(value, where);
    } else if (key == "eta_times_one_minus_gamma") {
      config.eta_one_minus_gamma = parse_number<double>(value, where);
    } else if (key == "eps0") {
      config.eps0 = parse_number<double>(value, where);
    } else if (key == "max_iter") {
      config.max_iter = parse_number<int>(value, where);
    } else if (key == "step_tol") {
      config.step_tol = parse_number<double>(value, where);
    } else if (key == "success_tol") {
      config.success_tol = parse_number<double>(value, where);
    } else if (key == "seed") {
      config.seed = parse_number<std::uint64_t>(value, where);
    } else if (key == "iterate_stride") {
      config.iterate_stride = parse_number<int>(value, where);
    } else {
      throw std::invalid_argument(where + ": unknown key '" + key + "'");
    }
  }
  return config;
}

IrlsConfig resolve_solve_config(const SolveFlags& f) {
  IrlsConfig config =
      f.config_path.empty() ? IrlsConfig{} : read_config_file(f.config_path);
  if (f.variant) config.variant = parse_variant(*f.variant);
  if (f.order) config.order = *f.order;
  if (f.gamma) config.gamma = *f.gamma;
  if (f.eta) config.eta = *f.eta;
  if (f.eta_one_minus_gamma) config.eta_one_minus_gamma = *f.eta_one_minus_gamma;
  if (f.eps0) config.eps0 = *f.eps0;
  if (f.max_iter) config.max_iter = *f.max_iter;
  if (f.step_tol) config.step_tol = *f.step_tol;
  if (f.success_tol) config.success_tol = *f.success_tol;
  if (f.seed) config.seed = *f.seed;
  return config;
}

int status_exit_code(Status status) {
  return status == Status::kMaxIter ? kExitMaxIter : kExitOk;
}

int cmd_solve(const SolveFlags& f, std::ostream& out) {
  CsInstance instance;
  instance.phi = read_matrix_csv(f.phi_path);
  instance.y = read_vector_csv(f.y_path);
  const Eigen::Index m = instance.phi.rows();
  const Eigen::Index n = instance.phi.cols();
  if (instance.y.size() != m) {
    throw std::invalid_argument(f.y_path + ": expected " + std::to_string(m) +
                                " entries to match Phi, got " +
                                std::to_string(instance.y.size()));
  }
  if (!f.xstar_path.empty()) {
    RealVector x_star = read_vector_csv(f.xstar_path);
    if (x_star.size() != n) {
      throw std::invalid_argument(f.xstar_path + ": expected " +
                                  std::to_string(n) + " entries");
    }
    instance.support = support_of(x_star);
    instance.x_star = std::move(x_star);
  }
  std::optional<RealVector> x0;
  if (!f.x0_path.empty()) {
    x0 = read_vector_csv(f.x0_path);
    if (x0->size() != n) {
      throw std::invalid_argument(f.x0_path + ": expected " + std::to_string(n) +
                                  " entries");
    }
  }

  IrlsConfig config = resolve_solve_config(f);
  config.validate(n);
  out << describe(config, n);

  const IrlsResult result = run_irls_cs(instance, config, x0);
  const IterationRecord& last = result.trace.records.back();
  out << "status = " << to_string(result.status) << '\n'
      << "iterations = " << result.iterations_used << '\n'
      << "eps = " << format_real(last.eps) << '\n'
      << "J = " << format_real(last.objective) << '\n';
  if (instance.x_star) out << "err2 = " << format_real(last.err2) << '\n';

  if (!f.trace_out.empty()) {
    std::ofstream trace(f.trace_out);
    if (!trace) throw std::runtime_error("cannot write " + f.trace_out);
    write_trace_csv(trace, result.trace);
  }
  if (f.out_path.empty()) {
    out << "x =\n";
    write_vector_csv(out, result.final_x);
  } else {
    write_vector_csv(std::filesystem::path(f.out_path), result.final_x);
  }
  return status_exit_code(result.status);
}

struct CounterexampleFlags {
  int k = 5;
  std::optional<double> gamma;
  bool gamma_critical = false;
  std::optional<double> delta;
  double z0_position = 0.5;
  int steps = 10000;
  std::string out_dir = "counterexample";
  std::string run = "none";
  double eta = 0.9;
  std::uint64_t seed = kDefaultSeed;
};

int cmd_counterexample(const CounterexampleFlags& f, std::ostream& out) {
  if (f.run != "none" && f.run != "ddfg" && f.run != "modified" &&
      f.run != "both" && f.run != "oracle") {
    throw std::invalid_argument("--run must be one of none, ddfg, modified, both, oracle");
  }
  if (f.steps < 0) throw std::invalid_argument("--steps must be >= 0");
  CounterexampleParams params;
  params.k = f.k;
  params.gamma = f.gamma && !f.gamma_critical ? *f.gamma : critical_gamma(f.k);
  params.delta = f.delta;
  Rng rng(f.seed);
  params.z_star = random_positive_z_star(f.k, rng);
  const CounterexampleInstance inst = build_counterexample(params, f.z0_position);

  const std::filesystem::path dir(f.out_dir);
  save_counterexample(inst, dir, f.seed);
  out << "k = " << inst.params.k << '\n'
      << "gamma = " << format_real(inst.params.gamma) << '\n'
      << "delta = " << format_real(*inst.params.delta) << '\n'
      << "nu = " << format_real(inst.nu) << '\n'
      << "alpha = " << format_real(inst.alpha) << '\n'
      << "xi = " << format_real(inst.xi) << '\n'
      << "s_star = " << format_real(inst.s_star) << '\n'
      << "limit_gap = " << format_real(inst.limit_gap) << '\n'
      << "z0_interval = (" << format_real(inst.z0_lower) << ", "
      << format_real(inst.z0_upper) << ")\n"
      << "z0_position = " << format_real(inst.z0_position) << '\n'
      << "seed = " << f.seed << '\n'
      << "steps = " << f.steps << '\n'
      << "eta = " << format_real(f.eta) << '\n'
      << "run = " << f.run << '\n'
      << "out_dir = " << dir.string() << '\n';
  for (const auto& note : inst.problem.notes) out << "# " << note << '\n';

  auto solve = [&](Variant variant) {
    IrlsConfig config;
    config.variant = variant;
    config.order = inst.params.k;
    config.gamma = inst.params.gamma;
    config.eta = f.eta;
    config.max_iter = f.steps;
    config.iterate_stride = std::max(1, f.steps);
    const IrlsResult result = run_irls_l1r(inst.problem, config, inst.z0);
    const std::string name = std::string(to_string(variant));
    std::ofstream trace(dir / ("trace_" + name + ".csv"));
    write_trace_csv(trace, result.trace);
    const double z1 = (*result.final_z)[0];
    out << name << ": status = " << to_string(result.status)
        << ", iterations = " << result.iterations_used
        << ", eps = " << format_real(result.trace.records.back().eps)
        << ", err2 = " << format_real(result.trace.records.back().err2)
        << ", s = " << format_real(failure_ratio(inst, z1))
        << ", z1 - z1* = " << format_real(z1 - inst.params.z_star[0]) << '\n';
  };
  if (f.run == "ddfg" || f.run == "both") solve(Variant::kDdfg);
  if (f.run == "modified" || f.run == "both") solve(Variant::kModified);
  if (f.run == "oracle") {
    const auto steps = scalar_recursion_oracle(inst, f.steps);
    std::ofstream csv(dir / "oracle.csv");
    csv << "n,s,eps,z1\n";
    for (const auto& step : steps) {
      csv << step.n << ',' << format_real(step.s) << ',' << format_real(step.eps)
          << ',' << format_real(step.z1) << '\n';
    }
    out << "oracle: s_" << f.steps << " = " << format_real(steps.back().s)
        << ", z1 - z1* = "
        << format_real(steps.back().z1 - inst.params.z_star[0]) << '\n';
  }
  return kExitOk;
}

struct NspFlags {
  std::string matrix_path;
  NspOptions options;
};

int cmd_nsp_check(const NspFlags& f, std::ostream& out, std::ostream& err) {
  const DenseMatrix a = read_matrix_csv(f.matrix_path);
  const NspOptions& o = f.options;
  if (2 * static_cast<Eigen::Index>(o.order) >= a.rows()) {
    err << "warning: K = " << o.order << " >= N/2 = " << a.rows() / 2.0
        << "; the null space property of this order cannot hold\n";
  }
  out << "matrix = " << f.matrix_path << '\n'
      << "K = " << o.order << '\n'
      << "gamma = " << format_real(o.gamma) << '\n'
      << "samples = " << o.samples << '\n'
      << "exhaustive_cap = " << o.exhaustive_cap << '\n'
      << "seed = " << o.seed << '\n';
  const NspReport report = nsp_check(a, o);
  out << "exhaustive = " << (report.exhaustive ? "true" : "false") << '\n'
      << "gamma_estimate = " << format_real(report.gamma_estimate) << '\n'
      << "passed = " << (report.passed ? "true" : "false") << '\n';
  if (!report.passed) {
    out << "witness_z =";
    for (Eigen::Index i = 0; i < report.witness_z.size(); ++i) {
      out << (i ? "," : " ") << format_real(report.witness_z[i]);
    }
    out << "\nwitness_T =";
    for (std::size_t i = 0; i < report.witness_support.size(); ++i) {
      // 1-based row indices.
      out << (i ? "," : " ") << report.witness_support[i] + 1;
    }
    out << '\n';
    return kExitNspViolation;
  }
  return kExitOk;
}

struct ExperimentFlags {
  std::string id;
  std::string scale = "desk";
  std::vector<std::uint64_t> seeds{kDefaultSeed};
  std::string out = "out";
  int threads = 0;
  ExperimentOverrides overrides;
};

int cmd_experiment(const ExperimentFlags& f, std::ostream& out) {
  ExperimentSpec spec;
  spec.id = parse_experiment_id(f.id);
  spec.scale = parse_scale(f.scale);
  spec.seeds = f.seeds;
  spec.overrides = f.overrides;
  spec.threads = f.threads;
  const ExperimentReport report = run_experiment(spec);
  for (const auto& line : report.metadata) out << line << '\n';
  const auto dir = write_report(report, f.out);
  int errors = 0;
  for (const auto& row : report.rows) errors += row.error.empty() ? 0 : 1;
  out << "rows = " << report.rows.size() << '\n'
      << "trial_errors = " << errors << '\n';
  for (const auto& agg : aggregate(report)) {
    out << agg.group << ": success_rate = " << format_real(agg.success_rate)
        << " (" << agg.successes << "/" << agg.trials << ")\n";
  }
  out << "written to " << dir.string() << '\n';
  return kExitOk;
}

int cmd_describe(std::ostream& out) {
  out << "irlscs " << kToolVersion << "\n\n[solve]\n"
      << describe(IrlsConfig{}) << "\n[counterexample]\n"
      << "k = 5\ngamma = nu(k) = " << format_real(critical_gamma(5))
      << "\ndelta = k(2k+1)\nz0_position = 0.5\nsteps = 10000\neta = 0.9\n"
      << "seed = " << kDefaultSeed << "\n\n[nsp-check]\n";
  const NspOptions nsp;
  out << "K = " << nsp.order << "\ngamma = " << format_real(nsp.gamma)
      << "\nsamples = " << nsp.samples
      << "\nexhaustive_cap = " << nsp.exhaustive_cap << "\nseed = " << nsp.seed
      << "\n\n[experiment]\nscale = desk\nseeds = " << kDefaultSeed
      << "\nsuccess_tol = 0.001\nout = out\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"IRLS solvers for sparse recovery, failure instances, NSP checks "
               "and experiment reproduction",
               "irlscs"};
  app.footer(kFooter);
  app.require_subcommand(1);

  SolveFlags solve;
  auto* solve_cmd = app.add_subcommand("solve", "Run IRLS on Phi x = y");
  solve_cmd->add_option("PHI", solve.phi_path, "Measurement matrix CSV")->required();
  solve_cmd->add_option("Y", solve.y_path, "Measurement vector CSV")->required();
  solve_cmd->add_option("--variant", solve.variant, "ddfg or modified (default modified)");
  solve_cmd->add_option("--K", solve.order, "NSP order K (default floor(N/2))");
  solve_cmd->add_option("--gamma", solve.gamma, "NSP constant gamma (default 0.9)");
  solve_cmd->add_option("--eta", solve.eta, "eta in (0,1) (default 0.9)");
  solve_cmd->add_option("--eta-times-one-minus-gamma", solve.eta_one_minus_gamma,
                        "Product eta*(1-gamma) for the modified update");
  solve_cmd->add_option("--eps0", solve.eps0, "Initial epsilon (default 1)");
  solve_cmd->add_option("--max-iter", solve.max_iter, "Iteration cap (default 100000)");
  solve_cmd->add_option("--step-tol", solve.step_tol, "Step tolerance (default 1e-10)");
  solve_cmd->add_option("--success-tol", solve.success_tol,
                        "Stop once ||x - x*||_2 is below this (needs --xstar)");
  solve_cmd->add_option("--seed", solve.seed, "Seed recorded with the run");
  solve_cmd->add_option("--trace-out", solve.trace_out, "Trace CSV path");
  solve_cmd->add_option("--xstar", solve.xstar_path, "Ground truth CSV for error columns");
  solve_cmd->add_option("--x0", solve.x0_path, "Initial iterate CSV");
  solve_cmd->add_option("--out", solve.out_path, "Final x CSV (default: stdout)");
  solve_cmd->add_option("--config", solve.config_path,
                        "key = value file; flags override it");

  CounterexampleFlags ce;
  auto* ce_cmd = app.add_subcommand("counterexample",
                                    "Build the DDFG failure instance and optionally run it");
  ce_cmd->add_option("--k", ce.k, "Block size k")->capture_default_str();
  auto* gamma_opt = ce_cmd->add_option("--gamma", ce.gamma, "gamma in [nu(k), 1)");
  ce_cmd->add_flag("--gamma-critical", ce.gamma_critical, "Use gamma = nu(k) (default)")
      ->excludes(gamma_opt);
  ce_cmd->add_option("--delta", ce.delta, "delta in (0, k(2k+1)] (default k(2k+1))");
  ce_cmd->add_option("--z0-pos", ce.z0_position,
                     "Position of z0_1 inside its admissible interval, in [0,1]")
      ->capture_default_str();
  ce_cmd->add_option("--steps", ce.steps, "Iterations for solvers and oracle")
      ->capture_default_str();
  ce_cmd->add_option("--out-dir", ce.out_dir, "Output directory")->capture_default_str();
  ce_cmd->add_option("--run", ce.run, "none, ddfg, modified, both or oracle")
      ->capture_default_str();
  ce_cmd->add_option("--eta", ce.eta, "eta for the modified run")->capture_default_str();
  ce_cmd->add_option("--seed", ce.seed, "Seed for z*")->capture_default_str();

  NspFlags nsp;
  auto* nsp_cmd = app.add_subcommand("nsp-check",
                                     "Estimate the NSP constant of a regression matrix A");
  nsp_cmd->add_option("MATRIX", nsp.matrix_path, "Matrix CSV")->required();
  nsp_cmd->add_option("--K", nsp.options.order, "Support size K")->capture_default_str();
  nsp_cmd->add_option("--gamma", nsp.options.gamma, "Claimed constant")->capture_default_str();
  nsp_cmd->add_option("--samples", nsp.options.samples, "Random probes")
      ->capture_default_str();
  nsp_cmd->add_option("--exhaustive-cap", nsp.options.exhaustive_cap,
                      "Enumerate supports when binomial(N,K) <= cap")
      ->capture_default_str();
  nsp_cmd->add_option("--seed", nsp.options.seed, "Probe seed")->capture_default_str();

  ExperimentFlags ex;
  std::optional<int> k, m, n, trials, max_iter;
  std::optional<double> success_tol;
  std::vector<double> gammas, sigmas;
  std::vector<int> orders, sparsities;
  auto* ex_cmd = app.add_subcommand("experiment", "Run a seeded numerical study");
  ex_cmd->add_option("--id", ex.id, "E1, E2, E3, E4 or E5")->required();
  ex_cmd->add_option("--scale", ex.scale, "desk or paper")->capture_default_str();
  ex_cmd->add_option("--seeds", ex.seeds, "Master seeds")->delimiter(',');
  ex_cmd->add_option("--out", ex.out, "Output root")->capture_default_str();
  ex_cmd->add_option("--threads", ex.threads, "Worker threads (0 = all cores)")
      ->capture_default_str();
  ex_cmd->add_option("--k", k, "Block size k (E1-E3)");
  auto* gammas_opt = ex_cmd->add_option("--gammas", gammas, "gamma list")->delimiter(',');
  auto* sigmas_opt = ex_cmd->add_option("--sigmas", sigmas, "sigma list (E3)")->delimiter(',');
  auto* orders_opt = ex_cmd->add_option("--orders", orders, "K list (E4)")->delimiter(',');
  auto* sparsities_opt =
      ex_cmd->add_option("--sparsities", sparsities, "Sparsity list (E4, E5)")->delimiter(',');
  ex_cmd->add_option("--m", m, "Rows of Phi (E4, E5)");
  ex_cmd->add_option("--n", n, "Columns of Phi (E4, E5)");
  ex_cmd->add_option("--trials", trials, "Trials per cell");
  ex_cmd->add_option("--max-iter", max_iter, "Iteration cap");
  ex_cmd->add_option("--success-tol", success_tol, "Recovery threshold on ||x - x*||_2");

  auto* describe_cmd = app.add_subcommand("describe", "Print every default");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitError;
  }

  try {
    if (*solve_cmd) return cmd_solve(solve, out);
    if (*ce_cmd) return cmd_counterexample(ce, out);
    if (*nsp_cmd) return cmd_nsp_check(nsp, out, err);
    if (*ex_cmd) {
      ex.overrides.k = k;
      ex.overrides.m = m;
      ex.overrides.n = n;
      ex.overrides.trials = trials;
      ex.overrides.max_iter = max_iter;
      ex.overrides.success_tol = success_tol;
      if (*gammas_opt) ex.overrides.gammas = gammas;
      if (*sigmas_opt) ex.overrides.sigmas = sigmas;
      if (*orders_opt) ex.overrides.orders = orders;
      if (*sparsities_opt) ex.overrides.sparsities = sparsities;
      return cmd_experiment(ex, out);
    }
    if (*describe_cmd) return cmd_describe(out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace irlscs::cli
