#include "irlscs/experiments.hpp"

#include "irlscs/instances.hpp"
#include "irlscs/matrix_io.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace irlscs {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kDefaultSuccessTol = 1e-3;
// x0 ~ N(0, 100 I) in the random-initialisation studies.
constexpr double kInitStd = 10.0;

struct Resolved {
  int k = 5;
  std::vector<double> gammas;
  std::vector<double> sigmas;
  std::vector<int> orders;
  std::vector<int> sparsities;
  int m = 0;
  int n = 0;
  int trials = 1;
  int max_iter = 20000;
  double success_tol = kDefaultSuccessTol;
  double eta = 0.9;
};

template <class T>
std::string join(const std::vector<T>& values) {
  std::ostringstream out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ',';
    if constexpr (std::is_floating_point_v<T>) {
      out << format_real(values[i]);
    } else {
      out << values[i];
    }
  }
  return out.str();
}

Resolved resolve(const ExperimentSpec& spec) {
  const bool desk = spec.scale == Scale::kDesk;
  const auto& o = spec.overrides;
  Resolved r;
  r.k = o.k.value_or(5);
  r.success_tol = o.success_tol.value_or(kDefaultSuccessTol);
  switch (spec.id) {
    case ExperimentId::kE1:
      r.gammas = {critical_gamma(r.k)};
      r.trials = 1;
      // The modified run needs ~9.6e4 iterations to reach 1e-3 here.
      r.max_iter = 100000;
      break;
    case ExperimentId::kE2: {
      r.gammas = {1 - 1e-1,
                  1 - 1e-2,
                  1 - 1e-3,
                  1 - std::pow(10.0, -3.3),
                  1 - std::pow(10.0, -3.6),
                  critical_gamma(r.k),
                  1 - 1e-4,
                  1 - 1e-5};
      r.trials = 20;
      r.max_iter = desk ? 20000 : 100000;
      break;
    }
    case ExperimentId::kE3:
      r.gammas = {critical_gamma(r.k)};
      r.sigmas = {1e-1, 1e-2, 1e-3, 1e-4};
      r.trials = desk ? 10 : 50;
      r.max_iter = 100000;
      break;
    case ExperimentId::kE4:
      r.m = desk ? 60 : 300;
      r.n = desk ? 100 : 500;
      r.sparsities = {desk ? 10 : 100};
      r.orders = desk ? std::vector<int>{9, 10, 30, 50, 60}
                      : std::vector<int>{99, 100, 150, 200, 250, 300};
      r.gammas = {0.1, 0.5, 0.9};
      r.trials = desk ? 20 : 100;
      r.max_iter = desk ? 20000 : 100000;
      break;
    case ExperimentId::kE5:
      r.m = desk ? 60 : 300;
      r.n = desk ? 100 : 500;
      r.sparsities = desk ? std::vector<int>{5, 10, 12}
                          : std::vector<int>{50, 100, 120};
      r.gammas = {0.9};
      r.trials = desk ? 20 : 50;
      r.max_iter = desk ? 20000 : 100000;
      break;
  }
  if (o.gammas) r.gammas = *o.gammas;
  if (o.sigmas) r.sigmas = *o.sigmas;
  if (o.orders) r.orders = *o.orders;
  if (o.sparsities) r.sparsities = *o.sparsities;
  if (o.m) r.m = *o.m;
  if (o.n) r.n = *o.n;
  if (o.trials) r.trials = *o.trials;
  if (o.max_iter) r.max_iter = *o.max_iter;

  if (r.trials <= 0) throw std::invalid_argument("trials must be positive");
  if (r.max_iter <= 0) throw std::invalid_argument("max_iter must be positive");
  if (r.gammas.empty()) throw std::invalid_argument("gamma list is empty");
  if (spec.seeds.empty()) throw std::invalid_argument("seed list is empty");
  return r;
}

struct TaskOutput {
  std::vector<TrialRow> rows;
  std::vector<NamedTrace> traces;
  std::vector<NamedTable> tables;
};
using Task = std::function<TaskOutput()>;

std::vector<TaskOutput> run_tasks(const std::vector<Task>& tasks, int threads) {
  std::vector<TaskOutput> out(tasks.size());
  if (threads <= 0) {
    threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }
  threads = std::min<int>(threads, static_cast<int>(std::max<std::size_t>(1, tasks.size())));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        out[i] = tasks[i]();
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

int first_success(const IterationTrace& trace, double tol) {
  for (const auto& rec : trace.records) {
    if (rec.err2 <= tol) return rec.n;
  }
  return -1;
}

// Runs one solve, folding solver errors into the row.
template <class Solve>
TrialRow solve_row(int trial, std::uint64_t seed,
                   std::vector<std::pair<std::string, std::string>> params,
                   Variant variant, double success_tol, bool keep_curve,
                   Solve&& solve, std::optional<IrlsResult>* keep = nullptr) {
  TrialRow row;
  row.trial = trial;
  row.seed = seed;
  row.params = std::move(params);
  row.variant = variant;
  try {
    IrlsResult result = solve();
    row.iterations = result.iterations_used;
    row.status = result.status;
    row.final_err2 = result.trace.records.back().err2;
    row.iterations_to_success = first_success(result.trace, success_tol);
    row.success = row.iterations_to_success >= 0;
    if (keep_curve) {
      row.err2_curve.reserve(result.trace.records.size());
      for (const auto& rec : result.trace.records) row.err2_curve.push_back(rec.err2);
    }
    if (keep) *keep = std::move(result);
  } catch (const std::exception& e) {
    row.error = e.what();
    row.final_err2 = kNaN;
  }
  return row;
}

std::pair<std::string, std::string> param(const std::string& key, double v) {
  return {key, format_real(v)};
}
std::pair<std::string, std::string> param(const std::string& key, int v) {
  return {key, std::to_string(v)};
}

IrlsConfig base_config(const Resolved& r, Variant variant, int order,
                       double gamma) {
  IrlsConfig c;
  c.variant = variant;
  c.order = order;
  c.gamma = gamma;
  c.eta = r.eta;
  c.max_iter = r.max_iter;
  return c;
}

// ---------------------------------------------------------------------------

void plan_e1(const ExperimentSpec& spec, const Resolved& r,
             std::vector<Task>& tasks) {
  for (std::size_t si = 0; si < spec.seeds.size(); ++si) {
    const std::uint64_t master = spec.seeds[si];
    const int trial = static_cast<int>(si);
    tasks.push_back([=]() {
      Rng rng = Rng::for_stream(master, 0);
      CounterexampleParams params;
      params.k = r.k;
      params.gamma = r.gammas.front();
      params.z_star = random_positive_z_star(r.k, rng);
      const CounterexampleInstance inst = build_counterexample(params, 0.5);
      const std::vector<std::pair<std::string, std::string>> keys = {
          param("k", r.k), param("gamma", inst.params.gamma),
          param("delta", *inst.params.delta), param("z0_position", 0.5)};

      TaskOutput out;
      const std::string suffix = "_t" + std::to_string(trial);

      NamedTable dynamics;
      dynamics.name = "failure_dynamics" + suffix;
      dynamics.header = {"n",        "s_irls",  "s_oracle", "eps_irls",
                         "eps_oracle", "z1_irls", "z1_oracle"};
      std::vector<std::array<double, 3>> observed;
      const IterationObserver watch = [&](const IterateView& v) {
        observed.push_back({failure_ratio(inst, (*v.z)[0]), v.eps, (*v.z)[0]});
      };

      for (const Variant variant : {Variant::kDdfg, Variant::kModified}) {
        std::optional<IrlsResult> kept;
        IrlsConfig config = base_config(r, variant, r.k, inst.params.gamma);
        config.iterate_stride = r.max_iter;
        out.rows.push_back(solve_row(
            trial, master, keys, variant, r.success_tol, false,
            [&] {
              return run_irls_l1r(inst.problem, config, inst.z0,
                                  variant == Variant::kDdfg ? watch
                                                            : IterationObserver{});
            },
            &kept));
        if (kept) {
          out.traces.push_back({std::string(to_string(variant)) + suffix,
                                std::move(kept->trace)});
        }
      }

      const auto oracle = scalar_recursion_oracle(
          inst, observed.empty() ? 0 : static_cast<int>(observed.size()) - 1);
      for (std::size_t n = 0; n < observed.size(); ++n) {
        dynamics.rows.push_back({static_cast<double>(n), observed[n][0],
                                 oracle[n].s, observed[n][1], oracle[n].eps,
                                 observed[n][2], oracle[n].z1});
      }
      out.tables.push_back(std::move(dynamics));
      return out;
    });
  }
}

void plan_e2(const ExperimentSpec& spec, const Resolved& r,
             std::vector<Task>& tasks) {
  const double delta = r.k * (2.0 * r.k + 1.0);
  for (const std::uint64_t master : spec.seeds) {
    for (std::size_t gi = 0; gi < r.gammas.size(); ++gi) {
      const double gamma = r.gammas[gi];
      for (int t = 0; t < r.trials; ++t) {
        const std::uint64_t stream = 1 + gi * static_cast<std::uint64_t>(r.trials) + t;
        tasks.push_back([=]() {
          Rng base = Rng::for_stream(master, 0);
          const RealVector z_star = random_positive_z_star(r.k, base);
          Rng rng = Rng::for_stream(master, stream);
          const RealVector z0 = rng.normal_vector(r.k, kInitStd);
          TaskOutput out;
          out.rows.push_back(solve_row(
              t, master, {param("gamma", gamma)}, Variant::kDdfg, r.success_tol,
              false, [&] {
                const RegressionInstance inst =
                    build_failure_family(r.k, gamma, delta, z_star);
                IrlsConfig config = base_config(r, Variant::kDdfg, r.k, gamma);
                config.success_tol = r.success_tol;
                config.iterate_stride = r.max_iter;
                return run_irls_l1r(inst, config, z0);
              }));
          return out;
        });
      }
    }
  }
}

void plan_e3(const ExperimentSpec& spec, const Resolved& r,
             std::vector<Task>& tasks) {
  for (const std::uint64_t master : spec.seeds) {
    for (std::size_t si = 0; si < r.sigmas.size(); ++si) {
      const double sigma = r.sigmas[si];
      for (int t = 0; t < r.trials; ++t) {
        const std::uint64_t stream = 1 + si * static_cast<std::uint64_t>(r.trials) + t;
        tasks.push_back([=]() {
          Rng rng = Rng::for_stream(master, stream);
          CounterexampleParams params;
          params.k = r.k;
          params.gamma = r.gammas.front();
          params.z_star = random_positive_z_star(r.k, rng);
          const std::uint64_t perturb_seed = rng.next_u64();
          const RealVector z0 = rng.normal_vector(r.k, kInitStd);
          TaskOutput out;
          out.rows.push_back(solve_row(
              t, master, {param("sigma", sigma)}, Variant::kDdfg, r.success_tol,
              false, [&] {
                const CounterexampleInstance inst = build_counterexample(params);
                const RegressionInstance perturbed =
                    perturb_counterexample(inst, sigma, perturb_seed);
                IrlsConfig config =
                    base_config(r, Variant::kDdfg, r.k, params.gamma);
                config.success_tol = r.success_tol;
                config.iterate_stride = r.max_iter;
                return run_irls_l1r(perturbed, config, z0);
              }));
          return out;
        });
      }
    }
  }
}

void plan_e4(const ExperimentSpec& spec, const Resolved& r,
             std::vector<Task>& tasks) {
  const int sparsity = r.sparsities.front();
  for (const std::uint64_t master : spec.seeds) {
    for (const int order : r.orders) {
      for (int t = 0; t < r.trials; ++t) {
        tasks.push_back([=]() {
          Rng rng = Rng::for_stream(master, 1 + static_cast<std::uint64_t>(t));
          const std::uint64_t instance_seed = rng.next_u64();
          const RealVector x0 = rng.normal_vector(r.n, kInitStd);
          const CsInstance inst =
              random_gaussian_instance(r.m, r.n, sparsity, 1.0, instance_seed);

          TaskOutput out;
          auto run = [&](Variant variant, double gamma) {
            IrlsConfig config = base_config(r, variant, order, gamma);
            config.success_tol = r.success_tol;
            config.iterate_stride = r.max_iter;
            return run_irls_cs(inst, config, x0);
          };
          out.rows.push_back(solve_row(
              t, master, {param("K", order), {"gamma", "na"}}, Variant::kDdfg,
              r.success_tol, false, [&] { return run(Variant::kDdfg, 0.9); }));
          for (const double gamma : r.gammas) {
            out.rows.push_back(solve_row(
                t, master, {param("K", order), param("gamma", gamma)},
                Variant::kModified, r.success_tol, false,
                [&] { return run(Variant::kModified, gamma); }));
          }
          return out;
        });
      }
    }
  }
}

void plan_e5(const ExperimentSpec& spec, const Resolved& r,
             std::vector<Task>& tasks) {
  const double gamma = r.gammas.front();
  for (const std::uint64_t master : spec.seeds) {
    for (std::size_t si = 0; si < r.sparsities.size(); ++si) {
      const int sparsity = r.sparsities[si];
      for (int t = 0; t < r.trials; ++t) {
        const std::uint64_t stream = 1 + si * static_cast<std::uint64_t>(r.trials) + t;
        tasks.push_back([=]() {
          Rng rng = Rng::for_stream(master, stream);
          const CsInstance inst = random_gaussian_instance(
              r.m, r.n, sparsity, 10.0, rng.next_u64());
          TaskOutput out;
          for (const Variant variant : {Variant::kDdfg, Variant::kModified}) {
            std::optional<IrlsResult> kept;
            out.rows.push_back(solve_row(
                t, master, {param("sparsity", sparsity)}, variant,
                r.success_tol, true,
                [&] {
                  IrlsConfig config = base_config(r, variant, r.n / 2, gamma);
                  config.iterate_stride = t == 0 ? 1 : r.max_iter;
                  return run_irls_cs(inst, config);
                },
                &kept));
            if (kept && t == 0) {
              out.traces.push_back(
                  {std::string(to_string(variant)) + "_k" +
                       std::to_string(sparsity) + "_t0",
                   std::move(kept->trace)});
            }
          }
          return out;
        });
      }
    }
  }
}

std::vector<std::string> describe_run(const ExperimentSpec& spec,
                                      const Resolved& r) {
  std::vector<std::string> lines = {
      "experiment = " + std::string(to_string(spec.id)),
      "scale = " + std::string(to_string(spec.scale)),
      "tool_version = " + std::string(kToolVersion),
      "seeds = " + join(spec.seeds),
      "trials = " + std::to_string(r.trials),
      "max_iter = " + std::to_string(r.max_iter),
      "success_tol = " + format_real(r.success_tol),
      "step_tol = " + format_real(IrlsConfig{}.step_tol),
      "eps0 = 1",
      "gammas = " + join(r.gammas),
  };
  switch (spec.id) {
    case ExperimentId::kE1:
      lines.push_back("k = " + std::to_string(r.k));
      lines.push_back("delta = k(2k+1)");
      lines.push_back("eta = " + format_real(r.eta));
      lines.push_back("K = k");
      lines.push_back("z0 = midpoint of the admissible interval for z0_1");
      lines.push_back(
          "note = z* drawn as |N(0,1)| + 0.1 so that it is strictly positive");
      break;
    case ExperimentId::kE2:
      lines.push_back("k = " + std::to_string(r.k));
      lines.push_back("delta = k(2k+1)");
      lines.push_back("K = k");
      lines.push_back("variant = ddfg");
      lines.push_back("z0 ~ N(0, 100 I)");
      lines.push_back(
          "note = the sweep entry written 1-10^(-gamma0) in the source is run "
          "as gamma0 = nu(k) itself");
      break;
    case ExperimentId::kE3:
      lines.push_back("k = " + std::to_string(r.k));
      lines.push_back("delta = k(2k+1)");
      lines.push_back("sigmas = " + join(r.sigmas));
      lines.push_back("K = k");
      lines.push_back("variant = ddfg");
      lines.push_back(
          "note = z0 ~ N(0, 100 I) per trial, not the interval start used in E1");
      break;
    case ExperimentId::kE4:
      lines.push_back("m = " + std::to_string(r.m));
      lines.push_back("N = " + std::to_string(r.n));
      lines.push_back("sparsity = " + join(r.sparsities));
      lines.push_back("orders = " + join(r.orders));
      lines.push_back("eta = " + format_real(r.eta));
      lines.push_back("x0 ~ N(0, 100 I)");
      lines.push_back("note = ddfg does not use gamma; its rows carry gamma = na");
      break;
    case ExperimentId::kE5:
      lines.push_back("m = " + std::to_string(r.m));
      lines.push_back("N = " + std::to_string(r.n));
      lines.push_back("sparsities = " + join(r.sparsities));
      lines.push_back("K = N/2");
      lines.push_back("eta = " + format_real(r.eta));
      lines.push_back("x* nonzeros ~ N(0, 100)");
      lines.push_back(
          "note = outputs are labelled by the sparsity actually used; the "
          "source's figure captions and body text disagree on which figure "
          "shows which sparsity");
      break;
  }
  return lines;
}

void write_rows_csv(std::ostream& out, const ExperimentReport& report) {
  out << "trial,seed";
  for (const auto& name : report.param_names) out << ',' << name;
  out << ",variant,iterations,iterations_to_success,final_err2,status,success,"
         "error\n";
  for (const auto& row : report.rows) {
    out << row.trial << ',' << row.seed;
    for (const auto& [key, value] : row.params) out << ',' << value;
    std::string error = row.error;
    std::replace(error.begin(), error.end(), ',', ';');
    out << ',' << to_string(row.variant) << ',' << row.iterations << ','
        << row.iterations_to_success << ',' << format_real(row.final_err2) << ','
        << (row.error.empty() ? std::string(to_string(row.status)) : "error")
        << ',' << (row.success ? 1 : 0) << ',' << error << '\n';
  }
}

}  // namespace

std::string_view to_string(ExperimentId id) {
  switch (id) {
    case ExperimentId::kE1: return "E1";
    case ExperimentId::kE2: return "E2";
    case ExperimentId::kE3: return "E3";
    case ExperimentId::kE4: return "E4";
    case ExperimentId::kE5: return "E5";
  }
  return "?";
}

std::string_view to_string(Scale scale) {
  return scale == Scale::kDesk ? "desk" : "paper";
}

ExperimentId parse_experiment_id(std::string_view text) {
  for (const auto id : {ExperimentId::kE1, ExperimentId::kE2, ExperimentId::kE3,
                        ExperimentId::kE4, ExperimentId::kE5}) {
    if (text == to_string(id)) return id;
  }
  throw std::invalid_argument("unknown experiment id '" + std::string(text) +
                              "' (expected E1..E5)");
}

Scale parse_scale(std::string_view text) {
  if (text == "desk") return Scale::kDesk;
  if (text == "paper") return Scale::kPaper;
  throw std::invalid_argument("unknown scale '" + std::string(text) +
                              "' (expected desk or paper)");
}

std::string TrialRow::group() const {
  std::string out;
  for (const auto& [key, value] : params) out += key + "=" + value + ";";
  out += "variant=" + std::string(to_string(variant));
  return out;
}

std::vector<GroupAggregate> aggregate(const ExperimentReport& report) {
  std::vector<GroupAggregate> out;
  std::map<std::string, std::size_t> index;
  std::vector<double> iteration_sums;
  for (const auto& row : report.rows) {
    const std::string key = row.group();
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, out.size()).first;
      GroupAggregate agg;
      agg.group = key;
      agg.params = row.params;
      agg.variant = row.variant;
      out.push_back(agg);
      iteration_sums.push_back(0.0);
    }
    GroupAggregate& agg = out[it->second];
    ++agg.trials;
    agg.mean_final_err2 += row.final_err2;
    if (row.success) {
      ++agg.successes;
      iteration_sums[it->second] += row.iterations_to_success;
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    GroupAggregate& agg = out[i];
    agg.success_rate = static_cast<double>(agg.successes) / agg.trials;
    agg.mean_iterations_success =
        agg.successes > 0 ? iteration_sums[i] / agg.successes : kNaN;
    agg.mean_final_err2 /= agg.trials;
  }
  return out;
}

std::vector<RecoveryCurve> recovery_statistics(const ExperimentReport& report) {
  if (report.rows.empty()) {
    throw std::invalid_argument("recovery_statistics: empty report");
  }
  std::vector<RecoveryCurve> out;
  std::map<std::string, std::vector<const TrialRow*>> members;
  std::vector<std::string> order;
  for (const auto& row : report.rows) {
    auto [it, inserted] = members.try_emplace(row.group());
    if (inserted) order.push_back(row.group());
    it->second.push_back(&row);
  }
  for (const auto& key : order) {
    const auto& rows = members[key];
    RecoveryCurve curve;
    curve.group = key;
    curve.trials = static_cast<int>(rows.size());
    int horizon = 0;
    bool curves = true;
    for (const auto* row : rows) {
      horizon = std::max(horizon, row->iterations);
      curves = curves && !row->err2_curve.empty();
    }
    curve.fraction_recovered.assign(static_cast<std::size_t>(horizon) + 1, 0.0);
    curve.mean_err2.assign(static_cast<std::size_t>(horizon) + 1,
                           curves ? 0.0 : kNaN);
    for (const auto* row : rows) {
      if (row->iterations_to_success >= 0) {
        for (int n = row->iterations_to_success; n <= horizon; ++n) {
          curve.fraction_recovered[static_cast<std::size_t>(n)] += 1.0;
        }
      }
      if (curves) {
        for (int n = 0; n <= horizon; ++n) {
          const std::size_t at = std::min<std::size_t>(
              static_cast<std::size_t>(n), row->err2_curve.size() - 1);
          curve.mean_err2[static_cast<std::size_t>(n)] += row->err2_curve[at];
        }
      }
    }
    for (auto& v : curve.fraction_recovered) v /= curve.trials;
    if (curves) {
      for (auto& v : curve.mean_err2) v /= curve.trials;
    }
    out.push_back(std::move(curve));
  }
  return out;
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  const Resolved r = resolve(spec);
  std::vector<Task> tasks;
  switch (spec.id) {
    case ExperimentId::kE1: plan_e1(spec, r, tasks); break;
    case ExperimentId::kE2: plan_e2(spec, r, tasks); break;
    case ExperimentId::kE3: plan_e3(spec, r, tasks); break;
    case ExperimentId::kE4: plan_e4(spec, r, tasks); break;
    case ExperimentId::kE5: plan_e5(spec, r, tasks); break;
  }

  ExperimentReport report;
  report.spec = spec;
  report.metadata = describe_run(spec, r);
  for (auto& part : run_tasks(tasks, spec.threads)) {
    for (auto& row : part.rows) report.rows.push_back(std::move(row));
    for (auto& tr : part.traces) report.traces.push_back(std::move(tr));
    for (auto& tb : part.tables) report.tables.push_back(std::move(tb));
  }
  if (!report.rows.empty()) {
    for (const auto& [key, value] : report.rows.front().params) {
      report.param_names.push_back(key);
    }
  }
  return report;
}

std::filesystem::path write_report(const ExperimentReport& report,
                                   const std::filesystem::path& root) {
  const std::filesystem::path dir = root / std::string(to_string(report.spec.id)) /
                                    std::string(to_string(report.spec.scale));
  std::filesystem::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream out(dir / name);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    return out;
  };

  {
    auto out = open("trials.csv");
    write_rows_csv(out, report);
  }
  {
    auto out = open("aggregate.csv");
    out << "group";
    for (const auto& name : report.param_names) out << ',' << name;
    out << ",variant,trials,successes,success_rate,mean_iterations_success,"
           "mean_final_err2\n";
    for (const auto& agg : aggregate(report)) {
      out << agg.group;
      for (const auto& [key, value] : agg.params) out << ',' << value;
      out << ',' << to_string(agg.variant) << ',' << agg.trials << ','
          << agg.successes << ',' << format_real(agg.success_rate) << ','
          << format_real(agg.mean_iterations_success) << ','
          << format_real(agg.mean_final_err2) << '\n';
    }
  }
  const bool curves =
      !report.rows.empty() &&
      std::all_of(report.rows.begin(), report.rows.end(),
                  [](const TrialRow& r) { return !r.err2_curve.empty(); });
  if (curves) {
    auto out = open("recovery.csv");
    out << "group,n,fraction_recovered,mean_err2\n";
    for (const auto& curve : recovery_statistics(report)) {
      for (std::size_t n = 0; n < curve.fraction_recovered.size(); ++n) {
        out << curve.group << ',' << n << ','
            << format_real(curve.fraction_recovered[n]) << ','
            << format_real(curve.mean_err2[n]) << '\n';
      }
    }
  }
  for (const auto& named : report.traces) {
    auto out = open("trace_" + named.name + ".csv");
    write_trace_csv(out, named.trace);
  }
  for (const auto& table : report.tables) {
    auto out = open(table.name + ".csv");
    for (std::size_t i = 0; i < table.header.size(); ++i) {
      out << (i ? "," : "") << table.header[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        out << (i ? "," : "") << format_real(row[i]);
      }
      out << '\n';
    }
  }
  {
    auto out = open("metadata.txt");
    for (const auto& line : report.metadata) out << line << '\n';
  }
  return dir;
}

}  // namespace irlscs
