#pragma once

// Seeded reproductions of the numerical studies:
//
//   E1  failure instance (k = 5, gamma = nu(5), delta = 55), both variants,
//       with the closed-form s_n dynamics alongside the DDFG run.
//   E2  DDFG on the failure family for a sweep of gamma, random z0.
//   E3  DDFG on A_gamma + sigma R for a sweep of sigma, random z0.
//   E4  recovery on Gaussian instances over a (K, gamma) grid, random x0.
//   E5  recovery rate and mean error versus iteration, (K, gamma, eta) =
//       (N/2, 0.9, 0.9).
//
// Every trial draws from its own stream derived from (master seed, trial
// index), so reports do not depend on the number of worker threads.

#include "irlscs/irls.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace irlscs {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum class ExperimentId { kE1, kE2, kE3, kE4, kE5 };
enum class Scale { kDesk, kPaper };

std::string_view to_string(ExperimentId id);
std::string_view to_string(Scale scale);
ExperimentId parse_experiment_id(std::string_view text);
Scale parse_scale(std::string_view text);

struct ExperimentOverrides {
  std::optional<int> k;
  std::optional<std::vector<double>> gammas;
  std::optional<std::vector<double>> sigmas;
  std::optional<std::vector<int>> orders;
  std::optional<std::vector<int>> sparsities;
  std::optional<int> m;
  std::optional<int> n;
  std::optional<int> trials;
  std::optional<int> max_iter;
  std::optional<double> success_tol;
};

struct ExperimentSpec {
  ExperimentId id = ExperimentId::kE1;
  Scale scale = Scale::kDesk;
  std::vector<std::uint64_t> seeds{kDefaultSeed};
  ExperimentOverrides overrides;
  // 0 selects std::thread::hardware_concurrency().
  int threads = 0;
};

struct TrialRow {
  int trial = 0;
  std::uint64_t seed = 0;
  // Experiment-specific parameters, same keys in the same order on every row.
  std::vector<std::pair<std::string, std::string>> params;
  Variant variant = Variant::kDdfg;
  int iterations = 0;
  // First n with ||x^n - x*||_2 <= success_tol; -1 if never.
  int iterations_to_success = -1;
  double final_err2 = 0.0;
  Status status = Status::kRunning;
  bool success = false;
  // Solver error message for trials that threw; empty otherwise.
  std::string error;
  // ||x^n - x*||_2 for n = 0..iterations, kept where the study needs curves.
  std::vector<double> err2_curve;

  // Parameters plus variant, identifying the aggregate cell.
  std::string group() const;
};

struct NamedTable {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

struct NamedTrace {
  std::string name;
  IterationTrace trace;
};

struct ExperimentReport {
  ExperimentSpec spec;
  // Resolved parameters as "key = value" lines.
  std::vector<std::string> metadata;
  std::vector<std::string> param_names;
  std::vector<TrialRow> rows;
  std::vector<NamedTrace> traces;
  std::vector<NamedTable> tables;
};

struct GroupAggregate {
  std::string group;
  std::vector<std::pair<std::string, std::string>> params;
  Variant variant = Variant::kDdfg;
  int trials = 0;
  int successes = 0;
  double success_rate = 0.0;
  // NaN when no trial succeeded.
  double mean_iterations_success = 0.0;
  double mean_final_err2 = 0.0;
};

// Groups in order of first appearance.
std::vector<GroupAggregate> aggregate(const ExperimentReport& report);

struct RecoveryCurve {
  std::string group;
  int trials = 0;
  // fraction_recovered[n]: share of trials with iterations_to_success <= n.
  std::vector<double> fraction_recovered;
  // (1/T) sum_i err2_i(n), a finished trial contributing its last error.
  // NaN when some trial kept no error curve.
  std::vector<double> mean_err2;
};

// Throws std::invalid_argument on an empty report.
std::vector<RecoveryCurve> recovery_statistics(const ExperimentReport& report);

ExperimentReport run_experiment(const ExperimentSpec& spec);

// Writes trials.csv, aggregate.csv, recovery.csv, trace_<name>.csv,
// <table>.csv and metadata.txt under root/<id>/<scale>/ and returns that
// directory.
std::filesystem::path write_report(const ExperimentReport& report,
                                   const std::filesystem::path& root);

}  // namespace irlscs
