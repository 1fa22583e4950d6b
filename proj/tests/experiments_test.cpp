#include "irlscs/experiments.hpp"

#include "irlscs/instances.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace irlscs {
namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("irlscs_exp_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

ExperimentSpec small_e4(int threads) {
  ExperimentSpec spec;
  spec.id = ExperimentId::kE4;
  spec.overrides.m = 20;
  spec.overrides.n = 40;
  spec.overrides.sparsities = std::vector<int>{3};
  spec.overrides.orders = std::vector<int>{2, 10};
  spec.overrides.gammas = std::vector<double>{0.5, 0.9};
  spec.overrides.trials = 4;
  spec.overrides.max_iter = 2000;
  spec.threads = threads;
  return spec;
}

TEST(ExperimentIds, ParseAndPrint) {
  EXPECT_EQ(parse_experiment_id("E3"), ExperimentId::kE3);
  EXPECT_EQ(to_string(ExperimentId::kE5), "E5");
  EXPECT_EQ(parse_scale("paper"), Scale::kPaper);
  EXPECT_THROW(parse_experiment_id("E6"), std::invalid_argument);
  EXPECT_THROW(parse_scale("huge"), std::invalid_argument);
}

TEST(Experiments, ByteIdenticalAcrossRunsAndThreadCounts) {
  const auto a = fresh_dir("det_a");
  const auto b = fresh_dir("det_b");
  const auto da = write_report(run_experiment(small_e4(1)), a);
  const auto db = write_report(run_experiment(small_e4(3)), b);
  int files = 0;
  for (const auto& entry : fs::directory_iterator(da)) {
    const auto name = entry.path().filename();
    ASSERT_TRUE(fs::exists(db / name)) << name;
    EXPECT_EQ(slurp(entry.path()), slurp(db / name)) << name;
    ++files;
  }
  EXPECT_GE(files, 3);
}

TEST(Experiments, SeedChangesOutput) {
  ExperimentSpec spec = small_e4(1);
  const ExperimentReport r1 = run_experiment(spec);
  spec.seeds = {99};
  const ExperimentReport r2 = run_experiment(spec);
  ASSERT_EQ(r1.rows.size(), r2.rows.size());
  bool differs = false;
  for (std::size_t i = 0; i < r1.rows.size(); ++i) {
    differs = differs || r1.rows[i].final_err2 != r2.rows[i].final_err2;
  }
  EXPECT_TRUE(differs);
}

TEST(Experiments, AggregatesRecomputableFromRows) {
  const ExperimentReport report = run_experiment(small_e4(0));
  // DDFG once per K, modified per (K, gamma).
  EXPECT_EQ(report.rows.size(), 2u * 4u * 3u);
  const auto aggs = aggregate(report);
  EXPECT_EQ(aggs.size(), 6u);
  for (const auto& agg : aggs) {
    int trials = 0;
    int successes = 0;
    double iters = 0.0;
    for (const auto& row : report.rows) {
      if (row.group() != agg.group) continue;
      ++trials;
      if (row.success) {
        ++successes;
        iters += row.iterations_to_success;
      }
    }
    EXPECT_EQ(agg.trials, trials);
    EXPECT_EQ(agg.successes, successes);
    EXPECT_DOUBLE_EQ(agg.success_rate, static_cast<double>(successes) / trials);
    if (successes > 0) {
      EXPECT_DOUBLE_EQ(agg.mean_iterations_success, iters / successes);
    } else {
      EXPECT_TRUE(std::isnan(agg.mean_iterations_success));
    }
  }
}

TEST(Experiments, E1DynamicsMatchOracle) {
  ExperimentSpec spec;
  spec.id = ExperimentId::kE1;
  spec.overrides.max_iter = 3000;
  const ExperimentReport report = run_experiment(spec);
  ASSERT_EQ(report.rows.size(), 2u);
  ASSERT_EQ(report.traces.size(), 2u);
  ASSERT_EQ(report.tables.size(), 1u);
  const NamedTable& t = report.tables.front();
  ASSERT_EQ(t.header[1], "s_irls");
  ASSERT_EQ(t.rows.size(), 3001u);
  for (std::size_t n = 1; n < t.rows.size(); ++n) {
    ASSERT_LE(std::fabs(t.rows[n][1] - t.rows[n][2]), 1e-9 * (1 + t.rows[n][2])) << n;
  }
  const auto& ddfg = report.traces[0].trace.records;
  EXPECT_GT(ddfg.back().eps, 0.1);
  EXPECT_EQ(report.rows[0].status, Status::kMaxIter);
  EXPECT_FALSE(report.rows[0].success);
}

TEST(Experiments, E2SharpTransition) {
  ExperimentSpec spec;
  spec.id = ExperimentId::kE2;
  spec.overrides.gammas = std::vector<double>{0.9, 1 - std::pow(10.0, -3.6)};
  spec.overrides.trials = 4;
  spec.overrides.max_iter = 20000;
  const ExperimentReport report = run_experiment(spec);
  const auto aggs = aggregate(report);
  ASSERT_EQ(aggs.size(), 2u);
  EXPECT_EQ(aggs[0].success_rate, 1.0);
  EXPECT_EQ(aggs[1].success_rate, 0.0);
}

TEST(Experiments, SolverErrorsRecordedPerTrial) {
  ExperimentSpec spec;
  spec.id = ExperimentId::kE2;
  // Below k/(k+1): the family cannot be built, every trial records an error.
  spec.overrides.gammas = std::vector<double>{0.5, 0.9};
  spec.overrides.trials = 2;
  spec.overrides.max_iter = 100;
  const ExperimentReport report = run_experiment(spec);
  ASSERT_EQ(report.rows.size(), 4u);
  EXPECT_FALSE(report.rows[0].error.empty());
  EXPECT_FALSE(report.rows[0].success);
  EXPECT_TRUE(report.rows[2].error.empty());
  const auto dir = write_report(report, fresh_dir("errors"));
  EXPECT_NE(slurp(dir / "trials.csv").find(",error,"), std::string::npos);
}

TEST(Experiments, InvalidSpecRejected) {
  ExperimentSpec spec;
  spec.overrides.trials = 0;
  EXPECT_THROW(run_experiment(spec), std::invalid_argument);
  spec = ExperimentSpec{};
  spec.seeds.clear();
  EXPECT_THROW(run_experiment(spec), std::invalid_argument);
}

TEST(Experiments, E5CurvesAndOutputs) {
  ExperimentSpec spec;
  spec.id = ExperimentId::kE5;
  spec.overrides.m = 30;
  spec.overrides.n = 50;
  spec.overrides.sparsities = std::vector<int>{4};
  spec.overrides.trials = 3;
  spec.overrides.max_iter = 3000;
  const ExperimentReport report = run_experiment(spec);
  const auto curves = recovery_statistics(report);
  ASSERT_EQ(curves.size(), 2u);
  for (const auto& c : curves) {
    EXPECT_EQ(c.fraction_recovered.back(), 1.0) << c.group;
    for (std::size_t n = 1; n < c.fraction_recovered.size(); ++n) {
      EXPECT_GE(c.fraction_recovered[n], c.fraction_recovered[n - 1]);
    }
    EXPECT_FALSE(std::isnan(c.mean_err2.back()));
    EXPECT_LT(c.mean_err2.back(), 1e-3);
  }
  const auto dir = write_report(report, fresh_dir("e5"));
  EXPECT_TRUE(fs::exists(dir / "recovery.csv"));
  EXPECT_TRUE(fs::exists(dir / "trace_ddfg_k4_t0.csv"));
  EXPECT_TRUE(fs::exists(dir / "trace_modified_k4_t0.csv"));
  const std::string meta = slurp(dir / "metadata.txt");
  EXPECT_NE(meta.find("tool_version = "), std::string::npos);
  EXPECT_NE(meta.find("seeds = 20240101"), std::string::npos);
}

TEST(RecoveryStatistics, AllSucceedAtOneIsAStep) {
  ExperimentReport report;
  for (int t = 0; t < 3; ++t) {
    TrialRow row;
    row.trial = t;
    row.iterations = 4;
    row.iterations_to_success = 1;
    row.success = true;
    row.err2_curve = {1.0, 1e-4, 1e-5, 1e-6, 1e-7};
    report.rows.push_back(row);
  }
  const auto curves = recovery_statistics(report);
  ASSERT_EQ(curves.size(), 1u);
  const auto& f = curves[0].fraction_recovered;
  ASSERT_EQ(f.size(), 5u);
  EXPECT_EQ(f[0], 0.0);
  for (std::size_t n = 1; n < f.size(); ++n) EXPECT_EQ(f[n], 1.0);
  EXPECT_DOUBLE_EQ(curves[0].mean_err2[1], 1e-4);
}

TEST(RecoveryStatistics, ShorterRunsCarryLastError) {
  ExperimentReport report;
  TrialRow a;
  a.iterations = 1;
  a.err2_curve = {2.0, 1.0};
  TrialRow b;
  b.iterations = 3;
  b.err2_curve = {4.0, 3.0, 2.0, 1.0};
  report.rows = {a, b};
  const auto curves = recovery_statistics(report);
  EXPECT_DOUBLE_EQ(curves[0].mean_err2[3], 1.0);
  EXPECT_EQ(curves[0].fraction_recovered[3], 0.0);
}

TEST(RecoveryStatistics, EmptyReportRejected) {
  EXPECT_THROW(recovery_statistics(ExperimentReport{}), std::invalid_argument);
}

}  // namespace
}  // namespace irlscs
