// Multi-seed benchmark harness: runs every configured (criterion, feature
// space) method on paired data splits and a shared per-run OAE, aligns the
// per-run test-RMSE curves on the acquisition grid, and aggregates them
// into mean +- std learning curves with CSV and SVG output.
#pragma once

#include "sal/config.hpp"
#include "sal/datagen.hpp"
#include "sal/engine.hpp"

#include <string>
#include <vector>

namespace sal {

struct MethodSpec {
  CriterionKind criterion = CriterionKind::Random;
  bool use_oae = true;

  std::string name() const; // e.g. "qbc_oae", "rnd_raw"
  static MethodSpec parse(const std::string& token); // "qbc+oae", "rnd+raw"
};

struct BenchConfig {
  std::vector<MethodSpec> methods;
  int n_runs = 50;
  int budget = 100;
  double alpha = 0.05;
  std::uint64_t base_seed = 0;

  // data source: a CSV path, or the process generator when the path is empty
  std::string csv_path;
  std::string response_column = "y";
  ProcessSpec process = ProcessSpec::defaults();
  Eigen::Index n_total = 5000;
  SplitFractions fractions;

  // engine knobs shared by every method
  int committee_size = 10;
  double ridge = 0.0;
  double cov_reg = 1e-6;
  int initial_labels = 0;

  // one OAE per run, shared across that run's methods
  OAEArchitecture arch = OAEArchitecture::defaults();
  double lambda = 0.10;
  TrainConfig oae_train;

  int threads = 0; // 0 = hardware concurrency
};

struct LearningCurve {
  std::string method;
  std::vector<long> n_labels;
  std::vector<double> mean_rmse;
  std::vector<double> std_rmse;
  int runs_aggregated = 0;
  int runs_failed = 0;
};

struct MethodRunTrace {
  int run = 0;
  std::string method;
  RunTrace trace;
};

struct BenchResult {
  std::vector<LearningCurve> curves; // one per method, config order
  std::vector<MethodRunTrace> traces;
  std::vector<std::string> failures; // "run 3 qbc_oae: <reason>"
};

// Executes all runs on a bounded worker pool. A method whose failure rate
// exceeds 20% of the runs aborts the benchmark.
BenchResult run_benchmark(const BenchConfig& cfg);

// curves.csv: method,n_labels,mean_rmse,std_rmse
void write_curves_csv(const std::vector<LearningCurve>& curves,
                      const std::string& path);
std::vector<LearningCurve> read_curves_csv(const std::string& path);

// Deterministic SVG: one polyline per method over a +-1 std band, axes
// labeled "labels queried" / "test RMSE", legend with the method tags.
void emit_plot(const std::vector<LearningCurve>& curves,
               const std::string& path);

// Config-file assembly, shared by the CLI subcommands.
ProcessSpec process_spec_from(const ConfigFile& cfg);
EngineConfig engine_config_from(const ConfigFile& cfg);
BenchConfig bench_config_from(const ConfigFile& cfg);

} // namespace sal
