// Command line front end: generate synthetic process data, pretrain the
// autoencoder, execute single active-learning runs, and reproduce the
// multi-seed benchmark figures.
#include "sal/bench.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;

namespace {

sal::ConfigFile load_config(const std::string& path) {
  if (path.empty()) return sal::ConfigFile::parse_toml("", "<defaults>");
  return sal::ConfigFile::load(path);
}

int cmd_generate(const std::string& config_path, long n, std::uint64_t seed,
                 bool seed_set, const std::string& out) {
  const auto cfg = load_config(config_path);
  sal::ProcessSpec spec = sal::process_spec_from(cfg);
  if (seed_set) spec.seed = seed;
  if (n <= 0) n = cfg.get_int("data.n_total", 5000);
  const sal::RawDataset data = sal::generate(spec, n);
  sal::write_csv(data, out);
  std::printf("wrote %ld rows x %ld variables (+response) to %s\n",
              static_cast<long>(data.rows()), static_cast<long>(data.cols()),
              out.c_str());
  return 0;
}

int cmd_train_oae(const std::string& config_path, const std::string& data_path,
                  const std::string& response, double lambda, bool lambda_set,
                  std::uint64_t seed, bool seed_set, const std::string& out) {
  const auto cfg = load_config(config_path);
  sal::BenchConfig bc = sal::bench_config_from(cfg);
  if (lambda_set) bc.lambda = lambda;
  if (seed_set) bc.oae_train.seed = seed;

  const sal::RawDataset data = sal::load_csv(data_path, response);
  if (bc.arch.input_dim() != data.cols())
    throw std::runtime_error(
        "train-oae: oae.layers starts at " +
        std::to_string(bc.arch.input_dim()) + " but the data has " +
        std::to_string(data.cols()) + " variables");
  const sal::Standardizer s = sal::fit_standardizer(data);
  const sal::OAEModel model =
      sal::train_oae(sal::apply(s, data.features), bc.arch, bc.lambda,
                     bc.oae_train);
  sal::save_oae(model, out);
  double best_val = 0.0;
  for (const sal::EpochLog& log : model.train_log)
    best_val = best_val == 0.0 ? log.val_loss : std::min(best_val, log.val_loss);
  std::printf("trained %zu epochs, best validation loss %.6g, saved to %s\n",
              model.train_log.size(), best_val, out.c_str());
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& data_path,
            const std::string& response, const std::string& criterion,
            double alpha, bool alpha_set, int budget, bool budget_set,
            std::uint64_t seed, bool seed_set, bool no_oae,
            const std::string& out_dir) {
  const auto cfg = load_config(config_path);
  sal::BenchConfig bc = sal::bench_config_from(cfg);
  sal::EngineConfig ec = sal::engine_config_from(cfg);
  if (!criterion.empty()) ec.criterion = sal::parse_criterion(criterion);
  if (alpha_set) ec.alpha = alpha;
  if (budget_set) ec.budget = budget;
  if (seed_set) ec.seed = seed;
  if (no_oae) ec.use_oae = false;

  sal::RawDataset data;
  if (!data_path.empty()) {
    data = sal::load_csv(data_path, response);
  } else {
    sal::ProcessSpec spec = bc.process;
    if (seed_set) spec.seed = seed;
    data = sal::generate(spec, bc.n_total);
  }
  if (!data.has_response())
    throw std::runtime_error("run: the dataset needs a response column");
  const sal::Splits parts = sal::split(data, bc.fractions, true);

  sal::OAEModel oae;
  if (ec.use_oae) {
    if (bc.arch.input_dim() != parts.history.cols())
      throw std::runtime_error("run: oae.layers does not match the data width");
    const sal::Standardizer s = sal::fit_standardizer(parts.history);
    sal::TrainConfig tc = bc.oae_train;
    if (seed_set) tc.seed = seed;
    oae = sal::train_oae(sal::apply(s, parts.history.features), bc.arch,
                         bc.lambda, tc);
  }

  sal::RawDataset empty_labeled;
  empty_labeled.features.resize(0, parts.history.cols());
  empty_labeled.feature_names = parts.history.feature_names;

  sal::StreamSource stream(parts.stream_data);
  const sal::RunTrace trace =
      sal::run(parts.history, empty_labeled, stream, parts.test,
               ec.use_oae ? &oae : nullptr, ec);

  fs::create_directories(out_dir);
  sal::write_trace_csv(trace, (fs::path(out_dir) / "trace.csv").string());
  sal::write_curve_csv(trace, (fs::path(out_dir) / "curve.csv").string());
  sal::write_model_csv(trace.final_model,
                       (fs::path(out_dir) / "model.csv").string());
  sal::write_calibration_csv(
      trace, (fs::path(out_dir) / "calibration_scores.csv").string());
  std::printf(
      "criterion %s: %ld labels queried over %zu stream points, final test "
      "RMSE %.6g\n",
      sal::criterion_name(ec.criterion), trace.queried, trace.steps.size(),
      trace.acquisitions.back().test_rmse);
  return 0;
}

int cmd_bench(const std::string& config_path, std::uint64_t seed,
              bool seed_set, double alpha, bool alpha_set, int budget,
              bool budget_set, int runs, int threads,
              const std::string& out_dir) {
  const auto cfg = load_config(config_path);
  sal::BenchConfig bc = sal::bench_config_from(cfg);
  if (seed_set) bc.base_seed = seed;
  if (alpha_set) bc.alpha = alpha;
  if (budget_set) bc.budget = budget;
  if (runs > 0) bc.n_runs = runs;
  if (threads > 0) bc.threads = threads;

  const sal::BenchResult result = sal::run_benchmark(bc);

  fs::create_directories(fs::path(out_dir) / "traces");
  sal::write_curves_csv(result.curves,
                        (fs::path(out_dir) / "curves.csv").string());
  for (const sal::MethodRunTrace& t : result.traces) {
    char name[128];
    std::snprintf(name, sizeof name, "run_%03d_%s_trace.csv", t.run,
                  t.method.c_str());
    sal::write_trace_csv(t.trace,
                         (fs::path(out_dir) / "traces" / name).string());
  }

  std::vector<sal::LearningCurve> fig2a, fig2b;
  for (const sal::LearningCurve& c : result.curves) {
    if (c.method == "rnd_raw" || c.method == "rnd_oae") fig2a.push_back(c);
    if (c.method.size() > 4 &&
        c.method.substr(c.method.size() - 4) == "_oae")
      fig2b.push_back(c);
  }
  if (fig2a.size() == 2)
    sal::emit_plot(fig2a, (fs::path(out_dir) / "figure2a.svg").string());
  if (fig2b.size() >= 2)
    sal::emit_plot(fig2b, (fs::path(out_dir) / "figure2b.svg").string());

  for (const std::string& f : result.failures)
    std::fprintf(stderr, "warning: %s\n", f.c_str());
  for (const sal::LearningCurve& c : result.curves)
    std::printf("%-8s final mean RMSE %.6g (std %.6g, %d/%d runs)\n",
                c.method.c_str(), c.mean_rmse.back(), c.std_rmse.back(),
                c.runs_aggregated, c.runs_aggregated + c.runs_failed);
  std::printf("results in %s\n", out_dir.c_str());
  return 0;
}

int cmd_plot(const std::string& curves_path, const std::string& out) {
  sal::emit_plot(sal::read_curves_csv(curves_path), out);
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"stream-based active learning for soft-sensor regression"};
  app.require_subcommand(1);

  std::string config_path, data_path, response = "y", criterion, out,
              curves_path;
  std::uint64_t seed = 0;
  double alpha = 0.05, lambda = 0.10;
  int budget = 100, runs = 0, threads = 0;
  long n = 0;
  bool no_oae = false;

  auto* gen = app.add_subcommand("generate", "write a synthetic process CSV");
  gen->add_option("--config", config_path, "TOML/JSON config file");
  gen->add_option("--n", n, "number of rows");
  auto* gen_seed = gen->add_option("--seed", seed, "generator seed");
  gen->add_option("--out", out, "output CSV path")->required();

  auto* toae = app.add_subcommand("train-oae", "pretrain the autoencoder");
  toae->add_option("--config", config_path, "TOML/JSON config file");
  toae->add_option("--data", data_path, "historical pool CSV")->required();
  toae->add_option("--response", response,
                   "response column to drop, if present");
  auto* toae_lambda =
      toae->add_option("--lambda", lambda, "orthogonality weight");
  auto* toae_seed = toae->add_option("--seed", seed, "training seed");
  toae->add_option("--out", out, "model output path")->required();

  auto* runc = app.add_subcommand("run", "single active-learning run");
  runc->add_option("--config", config_path, "TOML/JSON config file");
  runc->add_option("--data", data_path, "labeled CSV (generator if absent)");
  runc->add_option("--response", response, "response column name");
  runc->add_option("--criterion", criterion, "rnd, hot, qbc or emc");
  auto* run_alpha = runc->add_option("--alpha", alpha, "sampling rate");
  auto* run_budget = runc->add_option("--budget", budget, "label budget");
  auto* run_seed = runc->add_option("--seed", seed, "run seed");
  runc->add_flag("--no-oae", no_oae, "use raw features");
  runc->add_option("--out", out, "output directory")->required();

  auto* bench = app.add_subcommand("bench", "multi-seed benchmark");
  bench->add_option("--config", config_path, "TOML/JSON config file");
  auto* bench_seed = bench->add_option("--seed", seed, "base seed");
  auto* bench_alpha = bench->add_option("--alpha", alpha, "sampling rate");
  auto* bench_budget = bench->add_option("--budget", budget, "label budget");
  bench->add_option("--runs", runs, "number of paired runs");
  bench->add_option("--threads", threads, "worker pool size");
  bench->add_option("--out", out, "output directory")->required();

  auto* plot = app.add_subcommand("plot", "render a curves.csv to SVG");
  plot->add_option("--curves", curves_path, "curves.csv path")->required();
  plot->add_option("--out", out, "SVG output path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      return cmd_generate(config_path, n, seed, gen_seed->count() > 0, out);
    if (toae->parsed())
      return cmd_train_oae(config_path, data_path, response, lambda,
                           toae_lambda->count() > 0, seed,
                           toae_seed->count() > 0, out);
    if (runc->parsed())
      return cmd_run(config_path, data_path, response, criterion, alpha,
                     run_alpha->count() > 0, budget, run_budget->count() > 0,
                     seed, run_seed->count() > 0, no_oae, out);
    if (bench->parsed())
      return cmd_bench(config_path, seed, bench_seed->count() > 0, alpha,
                       bench_alpha->count() > 0, budget,
                       bench_budget->count() > 0, runs, threads, out);
    if (plot->parsed()) return cmd_plot(curves_path, out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
