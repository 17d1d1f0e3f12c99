// Acceptance suite: one binary, one pass/fail line per criterion, nonzero
// exit if anything fails. Criteria 6 and 7 share a single benchmark
// execution; everything else runs standalone oracles.
#include "sal/bench.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <vector>

using namespace sal;

namespace {

int failures = 0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s  (%s)\n", pass ? "PASS" : "FAIL", id,
              name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* format, ...) {
  char buf[256];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

// --- criterion 1: OLS vs normal equations ---------------------------------
void criterion_ols_oracle() {
  const auto start = Clock::now();
  std::mt19937_64 rng(1001);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_int_distribution<int> dd(1, 12);
    const int d = dd(rng);
    std::uniform_int_distribution<int> nn(d + 2, 200);
    const int n = nn(rng);
    const Eigen::MatrixXd X = oracle::random_matrix(n, d, rng);
    const Eigen::VectorXd y = X * oracle::random_vector(d, rng) +
                              oracle::random_vector(n, rng, 0.5);
    const LinearModel m = fit_ols(X, y);
    const Eigen::VectorXd ref = oracle::normal_equations_fit(X, y);
    worst = std::max(worst, (m.beta - ref).cwiseAbs().maxCoeff());
  }
  const double elapsed = seconds_since(start);
  report(1, "fit_ols matches the normal-equations oracle (100 cases, 1e-8)",
         worst < 1e-8 && elapsed < 5.0,
         fmt("worst abs diff %.3g, %.2f s", worst, elapsed));
}

// --- criterion 2: gradient check -------------------------------------------
void criterion_gradient_check() {
  const auto start = Clock::now();
  OAEArchitecture arch;
  arch.layer_sizes = {4, 8, 3};
  const OAEModel model = init_oae(arch, 0.1, 2024);
  std::mt19937_64 rng(1002);
  const Eigen::MatrixXd batch = oracle::random_matrix(16, 4, rng);
  const double worst = oracle::gradient_check(model, batch, 1e-5);
  const double elapsed = seconds_since(start);
  report(2, "analytic OAE gradients match finite differences (rel < 1e-5)",
         worst < 1e-5 && elapsed < 10.0,
         fmt("worst rel err %.3g, %.2f s", worst, elapsed));
}

// --- criterion 3: criterion identities --------------------------------------
void criterion_identities() {
  std::mt19937_64 rng(1003);
  double worst_t2 = 0.0, worst_emc = 0.0, worst_qbc = 0.0;

  for (int trial = 0; trial < 100; ++trial) {
    // T^2 affine invariance
    const int d = 3;
    const Eigen::MatrixXd X = oracle::random_matrix(50, d, rng);
    Eigen::MatrixXd A = oracle::random_matrix(d, d, rng);
    A += 3.0 * Eigen::MatrixXd::Identity(d, d);
    const Eigen::VectorXd b = oracle::random_vector(d, rng, 2.0);
    const GaussianSummary g = fit_gaussian_summary(X, 0.0);
    const GaussianSummary gt = fit_gaussian_summary(
        (X * A.transpose()).rowwise() + b.transpose(), 0.0);
    const Eigen::VectorXd x = oracle::random_vector(d, rng);
    const double t2 = hotelling_t2(g, x);
    worst_t2 =
        std::max(worst_t2, std::abs(hotelling_t2(gt, A * x + b) - t2) /
                               std::max(1.0, std::abs(t2)));

    // committee identities
    Committee c;
    for (int k = 0; k < 10; ++k) {
      LinearModel m;
      m.beta = oracle::random_vector(d + 1, rng);
      c.members.push_back(std::move(m));
    }
    LinearModel center;
    center.beta = oracle::random_vector(d + 1, rng);
    const Eigen::VectorXd xx = oracle::random_vector(d, rng, 2.0);

    Eigen::VectorXd xt(d + 1);
    xt(0) = 1.0;
    xt.tail(d) = xx;
    double mean_abs = 0.0;
    Eigen::VectorXd preds(10);
    for (int k = 0; k < 10; ++k) {
      preds(k) = predict(c.members[k], xx);
      mean_abs += std::abs(preds(k) - predict(center, xx));
    }
    mean_abs /= 10.0;
    worst_emc = std::max(worst_emc, std::abs(emc_score(c, center, xx) -
                                             xt.norm() * mean_abs));
    const double mean = preds.mean();
    const double var = (preds.array() - mean).square().sum() / 10.0;
    worst_qbc = std::max(worst_qbc, std::abs(qbc_ambiguity(c, xx) - var));
  }
  report(3,
         "T2 affine invariance (1e-8), EMC factorization (1e-12), QBC "
         "variance oracle (1e-12), 100 cases each",
         worst_t2 < 1e-8 && worst_emc < 1e-12 && worst_qbc < 1e-12,
         fmt("t2 %.3g, emc %.3g, qbc %.3g", worst_t2, worst_emc, worst_qbc));
}

// --- criterion 4: UCL calibration -------------------------------------------
void criterion_ucl_calibration() {
  const auto start = Clock::now();

  int seeds_ok = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 rng(seed);
    const Eigen::VectorXd calibration = oracle::random_vector(5000, rng);
    const ControlLimit cl =
        calibrate(CriterionKind::QbcAmbiguity, calibration, 0.05);
    const Eigen::VectorXd stream = oracle::random_vector(5000, rng);
    const double rate = (stream.array() >= cl.ucl).cast<double>().mean();
    if (rate >= 0.03 && rate <= 0.07) ++seeds_ok;
  }

  // exact checks
  const double a = std::sqrt(31.0 / 32.0);
  Eigen::VectorXd scores(32);
  for (int i = 0; i < 32; ++i) scores(i) = i % 2 ? a : -a;
  const bool scott_ok = std::abs(scott_bandwidth(scores) - 0.5) < 1e-9;

  Eigen::VectorXd one(1);
  one << 2.0;
  const double ucl =
      solve_ucl(one, 1.0, 0.05, CriterionKind::QbcAmbiguity).ucl;
  const bool quantile_ok = std::abs(ucl - (2.0 + 1.6449)) < 1e-3;

  const double elapsed = seconds_since(start);
  report(4,
         "UCL calibration: exceedance in [0.03,0.07] for >= 9/10 seeds; "
         "scott(m=32)=0.5; single-score quantile",
         seeds_ok >= 9 && scott_ok && quantile_ok && elapsed < 30.0,
         fmt("%d/10 seeds, scott %s, quantile %s, %.2f s", seeds_ok,
             scott_ok ? "ok" : "off", quantile_ok ? "ok" : "off", elapsed));
}

// --- criterion 5: engine contract ------------------------------------------
struct EngineFixture {
  RawDataset history, labeled, stream_data, test;
};

EngineFixture engine_fixture(std::uint64_t seed) {
  ProcessSpec spec = ProcessSpec::random_structure(6, 2, 40 + seed % 5);
  spec.noise_std.setConstant(0.3);
  spec.seed = seed;
  const RawDataset data = generate(spec, 600);
  const Splits parts = split(data, SplitFractions{0.4, 0.4, 0.2}, true);
  EngineFixture f;
  f.history = parts.history;
  f.stream_data = parts.stream_data;
  f.test = parts.test;
  f.labeled.features.resize(0, 6);
  f.labeled.feature_names = parts.history.feature_names;
  return f;
}

void criterion_engine_contract() {
  const auto start = Clock::now();
  bool ok = true;
  std::string detail;

  for (int i = 0; i < 50 && ok; ++i) {
    EngineFixture f = engine_fixture(2000 + i);
    EngineConfig cfg;
    cfg.criterion = static_cast<CriterionKind>(i % 4);
    cfg.budget = 3 + i % 12;
    cfg.alpha = 0.03 + 0.02 * (i % 5);
    cfg.seed = 999 + i;
    cfg.use_oae = false;
    StreamSource stream(f.stream_data);
    const RunTrace trace =
        run(f.history, f.labeled, stream, f.test, nullptr, cfg);

    if (trace.queried > cfg.budget) {
      ok = false;
      detail = fmt("budget violated on run %d", i);
      break;
    }
    long seen = 0;
    for (const StepRecord& s : trace.steps) {
      const bool budget_open = seen < cfg.budget;
      if (s.queried != (budget_open && s.score >= s.ucl)) {
        ok = false;
        detail = fmt("threshold consistency violated on run %d", i);
        break;
      }
      seen += s.queried;
    }
    for (size_t aidx = 0; ok && aidx < trace.acquisitions.size(); ++aidx) {
      if (trace.acquisitions[aidx].n_labels !=
          trace.initial_labels + static_cast<long>(aidx)) {
        ok = false;
        detail = fmt("labeled set not monotone on run %d", i);
      }
    }
  }

  // no-lookahead: truncating the future must not change the past
  if (ok) {
    for (int i = 0; i < 10 && ok; ++i) {
      EngineFixture f = engine_fixture(3000 + i);
      EngineConfig cfg;
      cfg.criterion = static_cast<CriterionKind>(i % 4);
      cfg.budget = 10;
      cfg.seed = 555 + i;
      cfg.use_oae = false;
      StreamSource full(f.stream_data);
      const RunTrace ref =
          run(f.history, f.labeled, full, f.test, nullptr, cfg);

      const Eigen::Index cut = f.stream_data.rows() / 2;
      RawDataset trunc = f.stream_data;
      trunc.features = f.stream_data.features.topRows(cut);
      trunc.response = Eigen::VectorXd(f.stream_data.response->head(cut));
      StreamSource half(trunc);
      const RunTrace part =
          run(f.history, f.labeled, half, f.test, nullptr, cfg);
      for (size_t s = 0; s < part.steps.size(); ++s) {
        if (part.steps[s].score != ref.steps[s].score ||
            part.steps[s].queried != ref.steps[s].queried) {
          ok = false;
          detail = fmt("lookahead detected on run %d step %zu", i, s);
          break;
        }
      }
    }
  }

  // budget zero leaves the model at the initial fit
  if (ok) {
    EngineFixture f = engine_fixture(4000);
    EngineConfig cfg;
    cfg.criterion = CriterionKind::QbcAmbiguity;
    cfg.budget = 0;
    cfg.seed = 77;
    cfg.use_oae = false;
    StreamSource stream(f.stream_data);
    const RunTrace trace =
        run(f.history, f.labeled, stream, f.test, nullptr, cfg);

    StreamSource s2(f.stream_data);
    const RawDataset seeded =
        seed_initial_labels(s2, static_cast<int>(trace.initial_labels));
    const Standardizer st = fit_standardizer(f.history);
    const LinearModel direct =
        fit_ols(apply(st, seeded.features), *seeded.response, cfg.ridge);
    if (trace.queried != 0 ||
        (trace.final_model.beta - direct.beta).cwiseAbs().maxCoeff() != 0.0 ||
        trace.steps.size() !=
            static_cast<size_t>(f.stream_data.rows() - trace.initial_labels)) {
      ok = false;
      detail = "budget-zero run deviates from the initial fit";
    }
  }

  report(5,
         "engine contract: budget safety, threshold consistency, "
         "no-lookahead, budget-zero identity (50 runs)",
         ok, ok ? fmt("50 contract + 10 lookahead runs, %.1f s",
                      seconds_since(start))
                : detail);
}

// --- criteria 6 and 7: benchmark reproduction -------------------------------
BenchConfig acceptance_bench_config() {
  BenchConfig cfg;
  cfg.methods = {MethodSpec{CriterionKind::Random, false},
                 MethodSpec{CriterionKind::Random, true},
                 MethodSpec{CriterionKind::HotellingT2, true},
                 MethodSpec{CriterionKind::QbcAmbiguity, true},
                 MethodSpec{CriterionKind::ExpectedModelChange, true}};
  cfg.n_runs = 20;
  cfg.budget = 100;
  cfg.alpha = 0.05;
  cfg.base_seed = 8800;
  cfg.n_total = 10000;
  cfg.fractions = {0.25, 0.65, 0.10};
  cfg.lambda = 0.005;
  cfg.oae_train.max_epochs = 300;
  cfg.oae_train.patience = 15;
  cfg.threads = 0;
  return cfg;
}

void criteria_benchmark() {
  const auto start = Clock::now();
  const BenchConfig cfg = acceptance_bench_config();
  const BenchResult result = run_benchmark(cfg);
  const double elapsed = seconds_since(start);

  const auto find = [&](const std::string& name) -> const LearningCurve* {
    for (const LearningCurve& c : result.curves)
      if (c.method == name) return &c;
    return nullptr;
  };
  const LearningCurve* rnd_raw = find("rnd_raw");
  const LearningCurve* rnd_oae = find("rnd_oae");
  const LearningCurve* qbc = find("qbc_oae");
  const LearningCurve* emc = find("emc_oae");

  // per-run paired differences at final budget
  std::vector<double> raw_final(cfg.n_runs, 0.0), oae_final(cfg.n_runs, 0.0);
  for (const MethodRunTrace& t : result.traces) {
    if (t.method == "rnd_raw")
      raw_final[t.run] = t.trace.acquisitions.back().test_rmse;
    if (t.method == "rnd_oae")
      oae_final[t.run] = t.trace.acquisitions.back().test_rmse;
  }
  int negative = 0;
  for (int r = 0; r < cfg.n_runs; ++r)
    if (oae_final[r] < raw_final[r]) ++negative;

  const bool mean_ok = rnd_oae->mean_rmse.back() < rnd_raw->mean_rmse.back();
  report(6,
         "OAE features beat raw features at final budget under random "
         "sampling (paired, >= 15/20 seeds)",
         mean_ok && negative >= 15 && elapsed < 600.0,
         fmt("mean %.4f vs %.4f, %d/20 paired wins, %.0f s",
             rnd_oae->mean_rmse.back(), rnd_raw->mean_rmse.back(), negative,
             elapsed));

  // criterion 7: qbc and emc at or below rnd on >= 70% of grid points
  const auto frac_at_or_below = [&](const LearningCurve* c) {
    int ok = 0;
    for (size_t i = 0; i < c->mean_rmse.size(); ++i)
      if (c->mean_rmse[i] <= rnd_oae->mean_rmse[i] + 1e-12) ++ok;
    return static_cast<double>(ok) / c->mean_rmse.size();
  };
  const double qbc_frac = frac_at_or_below(qbc);
  const double emc_frac = frac_at_or_below(emc);
  report(7,
         "QBC and EMC curves at or below RND on >= 70% of the label grid "
         "(all with OAE features)",
         qbc_frac >= 0.70 && emc_frac >= 0.70,
         fmt("qbc %.0f%%, emc %.0f%%", 100.0 * qbc_frac, 100.0 * emc_frac));
}

// --- criterion 8: orthogonality effect --------------------------------------
void criterion_orthogonality_effect() {
  const auto start = Clock::now();
  int reduced = 0;
  for (int s = 0; s < 20; ++s) {
    ProcessSpec spec = ProcessSpec::defaults();
    spec.seed = 7000 + s;
    const RawDataset data = generate(spec, 800);
    const Splits parts = split(data, SplitFractions{0.75, 0.15, 0.10}, true);
    const Standardizer st = fit_standardizer(parts.history);
    const Eigen::MatrixXd train = apply(st, parts.history.features);
    const Eigen::MatrixXd held = apply(st, parts.stream_data.features);

    OAEArchitecture arch;
    arch.layer_sizes = {16, 48, 24, 10};
    TrainConfig tc;
    tc.max_epochs = 120;
    tc.patience = 10;
    tc.seed = 7000 + s;

    const auto offdiag = [&](double lambda) {
      const OAEModel m = train_oae(train, arch, lambda, tc);
      const Eigen::MatrixXd Z = encode(m, held);
      const Eigen::MatrixXd gram =
          Z.transpose() * Z / static_cast<double>(Z.rows());
      double acc = 0.0;
      for (int i = 0; i < gram.rows(); ++i)
        for (int j = 0; j < gram.cols(); ++j)
          if (i != j) acc += std::abs(gram(i, j));
      return acc / static_cast<double>(gram.rows() * (gram.cols() - 1));
    };
    if (offdiag(0.10) < offdiag(0.0)) ++reduced;
  }
  report(8,
         "lambda 0.10 yields a more orthogonal held-out bottleneck Gram "
         "matrix than lambda 0 (>= 14/20 seeds)",
         reduced >= 14,
         fmt("%d/20 seeds reduced, %.0f s", reduced, seconds_since(start)));
}

// --- criterion 9: bench determinism ------------------------------------------
void criterion_bench_determinism() {
  const auto start = Clock::now();
  BenchConfig cfg;
  cfg.methods = {MethodSpec{CriterionKind::Random, false},
                 MethodSpec{CriterionKind::QbcAmbiguity, true}};
  cfg.n_runs = 2;
  cfg.budget = 10;
  cfg.alpha = 0.1;
  cfg.base_seed = 4242;
  cfg.n_total = 800;
  cfg.fractions = {0.4, 0.4, 0.2};
  cfg.arch.layer_sizes = {16, 24, 8};
  cfg.lambda = 0.01;
  cfg.oae_train.max_epochs = 30;
  cfg.threads = 2;

  const auto render = [&]() {
    std::string out;
    char buf[128];
    for (const LearningCurve& c : run_benchmark(cfg).curves)
      for (size_t i = 0; i < c.n_labels.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s,%ld,%.17g,%.17g\n",
                      c.method.c_str(), c.n_labels[i], c.mean_rmse[i],
                      c.std_rmse[i]);
        out += buf;
      }
    return out;
  };
  const std::string a = render();
  const std::string b = render();
  report(9, "bench emits byte-identical curves across two executions",
         a == b && !a.empty(),
         fmt("%zu bytes compared, %.1f s", a.size(), seconds_since(start)));
}

} // namespace

int main() {
  std::printf("acceptance suite\n================\n");
  criterion_ols_oracle();
  criterion_gradient_check();
  criterion_identities();
  criterion_ucl_calibration();
  criterion_engine_contract();
  criteria_benchmark();
  criterion_orthogonality_effect();
  criterion_bench_determinism();
  std::printf("================\n%s (%d criterion(s) failed)\n",
              failures == 0 ? "ALL CRITERIA PASS" : "FAILURES PRESENT",
              failures);
  return failures == 0 ? 0 : 1;
}
