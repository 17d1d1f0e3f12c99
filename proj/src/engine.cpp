#include "sal/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace sal {

namespace {

bool needs_committee(CriterionKind kind) {
  return kind == CriterionKind::QbcAmbiguity ||
         kind == CriterionKind::ExpectedModelChange;
}

// Mutable model state rebuilt after every acquisition.
struct ModelState {
  LinearModel model;
  Committee committee;
  GaussianSummary summary;

  CriterionState criterion_state(CriterionKind kind, std::mt19937_64& rng) {
    CriterionState s;
    s.rng = &rng;
    s.model = &model;
    if (kind == CriterionKind::HotellingT2) s.summary = &summary;
    if (needs_committee(kind)) s.committee = &committee;
    return s;
  }
};

} // namespace

RawDataset seed_initial_labels(StreamSource& stream, int n0) {
  if (n0 < 0) throw std::invalid_argument("seed_initial_labels: n0 < 0");
  if (stream.remaining() < n0)
    throw std::runtime_error(
        "seed_initial_labels: stream exhausted before the initial set was "
        "complete");
  RawDataset out;
  out.features.resize(n0, stream.dim());
  Eigen::VectorXd y(n0);
  for (int i = 0; i < n0; ++i) {
    const auto item = stream.next();
    out.features.row(i) = item->x.transpose();
    y(i) = stream.query_label(item->index);
  }
  out.response = std::move(y);
  for (Eigen::Index j = 0; j < stream.dim(); ++j)
    out.feature_names.push_back("x" + std::to_string(j + 1));
  return out;
}

RunTrace run(const RawDataset& history, const RawDataset& labeled,
             StreamSource& stream, const RawDataset& test,
             const OAEModel* oae, const EngineConfig& cfg) {
  const Eigen::Index p = history.cols();
  if (stream.dim() != p || test.cols() != p ||
      (labeled.rows() > 0 && labeled.cols() != p))
    throw std::invalid_argument("engine: datasets disagree on feature count");
  if (!test.has_response())
    throw std::invalid_argument("engine: test set needs a response");
  if (cfg.use_oae != (oae != nullptr))
    throw std::invalid_argument(
        "engine: an OAE model must be supplied exactly when use_oae is set");
  if (oae && oae->input_dim() != p)
    throw std::invalid_argument("engine: OAE input width mismatch");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
    throw std::invalid_argument("engine: alpha must lie in (0,1)");
  if (cfg.budget < 0) throw std::invalid_argument("engine: negative budget");

  const Eigen::Index d = cfg.use_oae ? oae->bottleneck_dim() : p;
  const int n0 = cfg.initial_labels > 0 ? cfg.initial_labels
                                        : static_cast<int>(d) + 2;
  if (n0 < d + 2)
    throw std::invalid_argument(
        "engine: initial_labels must be at least feature_dim + 2");

  // Standardization is fit on the historical pool only and applied to the
  // labeled set, the stream and the test set alike.
  const Standardizer stdzr = fit_standardizer(history);
  const auto enc_matrix = [&](const Eigen::MatrixXd& X) {
    const Eigen::MatrixXd Xs = apply(stdzr, X);
    return cfg.use_oae ? encode(*oae, Xs) : Xs;
  };
  const auto enc_vector = [&](const Eigen::VectorXd& x) {
    const Eigen::VectorXd xs = apply(stdzr, x);
    return cfg.use_oae ? encode(*oae, xs) : xs;
  };

  // Pool and test encodings never change: the encoder is frozen.
  const Eigen::MatrixXd pool = enc_matrix(history.features);
  const Eigen::MatrixXd test_enc = enc_matrix(test.features);
  const Eigen::VectorXd& test_y = *test.response;

  // Labeled set, kept directly in the encoded feature space.
  const Eigen::Index capacity =
      std::max<Eigen::Index>(labeled.rows(), n0) + cfg.budget;
  Eigen::MatrixXd L(capacity, d);
  Eigen::VectorXd yL(capacity);
  Eigen::Index nL = 0;
  if (labeled.rows() > 0) {
    if (!labeled.has_response())
      throw std::invalid_argument("engine: labeled set needs a response");
    L.topRows(labeled.rows()) = enc_matrix(labeled.features);
    yL.head(labeled.rows()) = *labeled.response;
    nL = labeled.rows();
  }
  if (nL < n0) {
    const RawDataset seeded =
        seed_initial_labels(stream, static_cast<int>(n0 - nL));
    L.middleRows(nL, seeded.rows()) = enc_matrix(seeded.features);
    yL.segment(nL, seeded.rows()) = *seeded.response;
    nL += seeded.rows();
  }

  std::mt19937_64 rng(cfg.seed);
  RunTrace trace;
  trace.initial_labels = nL;

  ModelState state;
  const auto refit = [&]() {
    const Eigen::MatrixXd X = L.topRows(nL);
    const Eigen::VectorXd y = yL.head(nL);
    try {
      state.model = fit_ols(X, y, cfg.ridge);
      if (needs_committee(cfg.criterion))
        state.committee =
            bootstrap_committee(X, y, cfg.committee_size, cfg.ridge, rng);
      if (cfg.criterion == CriterionKind::HotellingT2)
        state.summary = fit_gaussian_summary(X, cfg.cov_reg);
    } catch (const std::exception& e) {
      throw std::runtime_error("engine: refit with " + std::to_string(nL) +
                               " labels failed: " + e.what());
    }
  };

  ControlLimit limit;
  const auto recalibrate = [&]() {
    CriterionState cs = state.criterion_state(cfg.criterion, rng);
    Eigen::VectorXd scores(pool.rows());
    for (Eigen::Index i = 0; i < pool.rows(); ++i)
      scores(i) = score(cfg.criterion, cs, pool.row(i).transpose());
    limit = calibrate(cfg.criterion, scores, cfg.alpha);
  };

  const auto test_rmse = [&]() {
    return std::sqrt(loss(state.model, test_enc, test_y));
  };

  refit();
  recalibrate();
  trace.acquisitions.push_back({nL, test_rmse()});

  long step = 0;
  while (auto item = stream.next()) {
    const Eigen::VectorXd z = enc_vector(item->x);
    CriterionState cs = state.criterion_state(cfg.criterion, rng);
    const double j = score(cfg.criterion, cs, z);
    const bool query = trace.queried < cfg.budget && exceeds(limit, j);
    trace.steps.push_back({step, item->index, j, limit.ucl, query});
    if (query) {
      const double y = stream.query_label(item->index);
      L.row(nL) = z.transpose();
      yL(nL) = y;
      ++nL;
      ++trace.queried;
      try {
        refit();
      } catch (const std::exception& e) {
        throw std::runtime_error(std::string(e.what()) + " (stream step " +
                                 std::to_string(step) + ")");
      }
      recalibrate();
      trace.acquisitions.push_back({nL, test_rmse()});
    }
    ++step;
  }

  trace.final_model = state.model;
  trace.final_limit = limit;
  return trace;
}

void write_trace_csv(const RunTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("write_trace_csv: cannot open '" + path + "'");
  out << "step,index,score,ucl,queried\n";
  char buf[160];
  for (const StepRecord& s : trace.steps) {
    std::snprintf(buf, sizeof buf, "%ld,%ld,%.17g,%.17g,%d\n", s.step,
                  s.stream_index, s.score, s.ucl, s.queried ? 1 : 0);
    out << buf;
  }
}

void write_curve_csv(const RunTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("write_curve_csv: cannot open '" + path + "'");
  out << "n_labels,test_rmse\n";
  char buf[96];
  for (const AcquisitionRecord& a : trace.acquisitions) {
    std::snprintf(buf, sizeof buf, "%ld,%.17g\n", a.n_labels, a.test_rmse);
    out << buf;
  }
}

void write_calibration_csv(const RunTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("write_calibration_csv: cannot open '" + path +
                             "'");
  out << "score\n";
  char buf[64];
  for (Eigen::Index i = 0; i < trace.final_limit.scores.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g\n", trace.final_limit.scores(i));
    out << buf;
  }
}

} // namespace sal
