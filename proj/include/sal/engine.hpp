// The online selective-sampling loop: encode the historical pool and the
// labeled seed set, fit the regression model, calibrate the UCL on the
// pool's criterion scores, then walk the stream querying every observation
// whose score clears the limit until the label budget is spent.
#pragma once

#include "sal/criteria.hpp"
#include "sal/dataset.hpp"
#include "sal/oae.hpp"
#include "sal/regression.hpp"
#include "sal/threshold.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sal {

struct EngineConfig {
  CriterionKind criterion = CriterionKind::Random;
  double alpha = 0.05;   // sampling rate of Eq.-style P(J >= UCL) = alpha
  int budget = 100;      // labels the stream phase may buy, exactly enforced
  int committee_size = 10;
  double ridge = 0.0;
  double cov_reg = 1e-6; // diagonal loading for the T^2 covariance
  int initial_labels = 0; // 0 = automatic: feature_dim + 2
  std::uint64_t seed = 0;
  bool use_oae = true;
};

struct StepRecord {
  long step = 0;         // position in the walk, 0-based
  long stream_index = 0; // emission index within the stream
  double score = 0.0;
  double ucl = 0.0;
  bool queried = false;
};

struct AcquisitionRecord {
  long n_labels = 0;
  double test_rmse = 0.0;
};

struct RunTrace {
  std::vector<StepRecord> steps;
  // acquisitions[0] is the initial fit; one more entry per purchased label
  std::vector<AcquisitionRecord> acquisitions;
  LinearModel final_model;
  long queried = 0;
  long initial_labels = 0;
  ControlLimit final_limit; // last calibration, kept for audit dumps
};

// Consumes the first n0 stream observations and queries each label
// unconditionally, forming the initial labeled set.
RawDataset seed_initial_labels(StreamSource& stream, int n0);

// Executes the full routine. `labeled` may be empty (0 rows); the engine
// tops it up from the stream until the initial count is reached. The
// standardizer is fit on `history` only and applied everywhere; `oae` must
// be non-null iff cfg.use_oae. The test set never influences selection, it
// only prices the model after each refit.
RunTrace run(const RawDataset& history, const RawDataset& labeled,
             StreamSource& stream, const RawDataset& test,
             const OAEModel* oae, const EngineConfig& cfg);

// trace.csv: step,index,score,ucl,queried
void write_trace_csv(const RunTrace& trace, const std::string& path);
// curve.csv: n_labels,test_rmse
void write_curve_csv(const RunTrace& trace, const std::string& path);
// calibration_scores.csv: the scores behind the final UCL, for audit
void write_calibration_csv(const RunTrace& trace, const std::string& path);

} // namespace sal
