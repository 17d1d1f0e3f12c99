// The per-observation informativeness scores: Hotelling T^2 against the
// labeled set's Gaussian summary, committee prediction variance (QBC), and
// the expected-model-change magnitude. A uniform dispatch entry point lets
// the engine treat all criteria, including the random baseline, alike.
#pragma once

#include "sal/regression.hpp"

#include <Eigen/Dense>
#include <random>
#include <string>

namespace sal {

enum class CriterionKind { Random, HotellingT2, QbcAmbiguity, ExpectedModelChange };

// CLI / config names: "rnd", "hot", "qbc", "emc".
const char* criterion_name(CriterionKind kind);
CriterionKind parse_criterion(const std::string& name);

// Sample mean and covariance (divisor n-1) with a cached inverse of
// S + reg*I.
struct GaussianSummary {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  Eigen::MatrixXd inverse_covariance;
  double regularization = 0.0;

  Eigen::Index dim() const { return mean.size(); }
};

GaussianSummary fit_gaussian_summary(const Eigen::MatrixXd& X, double reg);

// T^2(x) = (x - mean)^T (S + reg*I)^{-1} (x - mean), nonnegative.
double hotelling_t2(const GaussianSummary& g, const Eigen::VectorXd& x);

// Population variance (divisor K) of the member predictions at x.
double qbc_ambiguity(const Committee& c, const Eigen::VectorXd& x);

// (1/K) sum_i |(f_i(x) - f(x))| * |x~|_2 where x~ = (1, x) carries the
// intercept coordinate. The constant gradient factor 2 is dropped; it is
// monotone and leaves argmax and quantile thresholds unchanged.
double emc_score(const Committee& c, const LinearModel& m,
                 const Eigen::VectorXd& x);

// Whatever the active criterion needs; unused members may stay null.
struct CriterionState {
  const GaussianSummary* summary = nullptr;
  const Committee* committee = nullptr;
  const LinearModel* model = nullptr;
  std::mt19937_64* rng = nullptr;
};

// Dispatches to the matching criterion; Random draws the next uniform(0,1)
// value from the bundled generator.
double score(CriterionKind kind, const CriterionState& state,
             const Eigen::VectorXd& x);

} // namespace sal
