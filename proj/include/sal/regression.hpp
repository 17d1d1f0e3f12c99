// Ordinary least squares with intercept, its mean squared error loss, and
// bootstrap committees. The solver runs on an orthogonal decomposition of
// the design matrix; explicit normal equations exist only as a test oracle.
#pragma once

#include <Eigen/Dense>
#include <random>
#include <string>
#include <vector>

namespace sal {

// f(x) = beta[0] + sum_j beta[j] * x[j-1]; beta[0] is the intercept.
struct LinearModel {
  Eigen::VectorXd beta;

  Eigen::Index feature_dim() const { return beta.size() - 1; }
};

// K >= 2 models fit on bootstrap resamples of one labeled set.
struct Committee {
  std::vector<LinearModel> members;

  int size() const { return static_cast<int>(members.size()); }
  Eigen::Index feature_dim() const { return members.front().feature_dim(); }
};

// Ridge applied when a bootstrap resample has a rank-deficient design, so
// the committee always ends up with exactly K members.
inline constexpr double kBootstrapFallbackRidge = 1e-6;

// Minimizes sum_i (y_i - b0 - b.x_i)^2 + ridge * |b|^2 (intercept never
// penalized). ridge = 0 requires n >= d+1 and a full-rank design; failure
// reports a condition estimate.
LinearModel fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    double ridge = 0.0);

double predict(const LinearModel& m, const Eigen::VectorXd& x);
Eigen::VectorXd predict(const LinearModel& m, const Eigen::MatrixXd& X);

// Mean squared error over the given set.
double loss(const LinearModel& m, const Eigen::MatrixXd& X,
            const Eigen::VectorXd& y);

// K members, each fit on n indices drawn i.i.d. uniformly with replacement.
// Deterministic for a fixed generator state.
Committee bootstrap_committee(const Eigen::MatrixXd& X,
                              const Eigen::VectorXd& y, int committee_size,
                              double ridge, std::mt19937_64& rng);

// One-row CSV dump, header "intercept,b1,...,bd".
void write_model_csv(const LinearModel& m, const std::string& path);

} // namespace sal
