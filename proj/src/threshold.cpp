#include "sal/threshold.hpp"

#include <cmath>
#include <stdexcept>

namespace sal {

namespace {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }

} // namespace

double scott_bandwidth(const Eigen::VectorXd& scores) {
  const Eigen::Index m = scores.size();
  if (m < 2)
    throw std::invalid_argument("scott_bandwidth: need at least 2 scores");
  const double mean = scores.mean();
  const double sd = std::sqrt((scores.array() - mean).square().sum() /
                              static_cast<double>(m - 1));
  if (sd <= 1e-12 * std::max(1.0, std::abs(mean)))
    return std::max(std::abs(mean), 1.0) * 1e-3;
  return sd * std::pow(static_cast<double>(m), -0.2);
}

double kde_cdf(const Eigen::VectorXd& scores, double h, double u) {
  if (scores.size() < 1)
    throw std::invalid_argument("kde_cdf: empty score sample");
  if (h <= 0.0) throw std::invalid_argument("kde_cdf: bandwidth must be > 0");
  double acc = 0.0;
  for (Eigen::Index j = 0; j < scores.size(); ++j)
    acc += normal_cdf((u - scores(j)) / h);
  return acc / static_cast<double>(scores.size());
}

ControlLimit solve_ucl(const Eigen::VectorXd& scores, double h, double alpha,
                       CriterionKind kind) {
  if (scores.size() < 1)
    throw std::invalid_argument("solve_ucl: empty score sample");
  if (h <= 0.0) throw std::invalid_argument("solve_ucl: bandwidth must be > 0");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("solve_ucl: alpha must lie in (0,1)");

  const double target = 1.0 - alpha;
  double lo = scores.minCoeff() - 10.0 * h;
  double hi = scores.maxCoeff() + 10.0 * h;
  // F^ is strictly increasing, so the root is unique; 200 halvings are more
  // than enough to push the bracket below 1e-9.
  for (int it = 0; it < 200 && hi - lo > 1e-9; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (kde_cdf(scores, h, mid) < target)
      lo = mid;
    else
      hi = mid;
  }

  ControlLimit cl;
  cl.kind = kind;
  cl.scores = scores;
  cl.bandwidth = h;
  cl.alpha = alpha;
  cl.ucl = 0.5 * (lo + hi);
  return cl;
}

ControlLimit calibrate(CriterionKind kind, const Eigen::VectorXd& scores,
                       double alpha) {
  const double h = scott_bandwidth(scores);
  // a zero-spread sample pins the UCL at the common value, so tied scores
  // still query and the stream loop cannot deadlock
  if (scores.maxCoeff() - scores.minCoeff() <= 0.0) {
    ControlLimit cl;
    cl.kind = kind;
    cl.scores = scores;
    cl.bandwidth = h;
    cl.alpha = alpha;
    cl.ucl = scores(0);
    return cl;
  }
  return solve_ucl(scores, h, alpha, kind);
}

bool exceeds(const ControlLimit& cl, double j) { return j >= cl.ucl; }

} // namespace sal
