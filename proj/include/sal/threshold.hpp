// Upper control limit estimation. The historical criterion scores are
// smoothed with a Gaussian kernel; the UCL is the u solving
// F^(u) = 1 - alpha, found by bisection, so that a fraction alpha of
// same-distribution scores lands at or above it.
#pragma once

#include "sal/criteria.hpp"

#include <Eigen/Dense>

namespace sal {

struct ControlLimit {
  CriterionKind kind = CriterionKind::Random;
  Eigen::VectorXd scores; // calibration sample
  double bandwidth = 0.0;
  double alpha = 0.0;
  double ucl = 0.0;
};

// h = sd * m^(-1/5) with the sample standard deviation (divisor m-1).
// A zero-spread sample falls back to max(|mean|, 1) * 1e-3 so degenerate
// calibrations cannot deadlock the stream loop.
double scott_bandwidth(const Eigen::VectorXd& scores);

// F^(u) = (1/m) sum_j Phi((u - J_j) / h), Phi the standard normal CDF.
double kde_cdf(const Eigen::VectorXd& scores, double h, double u);

// Root of F^(u) = 1 - alpha on [min - 10h, max + 10h], bisected to 1e-9
// absolute in u. Accepts m >= 1.
ControlLimit solve_ucl(const Eigen::VectorXd& scores, double h, double alpha,
                       CriterionKind kind);

// scott_bandwidth + solve_ucl in one step.
ControlLimit calibrate(CriterionKind kind, const Eigen::VectorXd& scores,
                       double alpha);

// Boundary scores are accepted: a label is queried when j >= ucl.
bool exceeds(const ControlLimit& cl, double j);

} // namespace sal
