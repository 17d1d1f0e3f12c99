#include "sal/regression.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sal {

namespace {

// Design matrix with a leading column of ones; for ridge > 0 the penalty
// rows sqrt(ridge) * e_j (j = 1..d, skipping the intercept) are appended so
// one QR solve handles both cases.
Eigen::MatrixXd build_design(const Eigen::MatrixXd& X, double ridge) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  const Eigen::Index extra = ridge > 0.0 ? d : 0;
  Eigen::MatrixXd design = Eigen::MatrixXd::Zero(n + extra, d + 1);
  design.col(0).head(n).setOnes();
  design.block(0, 1, n, d) = X;
  if (extra > 0) {
    const double r = std::sqrt(ridge);
    for (Eigen::Index j = 0; j < d; ++j) design(n + j, j + 1) = r;
  }
  return design;
}

bool try_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double ridge,
             LinearModel& out, double* condition) {
  const Eigen::Index n = X.rows();
  const Eigen::MatrixXd design = build_design(X, ridge);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(design.rows());
  rhs.head(n) = y;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  const Eigen::VectorXd rdiag = qr.matrixR().diagonal().cwiseAbs();
  if (condition) {
    const double rmin = rdiag.minCoeff();
    *condition = rmin > 0.0 ? rdiag.maxCoeff() / rmin
                            : std::numeric_limits<double>::infinity();
  }
  if (qr.rank() < design.cols()) return false;
  out.beta = qr.solve(rhs);
  return true;
}

} // namespace

LinearModel fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    double ridge) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  if (d < 1) throw std::invalid_argument("fit_ols: need at least one feature");
  if (n != y.size())
    throw std::invalid_argument("fit_ols: X rows and y length differ");
  if (ridge < 0.0) throw std::invalid_argument("fit_ols: negative ridge");
  if (n < 1) throw std::invalid_argument("fit_ols: empty dataset");
  if (ridge == 0.0 && n < d + 1)
    throw std::invalid_argument(
        "fit_ols: n < d+1 leaves the coefficients underdetermined (ridge=0)");
  if (!X.allFinite() || !y.allFinite())
    throw std::invalid_argument("fit_ols: non-finite inputs");

  LinearModel m;
  double condition = 0.0;
  if (!try_fit(X, y, ridge, m, &condition)) {
    std::ostringstream msg;
    msg << "fit_ols: rank-deficient design (condition estimate "
        << condition << ")";
    throw std::runtime_error(msg.str());
  }
  return m;
}

double predict(const LinearModel& m, const Eigen::VectorXd& x) {
  if (x.size() != m.feature_dim())
    throw std::invalid_argument("predict: dimension mismatch");
  return m.beta(0) + m.beta.tail(m.feature_dim()).dot(x);
}

Eigen::VectorXd predict(const LinearModel& m, const Eigen::MatrixXd& X) {
  if (X.cols() != m.feature_dim())
    throw std::invalid_argument("predict: dimension mismatch");
  return (X * m.beta.tail(m.feature_dim())).array() + m.beta(0);
}

double loss(const LinearModel& m, const Eigen::MatrixXd& X,
            const Eigen::VectorXd& y) {
  if (X.rows() < 1) throw std::invalid_argument("loss: empty dataset");
  if (X.rows() != y.size())
    throw std::invalid_argument("loss: X rows and y length differ");
  const Eigen::VectorXd r = y - predict(m, X);
  return r.squaredNorm() / static_cast<double>(X.rows());
}

Committee bootstrap_committee(const Eigen::MatrixXd& X,
                              const Eigen::VectorXd& y, int committee_size,
                              double ridge, std::mt19937_64& rng) {
  const Eigen::Index n = X.rows();
  if (n < 2)
    throw std::invalid_argument("bootstrap_committee: need at least 2 rows");
  if (committee_size < 2)
    throw std::invalid_argument("bootstrap_committee: K must be >= 2");
  if (X.rows() != y.size())
    throw std::invalid_argument("bootstrap_committee: X rows and y length differ");

  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  Committee committee;
  committee.members.reserve(committee_size);
  Eigen::MatrixXd Xb(n, X.cols());
  Eigen::VectorXd yb(n);
  for (int k = 0; k < committee_size; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index idx = pick(rng);
      Xb.row(i) = X.row(idx);
      yb(i) = y(idx);
    }
    LinearModel m;
    if (!try_fit(Xb, yb, ridge, m, nullptr)) {
      const double fallback = std::max(ridge, kBootstrapFallbackRidge);
      if (!try_fit(Xb, yb, fallback, m, nullptr))
        throw std::runtime_error(
            "bootstrap_committee: resample unfixable even with fallback ridge");
    }
    committee.members.push_back(std::move(m));
  }
  return committee;
}

void write_model_csv(const LinearModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("write_model_csv: cannot open '" + path + "'");
  out << "intercept";
  for (Eigen::Index j = 1; j < m.beta.size(); ++j) out << ",b" << j;
  out << "\n";
  char buf[64];
  for (Eigen::Index j = 0; j < m.beta.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g", m.beta(j));
    out << (j ? "," : "") << buf;
  }
  out << "\n";
}

} // namespace sal
