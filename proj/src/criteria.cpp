#include "sal/criteria.hpp"

#include <cmath>
#include <stdexcept>

namespace sal {

const char* criterion_name(CriterionKind kind) {
  switch (kind) {
    case CriterionKind::Random: return "rnd";
    case CriterionKind::HotellingT2: return "hot";
    case CriterionKind::QbcAmbiguity: return "qbc";
    case CriterionKind::ExpectedModelChange: return "emc";
  }
  throw std::logic_error("criterion_name: unknown kind");
}

CriterionKind parse_criterion(const std::string& name) {
  if (name == "rnd") return CriterionKind::Random;
  if (name == "hot") return CriterionKind::HotellingT2;
  if (name == "qbc") return CriterionKind::QbcAmbiguity;
  if (name == "emc") return CriterionKind::ExpectedModelChange;
  throw std::invalid_argument("unknown criterion '" + name +
                              "' (expected rnd, hot, qbc or emc)");
}

GaussianSummary fit_gaussian_summary(const Eigen::MatrixXd& X, double reg) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  if (n < 2)
    throw std::invalid_argument("fit_gaussian_summary: need at least 2 rows");
  if (reg < 0.0)
    throw std::invalid_argument("fit_gaussian_summary: negative regularization");

  GaussianSummary g;
  g.regularization = reg;
  g.mean = X.colwise().mean();
  const Eigen::MatrixXd centered = X.rowwise() - g.mean.transpose();
  g.covariance =
      (centered.transpose() * centered) / static_cast<double>(n - 1);

  const Eigen::MatrixXd m =
      g.covariance + reg * Eigen::MatrixXd::Identity(d, d);
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error(
        "fit_gaussian_summary: S + reg*I is not positive definite");
  g.inverse_covariance = llt.solve(Eigen::MatrixXd::Identity(d, d));
  return g;
}

double hotelling_t2(const GaussianSummary& g, const Eigen::VectorXd& x) {
  if (x.size() != g.dim())
    throw std::invalid_argument("hotelling_t2: dimension mismatch");
  const Eigen::VectorXd delta = x - g.mean;
  return delta.dot(g.inverse_covariance * delta);
}

double qbc_ambiguity(const Committee& c, const Eigen::VectorXd& x) {
  const int k = c.size();
  Eigen::VectorXd preds(k);
  for (int i = 0; i < k; ++i) preds(i) = predict(c.members[i], x);
  const double mean = preds.mean();
  return (preds.array() - mean).square().sum() / static_cast<double>(k);
}

double emc_score(const Committee& c, const LinearModel& m,
                 const Eigen::VectorXd& x) {
  if (x.size() != m.feature_dim() || c.feature_dim() != m.feature_dim())
    throw std::invalid_argument("emc_score: dimension mismatch");
  Eigen::VectorXd xt(x.size() + 1);
  xt(0) = 1.0;
  xt.tail(x.size()) = x;
  const double fx = predict(m, x);
  double acc = 0.0;
  for (const LinearModel& member : c.members)
    acc += ((predict(member, x) - fx) * xt).norm();
  return acc / static_cast<double>(c.size());
}

double score(CriterionKind kind, const CriterionState& state,
             const Eigen::VectorXd& x) {
  switch (kind) {
    case CriterionKind::Random: {
      if (!state.rng)
        throw std::invalid_argument("score: Random criterion needs an rng");
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      return unit(*state.rng);
    }
    case CriterionKind::HotellingT2:
      if (!state.summary)
        throw std::invalid_argument(
            "score: HotellingT2 needs a GaussianSummary");
      return hotelling_t2(*state.summary, x);
    case CriterionKind::QbcAmbiguity:
      if (!state.committee)
        throw std::invalid_argument("score: QbcAmbiguity needs a committee");
      return qbc_ambiguity(*state.committee, x);
    case CriterionKind::ExpectedModelChange:
      if (!state.committee || !state.model)
        throw std::invalid_argument(
            "score: ExpectedModelChange needs a committee and a model");
      return emc_score(*state.committee, *state.model, x);
  }
  throw std::logic_error("score: unknown criterion kind");
}

} // namespace sal
