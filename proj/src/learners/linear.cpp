#include "textcausal/learners/linear.hpp"

#include <cmath>
#include <string>

#include "textcausal/common/errors.hpp"

namespace textcausal {

namespace {

void check_inputs(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() != y.size()) {
    throw ShapeError("features have " + std::to_string(x.rows()) +
                     " rows but targets have " + std::to_string(y.size()));
  }
  if (!x.allFinite() || !y.allFinite()) {
    throw NumericError("non-finite value in regression inputs");
  }
}

}  // namespace

LinearModel fit_ols(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets) {
  check_inputs(features, targets);
  const Eigen::Index n = features.rows();
  const Eigen::Index p = features.cols();
  if (n < p + 1) {
    throw ParameterError("OLS needs rows >= columns + 1 (" + std::to_string(n) +
                         " rows, " + std::to_string(p) + " columns)");
  }
  Eigen::MatrixXd design(n, p + 1);
  design.col(0).setOnes();
  design.rightCols(p) = features;

  const Eigen::MatrixXd gram = design.transpose() * design;
  const Eigen::VectorXd moment = design.transpose() * targets;

  LinearModel model;
  Eigen::VectorXd beta;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  const double scale = std::max(gram.diagonal().maxCoeff(), 1.0);
  const auto& d = ldlt.vectorD();
  const bool singular = ldlt.info() != Eigen::Success ||
                        d.cwiseAbs().minCoeff() <= 1e-12 * scale;
  if (!singular) {
    beta = ldlt.solve(moment);
  } else {
    const double jitter = 1e-8 * scale;
    Eigen::MatrixXd ridged = gram;
    ridged.diagonal().tail(p).array() += jitter;
    Eigen::LDLT<Eigen::MatrixXd> retry(ridged);
    if (retry.info() != Eigen::Success ||
        retry.vectorD().cwiseAbs().minCoeff() <= 1e-14 * scale) {
      throw SingularityError("normal equations remain singular after jitter");
    }
    beta = retry.solve(moment);
    model.jittered = true;
  }
  if (!beta.allFinite()) throw SingularityError("OLS solution is not finite");
  model.intercept = beta(0);
  model.weights = beta.tail(p);
  return model;
}

LinearModel fit_elastic_net(const Eigen::MatrixXd& features,
                            const Eigen::VectorXd& targets, double l1, double l2,
                            int max_iter, double tol) {
  check_inputs(features, targets);
  if (l1 < 0.0 || l2 < 0.0) throw ParameterError("l1 and l2 must be >= 0");
  if (max_iter < 1) throw ParameterError("max_iter must be >= 1");
  const Eigen::Index n = features.rows();
  const Eigen::Index p = features.cols();
  if (n < 1) throw ParameterError("elastic net needs at least one row");
  const double inv_n = 1.0 / static_cast<double>(n);

  const Eigen::RowVectorXd x_mean = features.colwise().mean();
  const double y_mean = targets.mean();
  const Eigen::MatrixXd xc = features.rowwise() - x_mean;
  // Mean squared column norms; zero marks a constant column.
  const Eigen::VectorXd col_sq = xc.colwise().squaredNorm().transpose() * inv_n;

  Eigen::VectorXd w = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd residual = targets.array() - y_mean;

  LinearModel model;
  model.regularization = l2 > 0.0 ? Regularization::kElasticNet
                         : l1 > 0.0 ? Regularization::kL1
                                    : Regularization::kNone;
  model.l1 = l1;
  model.l2 = l2;
  model.converged = false;

  for (int iter = 1; iter <= max_iter; ++iter) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (col_sq(j) <= 1e-15) continue;
      const double old = w(j);
      const double rho = xc.col(j).dot(residual) * inv_n + col_sq(j) * old;
      const double updated = soft_threshold(rho, l1) / (col_sq(j) + l2);
      if (updated != old) {
        residual.noalias() -= (updated - old) * xc.col(j);
        w(j) = updated;
        max_change = std::max(max_change, std::abs(updated - old));
      }
    }
    model.iterations = iter;
    if (max_change < tol) {
      model.converged = true;
      break;
    }
  }
  model.weights = w;
  model.intercept = y_mean - x_mean.dot(w);
  return model;
}

Eigen::VectorXd predict(const LinearModel& model, const Eigen::MatrixXd& features) {
  if (features.cols() != model.weights.size()) {
    throw ShapeError("linear model expects " + std::to_string(model.weights.size()) +
                     " features, got " + std::to_string(features.cols()));
  }
  Eigen::VectorXd out = features * model.weights;
  out.array() += model.intercept;
  return out;
}

}  // namespace textcausal
