#pragma once

#include <Eigen/Dense>

#include "transferlm/errors.hpp"

namespace transferlm {

enum class TaskTag { Source, Target };

/// One task's training data: a deterministic design matrix and responses.
/// The design is taken as-given; no intercept column is added implicitly.
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  TaskTag tag = TaskTag::Target;

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index dim() const { return X.cols(); }
};

/// OLS fit of one task. The Gram matrix X'X and its inverse are computed
/// once here and reused by every downstream module.
struct FittedModel {
  Eigen::VectorXd beta_hat;
  Eigen::MatrixXd gram;
  Eigen::MatrixXd gram_inv;
  double sigma2_hat = 0.0;
  Eigen::Index n = 0;
  Eigen::Index d = 0;
};

/// Least-squares fit. Requires N > D and a full-column-rank design
/// (column-pivoted QR with relative pivot threshold 1e-10).
FittedModel fit_ols(const Dataset& data);

/// Residual variance estimate |y - X beta|^2 / (N - D).
double estimate_noise_variance(const Dataset& data, const Eigen::VectorXd& beta_hat);

}  // namespace transferlm
