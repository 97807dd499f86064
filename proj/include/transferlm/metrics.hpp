#pragma once

#include <Eigen/Dense>

#include "transferlm/errors.hpp"

namespace transferlm {

/// Root mean squared error over paired samples.
double rmse(const Eigen::VectorXd& y, const Eigen::VectorXd& y_hat);

/// Per-sample best of two candidate predictions (smaller squared error);
/// the unattainable lower bound for any selection rule between them.
Eigen::VectorXd oracle_predict(const Eigen::VectorXd& y, const Eigen::VectorXd& y_hat_T,
                               const Eigen::VectorXd& y_hat_k);

}  // namespace transferlm
