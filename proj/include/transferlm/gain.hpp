#pragma once

#include <Eigen/Dense>
#include <utility>

#include "transferlm/errors.hpp"
#include "transferlm/finetune.hpp"

namespace transferlm {

/// Ground-truth task parameters (or plug-in estimates when used for
/// diagnostics): true coefficients and noise variances of both tasks.
struct TaskTruth {
  Eigen::VectorXd beta_S;
  Eigen::VectorXd beta_T;
  double sigma2_S = 1.0;
  double sigma2_T = 1.0;
};

/// The gain matrix H_k together with its extreme eigenvalues. For a new
/// observation x, x' H_k x is the quadratic-prediction-error improvement of
/// the fine-tuned model over the target-only model; positive means transfer
/// helps at x.
struct GainReport {
  Eigen::MatrixXd H_k;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  long k = 0;
  double alpha = 0.0;
};

/// Omega_k = (1/alpha) gram_T_inv (I - A^k).
Eigen::MatrixXd omega_matrix(const TransferOperator& op,
                             const Eigen::MatrixXd& gram_T_inv);

/// alpha^2 Omega_k gram_T Omega_k: the share of the target precision already
/// absorbed after k fine-tuning steps. Equals (I - A^k) gram_T_inv (I - A^k).
Eigen::MatrixXd absorbed_precision(const TransferOperator& op,
                                   const Eigen::MatrixXd& gram_T_inv);

GainReport gain_matrix(const TaskTruth& truth, const Eigen::MatrixXd& gram_S_inv,
                       const Eigen::MatrixXd& gram_T_inv, const TransferOperator& op);

/// Quadratic-form gain x' H_k x.
double gain_at(const Eigen::VectorXd& x, const GainReport& report);

/// Spectral sandwich bounds (lambda_min |x|^2, lambda_max |x|^2) which
/// always enclose gain_at(x).
std::pair<double, double> gain_bounds(const Eigen::VectorXd& x,
                                      const GainReport& report);

/// Covariance of the fine-tuned estimator:
/// V_k = sigma2_S A^k gram_S_inv A^k + sigma2_T alpha^2 Omega_k gram_T Omega_k.
Eigen::MatrixXd variance_matrix(const TaskTruth& truth,
                                const Eigen::MatrixXd& gram_S_inv,
                                const Eigen::MatrixXd& gram_T_inv,
                                const TransferOperator& op);

/// Additive split of the gain into a Kullback-Leibler part (always <= 0)
/// and the log-variance-ratio part U_k(x); they sum to gain_at(x).
struct KlTerms {
  double kl_term = 0.0;
  double u_term = 0.0;
};

KlTerms kl_decomposition(const Eigen::VectorXd& x, const TaskTruth& truth,
                         const Eigen::MatrixXd& gram_S_inv,
                         const Eigen::MatrixXd& gram_T_inv,
                         const TransferOperator& op);

}  // namespace transferlm
