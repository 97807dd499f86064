#pragma once

#include <Eigen/Dense>

#include "transferlm/errors.hpp"
#include "transferlm/finetune.hpp"
#include "transferlm/ols.hpp"

namespace transferlm {

/// Prior radius: an upper bound on |beta_T - beta_S| / sigma_T, i.e. how far
/// apart the two tasks are allowed to be.
struct RhoPrior {
  double rho = 0.0;
};

/// Outcome of the negative-transfer test for one observation.
struct TestResult {
  double psi = 0.0;
  double p_value = 1.0;
  bool reject_null = false;
  double level = 0.05;
  int d1 = 0;  // N_T - D
  int d2 = 0;  // N_S - D
};

/// The observation-dependent pieces of the test statistic, precomputed so
/// that sweeping over rho is cheap.
struct TestStatParts {
  double var_ratio = 0.0;       // sigma2_T_hat / sigma2_S_hat
  double precision_quad = 0.0;  // x' (gram_T_inv - absorbed_precision) x
  double shrunk_norm2 = 0.0;    // |A^k x|^2
  double source_quad = 0.0;     // x' A^k gram_S_inv A^k x

  double psi(double rho) const {
    return var_ratio * (precision_quad - rho * rho * shrunk_norm2) / source_quad;
  }
};

TestStatParts test_statistic_parts(const Eigen::VectorXd& x, const FittedModel& source,
                                   const FittedModel& target,
                                   const TransferOperator& op);

/// psi_k(x): the computable lower bound of the exact transfer statistic.
/// Strictly decreasing in rho whenever A^k x is nonzero.
double test_statistic(const Eigen::VectorXd& x, const FittedModel& source,
                      const FittedModel& target, const TransferOperator& op,
                      const RhoPrior& prior);

/// Full test: p = P(F >= psi) under F(N_T - D, N_S - D); rejecting the null
/// means the fine-tuned model is predicted to beat the target-only one at x.
TestResult p_value(const Eigen::VectorXd& x, const FittedModel& source,
                   const FittedModel& target, const TransferOperator& op,
                   const RhoPrior& prior, double level = 0.05);

/// Upper bound on twice the KL divergence between the source and target
/// predictive distributions at x: g(sigma2_S / sigma2_T) + rho^2 |x|^2 with
/// g(u) = u - log(u) - 1.
double rho_kl_bound(const Eigen::VectorXd& x, double sigma2_S, double sigma2_T,
                    const RhoPrior& prior);

}  // namespace transferlm
