#pragma once

#include <Eigen/Dense>

#include "transferlm/errors.hpp"

namespace transferlm {

/// Orthogonal eigendecomposition of an SPD Gram matrix, with a fixed
/// convention so results are reproducible: eigenvalues descending, and each
/// eigenvector's first nonzero entry positive.
struct EigenDecomposition {
  Eigen::MatrixXd P;
  Eigen::VectorXd lambdas;
};

EigenDecomposition eigendecompose_spd(const Eigen::MatrixXd& gram);

/// The k-step gradient-descent mixing operator on the target quadratic
/// loss: A = I - alpha * gram_T, with A^k kept explicitly. A^k is formed
/// through the eigendecomposition of gram_T, which stays exact for
/// symmetric A and stable at large k.
struct TransferOperator {
  double alpha = 0.0;
  long k = 0;
  Eigen::MatrixXd gram_T;
  Eigen::MatrixXd A;
  Eigen::MatrixXd A_pow_k;
  EigenDecomposition eig;
  /// Set when alpha >= 2 / lambda_max: the underlying gradient descent
  /// diverges, though the closed-form combination stays well-defined.
  bool divergent_step = false;
};

TransferOperator make_transfer_operator(const Eigen::MatrixXd& gram_T, double alpha,
                                        long k);

/// Same, reusing a decomposition already computed for gram_T (e.g. when
/// sweeping over k).
TransferOperator make_transfer_operator(const EigenDecomposition& eig_T,
                                        const Eigen::MatrixXd& gram_T, double alpha,
                                        long k);

/// Closed-form fine-tuned coefficients: A^k beta_S + (I - A^k) beta_T,
/// i.e. k batch-gradient-descent steps on the target loss started at beta_S.
Eigen::VectorXd fine_tune(const Eigen::VectorXd& beta_S, const Eigen::VectorXd& beta_T,
                          const TransferOperator& op);

/// Coordinates of beta in the Gram eigenbasis (P' beta).
Eigen::VectorXd eigen_coordinates(const Eigen::VectorXd& beta,
                                  const EigenDecomposition& eig);

/// Generic matrix-weighted combination W beta_S + (I - W) beta_T.
/// The constant convex combination is the special case W = w * I.
Eigen::VectorXd combine_with_weight(const Eigen::MatrixXd& W,
                                    const Eigen::VectorXd& beta_S,
                                    const Eigen::VectorXd& beta_T);

}  // namespace transferlm
