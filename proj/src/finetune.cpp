#include "transferlm/finetune.hpp"

#include <cmath>
#include <string>

namespace transferlm {

namespace {

void check_square_symmetric(const Eigen::MatrixXd& g) {
  if (g.rows() != g.cols())
    throw DimensionMismatch("Gram matrix must be square, got " +
                            std::to_string(g.rows()) + "x" + std::to_string(g.cols()));
  const double scale = g.cwiseAbs().maxCoeff();
  const double asym = (g - g.transpose()).cwiseAbs().maxCoeff();
  if (scale > 0.0 && asym > 1e-12 * scale)
    throw NonSPDGram("matrix is not symmetric within tolerance");
}

}  // namespace

EigenDecomposition eigendecompose_spd(const Eigen::MatrixXd& gram) {
  check_square_symmetric(gram);
  const Eigen::Index d = gram.rows();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success)
    throw NonSPDGram("eigendecomposition failed to converge");

  EigenDecomposition eig;
  eig.P.resize(d, d);
  eig.lambdas.resize(d);
  // Eigen returns ascending order; flip to descending.
  for (Eigen::Index j = 0; j < d; ++j) {
    eig.lambdas(j) = solver.eigenvalues()(d - 1 - j);
    eig.P.col(j) = solver.eigenvectors().col(d - 1 - j);
    for (Eigen::Index i = 0; i < d; ++i) {
      if (eig.P(i, j) != 0.0) {
        if (eig.P(i, j) < 0.0) eig.P.col(j) = -eig.P.col(j);
        break;
      }
    }
  }
  if (eig.lambdas(d - 1) <= 0.0)
    throw NonSPDGram("matrix is not positive definite (min eigenvalue " +
                     std::to_string(eig.lambdas(d - 1)) + ")");
  return eig;
}

TransferOperator make_transfer_operator(const EigenDecomposition& eig_T,
                                        const Eigen::MatrixXd& gram_T, double alpha,
                                        long k) {
  if (!(alpha > 0.0)) throw DomainError("step size alpha must be positive");
  if (k < 0) throw DomainError("iteration count k must be nonnegative");

  const Eigen::Index d = gram_T.rows();
  TransferOperator op;
  op.alpha = alpha;
  op.k = k;
  op.gram_T = gram_T;
  op.eig = eig_T;
  op.A = Eigen::MatrixXd::Identity(d, d) - alpha * gram_T;
  op.divergent_step = alpha >= 2.0 / eig_T.lambdas(0);

  if (k == 0) {
    op.A_pow_k = Eigen::MatrixXd::Identity(d, d);
  } else if (k == 1) {
    op.A_pow_k = op.A;
  } else {
    Eigen::VectorXd w(d);
    for (Eigen::Index i = 0; i < d; ++i)
      w(i) = std::pow(1.0 - alpha * eig_T.lambdas(i), static_cast<double>(k));
    op.A_pow_k = eig_T.P * w.asDiagonal() * eig_T.P.transpose();
    op.A_pow_k = (0.5 * (op.A_pow_k + op.A_pow_k.transpose())).eval();
  }
  return op;
}

TransferOperator make_transfer_operator(const Eigen::MatrixXd& gram_T, double alpha,
                                        long k) {
  return make_transfer_operator(eigendecompose_spd(gram_T), gram_T, alpha, k);
}

Eigen::VectorXd fine_tune(const Eigen::VectorXd& beta_S, const Eigen::VectorXd& beta_T,
                          const TransferOperator& op) {
  const Eigen::Index d = op.A_pow_k.rows();
  if (beta_S.size() != d || beta_T.size() != d)
    throw DimensionMismatch("coefficient vectors do not match operator dimension " +
                            std::to_string(d));
  if (op.k == 0) return beta_S;
  return op.A_pow_k * beta_S +
         (Eigen::MatrixXd::Identity(d, d) - op.A_pow_k) * beta_T;
}

Eigen::VectorXd eigen_coordinates(const Eigen::VectorXd& beta,
                                  const EigenDecomposition& eig) {
  if (beta.size() != eig.P.rows())
    throw DimensionMismatch("vector length does not match eigenbasis dimension");
  return eig.P.transpose() * beta;
}

Eigen::VectorXd combine_with_weight(const Eigen::MatrixXd& W,
                                    const Eigen::VectorXd& beta_S,
                                    const Eigen::VectorXd& beta_T) {
  const Eigen::Index d = W.rows();
  if (W.cols() != d || beta_S.size() != d || beta_T.size() != d)
    throw DimensionMismatch("weight matrix and coefficient vectors must share dimension");
  return W * beta_S + (Eigen::MatrixXd::Identity(d, d) - W) * beta_T;
}

}  // namespace transferlm
