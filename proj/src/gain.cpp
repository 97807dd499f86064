#include "transferlm/gain.hpp"

#include <cmath>
#include <string>

namespace transferlm {

namespace {

void check_spd_input(const Eigen::MatrixXd& g, const char* name) {
  if (g.rows() != g.cols())
    throw DimensionMismatch(std::string(name) + " must be square");
  Eigen::LLT<Eigen::MatrixXd> llt((0.5 * (g + g.transpose())).eval());
  if (llt.info() != Eigen::Success)
    throw NonSPDGram(std::string(name) + " is not symmetric positive definite");
}

void check_truth(const TaskTruth& truth, Eigen::Index d) {
  if (truth.beta_S.size() != d || truth.beta_T.size() != d)
    throw DimensionMismatch("task coefficients do not match operator dimension " +
                            std::to_string(d));
  if (!(truth.sigma2_S > 0.0) || !(truth.sigma2_T > 0.0))
    throw DomainError("noise variances must be strictly positive");
}

}  // namespace

Eigen::MatrixXd omega_matrix(const TransferOperator& op,
                             const Eigen::MatrixXd& gram_T_inv) {
  const Eigen::Index d = op.A_pow_k.rows();
  if (gram_T_inv.rows() != d || gram_T_inv.cols() != d)
    throw DimensionMismatch("gram_T_inv does not match operator dimension");
  if (!(op.alpha > 0.0)) throw DomainError("operator step size must be positive");
  return (gram_T_inv * (Eigen::MatrixXd::Identity(d, d) - op.A_pow_k)) / op.alpha;
}

Eigen::MatrixXd absorbed_precision(const TransferOperator& op,
                                   const Eigen::MatrixXd& gram_T_inv) {
  const Eigen::MatrixXd omega = omega_matrix(op, gram_T_inv);
  Eigen::MatrixXd m = (op.alpha * op.alpha) * (omega * op.gram_T * omega);
  return (0.5 * (m + m.transpose())).eval();
}

GainReport gain_matrix(const TaskTruth& truth, const Eigen::MatrixXd& gram_S_inv,
                       const Eigen::MatrixXd& gram_T_inv, const TransferOperator& op) {
  const Eigen::Index d = op.A_pow_k.rows();
  if (gram_S_inv.rows() != d || gram_S_inv.cols() != d || gram_T_inv.rows() != d ||
      gram_T_inv.cols() != d)
    throw DimensionMismatch("Gram inverses do not match operator dimension");
  check_truth(truth, d);
  check_spd_input(gram_S_inv, "gram_S_inv");
  check_spd_input(gram_T_inv, "gram_T_inv");

  const Eigen::MatrixXd& Ak = op.A_pow_k;
  Eigen::MatrixXd H =
      truth.sigma2_T * (gram_T_inv - absorbed_precision(op, gram_T_inv)) -
      truth.sigma2_S * (Ak * gram_S_inv * Ak);
  const Eigen::VectorXd shifted_bias = Ak * (truth.beta_T - truth.beta_S);
  H -= shifted_bias * shifted_bias.transpose();
  H = (0.5 * (H + H.transpose())).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H, Eigen::EigenvaluesOnly);
  GainReport report;
  report.H_k = std::move(H);
  report.lambda_min = solver.eigenvalues()(0);
  report.lambda_max = solver.eigenvalues()(d - 1);
  report.k = op.k;
  report.alpha = op.alpha;
  return report;
}

double gain_at(const Eigen::VectorXd& x, const GainReport& report) {
  if (x.size() != report.H_k.rows())
    throw DimensionMismatch("observation does not match gain-matrix dimension");
  return x.dot(report.H_k * x);
}

std::pair<double, double> gain_bounds(const Eigen::VectorXd& x,
                                      const GainReport& report) {
  if (x.size() != report.H_k.rows())
    throw DimensionMismatch("observation does not match gain-matrix dimension");
  const double norm2 = x.squaredNorm();
  return {report.lambda_min * norm2, report.lambda_max * norm2};
}

Eigen::MatrixXd variance_matrix(const TaskTruth& truth,
                                const Eigen::MatrixXd& gram_S_inv,
                                const Eigen::MatrixXd& gram_T_inv,
                                const TransferOperator& op) {
  const Eigen::Index d = op.A_pow_k.rows();
  if (gram_S_inv.rows() != d || gram_S_inv.cols() != d || gram_T_inv.rows() != d ||
      gram_T_inv.cols() != d)
    throw DimensionMismatch("Gram inverses do not match operator dimension");
  check_truth(truth, d);

  const Eigen::MatrixXd& Ak = op.A_pow_k;
  Eigen::MatrixXd v = truth.sigma2_S * (Ak * gram_S_inv * Ak) +
                      truth.sigma2_T * absorbed_precision(op, gram_T_inv);
  return (0.5 * (v + v.transpose())).eval();
}

KlTerms kl_decomposition(const Eigen::VectorXd& x, const TaskTruth& truth,
                         const Eigen::MatrixXd& gram_S_inv,
                         const Eigen::MatrixXd& gram_T_inv,
                         const TransferOperator& op) {
  if (x.size() != op.A_pow_k.rows())
    throw DimensionMismatch("observation does not match operator dimension");
  if (x.isZero(0.0))
    throw ZeroVector("kl_decomposition is undefined at x = 0");

  const double pred_var_T = truth.sigma2_T * x.dot(gram_T_inv * x);
  if (!(pred_var_T > 0.0))
    throw DomainError("target predictive variance is not positive");

  const Eigen::MatrixXd V = variance_matrix(truth, gram_S_inv, gram_T_inv, op);
  const double pred_var_k = x.dot(V * x);
  if (!(pred_var_k > 0.0))
    throw DomainError("fine-tuned predictive variance is not positive");

  const double mean_shift = x.dot(op.A_pow_k * (truth.beta_T - truth.beta_S));
  const double ratio = pred_var_k / pred_var_T;
  // Two Kullback-Leibler divergences of univariate Gaussians; nonnegative,
  // clamped against rounding so kl_term <= 0 holds exactly.
  double two_kl = ratio + (mean_shift * mean_shift - pred_var_T) / pred_var_T -
                  std::log(ratio);
  if (two_kl < 0.0) two_kl = 0.0;

  KlTerms terms;
  terms.kl_term = -pred_var_T * two_kl;
  terms.u_term = -pred_var_T * std::log(ratio);
  return terms;
}

}  // namespace transferlm
