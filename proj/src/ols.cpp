#include "transferlm/ols.hpp"

#include <string>

namespace transferlm {

double estimate_noise_variance(const Dataset& data, const Eigen::VectorXd& beta_hat) {
  if (beta_hat.size() != data.dim())
    throw DimensionMismatch("beta length " + std::to_string(beta_hat.size()) +
                            " does not match design width " + std::to_string(data.dim()));
  if (data.y.size() != data.n())
    throw DimensionMismatch("response length does not match design rows");
  if (data.n() <= data.dim())
    throw TooFewSamples("need N > D for a noise-variance estimate, got N=" +
                        std::to_string(data.n()) + " D=" + std::to_string(data.dim()));
  return (data.y - data.X * beta_hat).squaredNorm() /
         static_cast<double>(data.n() - data.dim());
}

FittedModel fit_ols(const Dataset& data) {
  const Eigen::Index n = data.n();
  const Eigen::Index d = data.dim();
  if (data.y.size() != n)
    throw DimensionMismatch("response length " + std::to_string(data.y.size()) +
                            " does not match design rows " + std::to_string(n));
  if (n <= d)
    throw TooFewSamples("need N > D, got N=" + std::to_string(n) +
                        " D=" + std::to_string(d));

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(data.X);
  qr.setThreshold(1e-10);
  if (qr.rank() < d)
    throw RankDeficient("design has column rank " + std::to_string(qr.rank()) +
                        " < " + std::to_string(d));

  FittedModel m;
  m.n = n;
  m.d = d;
  m.gram = Eigen::MatrixXd::Zero(d, d);
  m.gram.selfadjointView<Eigen::Lower>().rankUpdate(data.X.adjoint());
  m.gram = m.gram.selfadjointView<Eigen::Lower>();

  Eigen::LLT<Eigen::MatrixXd> llt(m.gram);
  if (llt.info() != Eigen::Success)
    throw RankDeficient("Gram matrix Cholesky failed; design effectively rank-deficient");

  m.beta_hat = llt.solve(data.X.transpose() * data.y);
  m.gram_inv = llt.solve(Eigen::MatrixXd::Identity(d, d));
  m.gram_inv = (0.5 * (m.gram_inv + m.gram_inv.transpose())).eval();
  m.sigma2_hat = estimate_noise_variance(data, m.beta_hat);
  return m;
}

}  // namespace transferlm
