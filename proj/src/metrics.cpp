#include "transferlm/metrics.hpp"

#include <cmath>

namespace transferlm {

double rmse(const Eigen::VectorXd& y, const Eigen::VectorXd& y_hat) {
  if (y.size() != y_hat.size())
    throw DimensionMismatch("rmse arguments must have equal length");
  if (y.size() == 0) throw EmptyInput("rmse of an empty sample is undefined");
  return std::sqrt((y - y_hat).squaredNorm() / static_cast<double>(y.size()));
}

Eigen::VectorXd oracle_predict(const Eigen::VectorXd& y, const Eigen::VectorXd& y_hat_T,
                               const Eigen::VectorXd& y_hat_k) {
  if (y.size() != y_hat_T.size() || y.size() != y_hat_k.size())
    throw DimensionMismatch("oracle_predict arguments must have equal length");
  if (y.size() == 0) throw EmptyInput("oracle_predict on an empty sample");
  Eigen::VectorXd out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double err_T = y(i) - y_hat_T(i);
    const double err_k = y(i) - y_hat_k(i);
    out(i) = err_T * err_T <= err_k * err_k ? y_hat_T(i) : y_hat_k(i);
  }
  return out;
}

}  // namespace transferlm
