#include "transferlm/transfer_test.hpp"

#include <cmath>
#include <string>

#include "transferlm/fdist.hpp"
#include "transferlm/gain.hpp"

namespace transferlm {

TestStatParts test_statistic_parts(const Eigen::VectorXd& x, const FittedModel& source,
                                   const FittedModel& target,
                                   const TransferOperator& op) {
  const Eigen::Index d = op.A_pow_k.rows();
  if (x.size() != d || source.d != d || target.d != d)
    throw DimensionMismatch("observation, models and operator disagree on dimension");
  if (!(source.sigma2_hat > 0.0) || !(target.sigma2_hat > 0.0))
    throw DomainError("fitted noise variances must be positive");

  const Eigen::VectorXd shrunk = op.A_pow_k * x;
  if (shrunk.norm() <= 1e-12 * x.norm())
    throw DegenerateDirection("A^k x vanishes; test statistic undefined at this x");

  TestStatParts parts;
  parts.var_ratio = target.sigma2_hat / source.sigma2_hat;
  parts.precision_quad =
      x.dot((target.gram_inv - absorbed_precision(op, target.gram_inv)) * x);
  parts.shrunk_norm2 = shrunk.squaredNorm();
  parts.source_quad = shrunk.dot(source.gram_inv * shrunk);
  if (!(parts.source_quad > 0.0))
    throw DegenerateDirection("denominator x' A^k gram_S_inv A^k x is not positive");
  return parts;
}

double test_statistic(const Eigen::VectorXd& x, const FittedModel& source,
                      const FittedModel& target, const TransferOperator& op,
                      const RhoPrior& prior) {
  if (prior.rho < 0.0) throw DomainError("prior radius rho must be nonnegative");
  return test_statistic_parts(x, source, target, op).psi(prior.rho);
}

TestResult p_value(const Eigen::VectorXd& x, const FittedModel& source,
                   const FittedModel& target, const TransferOperator& op,
                   const RhoPrior& prior, double level) {
  if (!(level > 0.0 && level < 1.0))
    throw DomainError("test level must lie strictly in (0, 1)");
  if (target.n <= target.d || source.n <= source.d)
    throw TooFewSamples("both models need N > D for the F test");

  TestResult result;
  result.level = level;
  result.d1 = static_cast<int>(target.n - target.d);
  result.d2 = static_cast<int>(source.n - source.d);
  result.psi = test_statistic(x, source, target, op, prior);
  result.p_value =
      result.psi > 0.0 ? f_sf(result.psi, result.d1, result.d2) : 1.0;
  result.reject_null = result.p_value < level;
  return result;
}

double rho_kl_bound(const Eigen::VectorXd& x, double sigma2_S, double sigma2_T,
                    const RhoPrior& prior) {
  if (!(sigma2_S > 0.0) || !(sigma2_T > 0.0))
    throw DomainError("noise variances must be strictly positive");
  if (prior.rho < 0.0) throw DomainError("prior radius rho must be nonnegative");
  const double u = sigma2_S / sigma2_T;
  const double g = u - std::log(u) - 1.0;
  return g + prior.rho * prior.rho * x.squaredNorm();
}

}  // namespace transferlm
