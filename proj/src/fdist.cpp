#include "transferlm/fdist.hpp"

#include <cmath>
#include <string>

namespace transferlm {

namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 2000;

// Modified Lentz evaluation of the incomplete-beta continued fraction.
double beta_cf(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= kEps) return h;
  }
  throw Error("incomplete beta continued fraction did not converge (a=" +
              std::to_string(a) + ", b=" + std::to_string(b) + ", x=" +
              std::to_string(x) + ")");
}

void check_dof(int d1, int d2) {
  if (d1 < 1 || d2 < 1)
    throw DomainError("degrees of freedom must be positive, got d1=" +
                      std::to_string(d1) + " d2=" + std::to_string(d2));
}

}  // namespace

double reg_inc_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw DomainError("beta shape parameters must be positive");
  if (!(x >= 0.0 && x <= 1.0))
    throw DomainError("incomplete beta argument must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  if (a == b && x == 0.5) return 0.5;  // exact by symmetry
  const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                       a * std::log(x) + b * std::log1p(-x);
  const double bt = std::exp(ln_bt);
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * beta_cf(a, b, x) / a;
  return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

double f_cdf(double f, int d1, int d2) {
  check_dof(d1, d2);
  if (!(f >= 0.0)) throw DomainError("F cdf argument must be nonnegative");
  if (f == 0.0) return 0.0;
  const double x = d1 * f / (d1 * f + d2);
  return reg_inc_beta(x, 0.5 * d1, 0.5 * d2);
}

double f_sf(double f, int d1, int d2) {
  check_dof(d1, d2);
  if (!(f >= 0.0)) throw DomainError("F tail argument must be nonnegative");
  if (f == 0.0) return 1.0;
  const double x = d2 / (d2 + d1 * f);
  return reg_inc_beta(x, 0.5 * d2, 0.5 * d1);
}

double f_pdf(double f, int d1, int d2) {
  check_dof(d1, d2);
  if (!(f > 0.0)) throw DomainError("F density evaluated at nonpositive point");
  const double a = 0.5 * d1;
  const double b = 0.5 * d2;
  const double ln_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  const double r = static_cast<double>(d1) / static_cast<double>(d2);
  const double ln_pdf = a * std::log(r) + (a - 1.0) * std::log(f) -
                        (a + b) * std::log1p(r * f) - ln_beta;
  return std::exp(ln_pdf);
}

double f_quantile(double p, int d1, int d2) {
  check_dof(d1, d2);
  if (!(p > 0.0 && p < 1.0))
    throw DomainError("quantile order must lie strictly in (0, 1)");

  double lo = 0.0;
  double hi = 1.0;
  while (f_cdf(hi, d1, d2) < p && hi < 1e12) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f_cdf(mid, d1, d2) < p)
      lo = mid;
    else
      hi = mid;
  }
  double f = 0.5 * (lo + hi);
  for (int i = 0; i < 8; ++i) {
    const double err = f_cdf(f, d1, d2) - p;
    if (std::fabs(err) <= 1e-13) break;
    const double density = f_pdf(f, d1, d2);
    if (!(density > 0.0)) break;
    const double step = err / density;
    const double next = f - step;
    if (!(next > lo && next < hi)) break;
    f = next;
  }
  return f;
}

}  // namespace transferlm
