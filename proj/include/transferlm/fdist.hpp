#pragma once

#include "transferlm/errors.hpp"

namespace transferlm {

/// Regularized incomplete beta function I_x(a, b), absolute accuracy ~1e-12.
/// Continued-fraction evaluation with the symmetry switch at
/// x > (a + 1) / (a + b + 2).
double reg_inc_beta(double x, double a, double b);

/// Fisher-Snedecor F(d1, d2) distribution function at f >= 0.
double f_cdf(double f, int d1, int d2);

/// Upper tail P(F >= f); computed directly for full relative precision on
/// small tail probabilities.
double f_sf(double f, int d1, int d2);

/// Density of F(d1, d2) at f > 0.
double f_pdf(double f, int d1, int d2);

/// Quantile of order p in (0, 1); inverts f_cdf by bracketed bisection
/// followed by Newton polishing on the density.
double f_quantile(double p, int d1, int d2);

}  // namespace transferlm
