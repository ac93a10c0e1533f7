#pragma once

namespace epiflow::gammafn {

/// Regularized lower incomplete gamma P(a, x): series for x < a+1,
/// continued fraction otherwise.
double reg_lower(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double reg_upper(double a, double x);

/// CDF of Gamma(shape, rate) at x.
double gamma_cdf(double x, double shape, double rate);

/// Quantile of Gamma(shape, rate), bisection on the CDF to 1e-10.
double gamma_quantile(double p, double shape, double rate);

}  // namespace epiflow::gammafn
