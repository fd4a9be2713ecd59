#ifndef CITEFIT_SPECIAL_HPP
#define CITEFIT_SPECIAL_HPP

#include <cmath>
#include <span>

namespace citefit {

// Scaled complementary error function exp(x^2) * erfc(x).
// Finite for all x >= -26.6; diverges to +inf below that (returned as inf).
double erfcx(double x);

// Standard normal CDF and survival function, accurate in both tails.
double norm_cdf(double x);
double norm_sf(double x);

// Regularized lower/upper incomplete gamma P(a,x), Q(a,x) for a > 0, x >= 0.
// P + Q == 1 to within rounding; relative accuracy ~1e-14 over tested range.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

// log(exp(a) + exp(b)) without overflow; -inf operands behave as exp = 0.
double log_sum_exp(double a, double b);
double log_sum_exp(std::span<const double> v);

// log(exp(a) - exp(b)) for a >= b; returns -inf when a == b.
double log_diff_exp(double a, double b);

// log(e^x - 1) for x > 0, stable near 0 and for large x.
double log_expm1(double x);

}  // namespace citefit

#endif
