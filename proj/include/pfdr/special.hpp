#pragma once

// Special functions used throughout: log-gamma, the regularized incomplete
// beta, and normal / Student t densities, tails and upper-tail quantiles.

#include <functional>

namespace pfdr::special {

inline constexpr double kIncBetaRelTol = 1e-12;
inline constexpr int kIncBetaMaxIter = 300;

// Reentrant log|Gamma(x)| (does not touch the global signgam).
double log_gamma(double x);
double log_beta(double a, double b);

// I_x(a, b). Throws NumericError if the continued fraction does not converge.
double inc_beta(double x, double a, double b);
// 1 - I_x(a, b), evaluated without cancellation for x near 1.
double inc_beta_complement(double x, double a, double b);

double normal_pdf(double z);
double normal_cdf(double z);
double normal_sf(double z);

double student_t_pdf(double t, double df);
double student_t_sf(double t, double df);

// Density of the noncentral t with df degrees of freedom and noncentrality
// delta, by adaptive quadrature over the scale of the chi variate.
double noncentral_t_pdf(double t, double df, double delta);

// P(T > t) and P(T <= t) for the noncentral t, each computed directly so
// that small tail probabilities keep their relative accuracy.
double noncentral_t_sf(double t, double df, double delta);
double noncentral_t_cdf(double t, double df, double delta);

// Solves sf(z) = p for a decreasing survival function by bisection on
// [lo, hi] to absolute width tol, then one Newton step using pdf.
// Throws NumericError if the bracket does not contain the root.
double upper_quantile(const std::function<double(double)>& sf,
                      const std::function<double(double)>& pdf, double p,
                      double lo, double hi, double tol = 1e-12);

} // namespace pfdr::special
