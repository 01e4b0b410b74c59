#include "pfdr/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include <math.h>

#include "pfdr/errors.hpp"
#include "pfdr/quadrature.hpp"

namespace pfdr::special {

double log_gamma(double x) {
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

double log_beta(double a, double b) {
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

namespace {

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double x, double a, double b) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-15;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kIncBetaMaxIter; ++m) {
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
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  std::ostringstream msg;
  msg << "incomplete beta continued fraction did not converge in " << kIncBetaMaxIter
      << " iterations (x=" << x << ", a=" << a << ", b=" << b << ")";
  throw NumericError(msg.str());
}

// Returns {I_x(a,b), 1 - I_x(a,b)}, each computed from the branch that
// avoids subtractive cancellation where possible.
std::pair<double, double> inc_beta_pair(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("incomplete beta requires a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("incomplete beta requires x in [0,1]");
  if (x == 0.0) return {0.0, 1.0};
  if (x == 1.0) return {1.0, 0.0};
  const double log_front = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    const double lower = std::exp(log_front) * beta_continued_fraction(x, a, b) / a;
    return {lower, 1.0 - lower};
  }
  const double upper = std::exp(log_front) * beta_continued_fraction(1.0 - x, b, a) / b;
  return {1.0 - upper, upper};
}

} // namespace

double inc_beta(double x, double a, double b) { return inc_beta_pair(x, a, b).first; }

double inc_beta_complement(double x, double a, double b) {
  return inc_beta_pair(x, a, b).second;
}

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double student_t_pdf(double t, double df) {
  const double log_norm = log_gamma(0.5 * (df + 1.0)) - log_gamma(0.5 * df) -
                          0.5 * std::log(df * std::numbers::pi);
  return std::exp(log_norm - 0.5 * (df + 1.0) * std::log1p(t * t / df));
}

double student_t_sf(double t, double df) {
  const double tail = 0.5 * inc_beta(df / (df + t * t), 0.5 * df, 0.5);
  return t >= 0.0 ? tail : 1.0 - tail;
}

double noncentral_t_pdf(double t, double df, double delta) {
  // T = (Z + delta) / U with U = sqrt(V / df), V ~ chi^2_df, so
  // f(t) = int_0^inf phi(t u - delta) u f_U(u) du.
  const double half = 0.5 * df;
  const double log_chi2_norm = -half * std::numbers::ln2 - log_gamma(half);
  auto integrand = [&](double u) {
    if (u <= 0.0) return 0.0;
    const double v = df * u * u;
    const double log_fu = std::log(2.0 * df * u) + (half - 1.0) * std::log(v) - 0.5 * v +
                          log_chi2_norm;
    const double r = t * u - delta;
    return std::exp(log_fu - 0.5 * r * r + std::log(u)) / std::sqrt(2.0 * std::numbers::pi);
  };
  const double v_max = df + 40.0 * std::sqrt(2.0 * df) + 200.0;
  const double u_max = std::sqrt(v_max / df);
  std::vector<double> cuts{0.0, 1.0, u_max};
  if (t != 0.0) {
    const double centre = delta / t;
    const double width = 1.0 / std::fabs(t);
    for (double c : {centre - 10.0 * width, centre, centre + 10.0 * width}) {
      if (c > 0.0 && c < u_max) cuts.push_back(c);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  return integrate_gk15(integrand, cuts, 1e-12).value;
}

namespace {

// log density of U = sqrt(V / df), V ~ chi^2_df.
double log_chi_scale_density(double u, double df) {
  const double half = 0.5 * df;
  const double v = df * u * u;
  return std::log(2.0 * df * u) + (half - 1.0) * std::log(v) - 0.5 * v - half * std::numbers::ln2 -
         log_gamma(half);
}

// int_0^inf tail(t u - delta) f_U(u) du, with tail = Phi or 1 - Phi.
double chi_mixture_integral(double t, double df, double delta, bool upper) {
  auto integrand = [&](double u) {
    if (u <= 0.0) return 0.0;
    const double r = t * u - delta;
    const double tail = upper ? normal_sf(r) : normal_cdf(r);
    if (tail <= 0.0) return 0.0;
    return std::exp(log_chi_scale_density(u, df) + std::log(tail));
  };
  const double v_max = df + 40.0 * std::sqrt(2.0 * df) + 200.0;
  const double u_max = std::sqrt(v_max / df);
  std::vector<double> cuts{0.0, 1.0, u_max};
  if (t != 0.0) {
    for (double c : {(delta - 10.0) / t, delta / t, (delta + 10.0) / t}) {
      if (c > 0.0 && c < u_max) cuts.push_back(c);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  return integrate_gk15(integrand, cuts, 1e-12).value;
}

} // namespace

double noncentral_t_sf(double t, double df, double delta) { return chi_mixture_integral(t, df, delta, true); }

double noncentral_t_cdf(double t, double df, double delta) { return chi_mixture_integral(t, df, delta, false); }

double upper_quantile(const std::function<double(double)>& sf,
                      const std::function<double(double)>& pdf, double p, double lo,
                      double hi, double tol) {
  const double s_lo = sf(lo);
  const double s_hi = sf(hi);
  if (!(s_lo >= p && p >= s_hi)) {
    std::ostringstream msg;
    msg << "upper_quantile: bracket [" << lo << ", " << hi << "] with tails [" << s_lo << ", "
        << s_hi << "] does not contain p=" << p;
    throw NumericError(msg.str());
  }
  for (int iter = 0; iter < 400 && hi - lo > tol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sf(mid) >= p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double z = 0.5 * (lo + hi);
  const double density = pdf(z);
  if (density > 0.0) {
    const double refined = z + (sf(z) - p) / density;
    if (refined >= lo && refined <= hi) return refined;
  }
  return z;
}

} // namespace pfdr::special
