#pragma once

// Independent reference computations for tests. Nothing here calls into the
// library's special functions or quadrature.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace pfdr::oracle {

// Double-exponential (tanh-sinh) quadrature on (a, b); tolerates integrable
// endpoint singularities. Halves the step until two levels agree.
inline double tanh_sinh(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  constexpr double kHalfPi = 1.5707963267948966;
  // Sum of w_k * (f(mid - half*x_k) + f(mid + half*x_k)) over k = start, start+stride, ...
  auto level_sum = [&](double h, bool odd_only) {
    double sum = odd_only ? 0.0 : kHalfPi * f(mid);
    for (int k = 1;; k += odd_only ? 2 : 1) {
      const double t = k * h;
      if (t > 6.5) break;
      const double s = kHalfPi * std::sinh(t);
      const double c = std::cosh(s);
      const double w = kHalfPi * std::cosh(t) / (c * c);
      // 1 - tanh(s) without cancellation
      const double gap = 1.0 / (std::exp(s) * c);
      const double xl = a + half * gap;
      const double xr = b - half * gap;
      // each side stops contributing once it rounds onto its endpoint
      const bool left = xl > a;
      const bool right = xr < b;
      if (!left && !right) break;
      if (left) sum += w * f(xl);
      if (right) sum += w * f(xr);
    }
    return sum;
  };
  double h = 0.5;
  double sum = level_sum(h, false);
  double estimate = h * half * sum;
  for (int level = 0; level < 12; ++level) {
    h *= 0.5;
    sum += level_sum(h, true);
    const double next = h * half * sum;
    if (std::fabs(next - estimate) <= tol * std::max(1.0, std::fabs(next))) return next;
    estimate = next;
  }
  return estimate;
}

// I_x(0.5, 3) from the exact antiderivative of t^{-1/2}(1-t)^2 and B(0.5,3)=16/15.
inline double beta_half_three_cdf(double x) {
  const double r = std::sqrt(x);
  return (2.0 * r - 4.0 / 3.0 * x * r + 0.4 * x * x * r) * 15.0 / 16.0;
}

// min over a dense uniform grid of (1 - F(l)) / (1 - l), l in [0, upper].
inline double brute_force_pi(const std::function<double(double)>& cdf, double upper = 1.0 - 1e-7,
                             int points = 200000) {
  double best = 1.0;
  for (int i = 0; i <= points; ++i) {
    const double l = upper * i / points;
    best = std::min(best, (1.0 - cdf(l)) / (1.0 - l));
  }
  // add a geometric tail toward 1 so the limit is reached
  for (int j = 1; j <= 60; ++j) {
    const double l = 1.0 - std::pow(10.0, -0.125 * j);
    if (l > upper) break;
    best = std::min(best, (1.0 - cdf(l)) / (1.0 - l));
  }
  return best;
}

inline double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }

// Second derivative by central differences.
inline double second_derivative(const std::function<double(double)>& f, double x, double h = 1e-4) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

// Discretized (a, b) posterior for one beta cluster under the G0
// pushforward prior; midpoint rule on an na x nb grid.
struct GridPosterior {
  double mean_a = 0.0;
  double mean_b = 0.0;
  double sd_a = 0.0;
  double sd_b = 0.0;
};

inline GridPosterior beta_grid_posterior(const std::vector<double>& x, double sigma_a, double sigma_b, double eps_b,
                                         double a_lo, double a_hi, double b_lo, double b_hi, int na, int nb) {
  double s1 = 0.0;
  double s2 = 0.0;
  for (double v : x) {
    s1 += std::log(v);
    s2 += std::log1p(-v);
  }
  const double n = static_cast<double>(x.size());
  std::vector<double> logp(static_cast<std::size_t>(na) * nb);
  double top = -INFINITY;
  for (int i = 0; i < na; ++i) {
    const double a = a_lo + (i + 0.5) * (a_hi - a_lo) / na;
    for (int j = 0; j < nb; ++j) {
      const double b = b_lo + (j + 0.5) * (b_hi - b_lo) / nb;
      const double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
      // prior density of a = exp(-|La|), |La| half-normal; b - eps = exp(|Lb|)
      const double la = -std::log(a);
      const double lb = std::log(b - eps_b);
      const double lprior = -0.5 * (la * la) / (sigma_a * sigma_a) - std::log(a) - 0.5 * (lb * lb) / (sigma_b * sigma_b) -
                            std::log(b - eps_b);
      const double v = (a - 1.0) * s1 + (b - 1.0) * s2 - n * lbeta + lprior;
      logp[static_cast<std::size_t>(i) * nb + j] = v;
      top = std::max(top, v);
    }
  }
  double z = 0.0;
  double ma = 0.0;
  double mb = 0.0;
  double qa = 0.0;
  double qb = 0.0;
  for (int i = 0; i < na; ++i) {
    const double a = a_lo + (i + 0.5) * (a_hi - a_lo) / na;
    for (int j = 0; j < nb; ++j) {
      const double b = b_lo + (j + 0.5) * (b_hi - b_lo) / nb;
      const double w = std::exp(logp[static_cast<std::size_t>(i) * nb + j] - top);
      z += w;
      ma += w * a;
      mb += w * b;
      qa += w * a * a;
      qb += w * b * b;
    }
  }
  ma /= z;
  mb /= z;
  return {ma, mb, std::sqrt(std::max(0.0, qa / z - ma * ma)), std::sqrt(std::max(0.0, qb / z - mb * mb))};
}

} // namespace pfdr::oracle
