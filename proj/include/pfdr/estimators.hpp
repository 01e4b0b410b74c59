#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "pfdr/dp_sampler.hpp"
#include "pfdr/mixture.hpp"

namespace pfdr {

struct PfdrCurvePoint {
  double gamma = 0.0;
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

struct PosteriorSummary {
  double pi_mean = 0.0;
  double pi_lo = 0.0;
  double pi_hi = 0.0;
  double credible_level = 0.9;
  double ess_pi = 0.0;
  std::vector<PfdrCurvePoint> pfdr_curve;
  std::size_t clipped = 0; // per-draw pFDR values clipped to 1
};

inline constexpr double kDefaultCredibleLevel = 0.9;

// Pointwise posterior mean and equal-tailed interval of
// pi^(t) gamma / F^(t)(gamma) over the draws. Needs at least two draws and a
// strictly increasing grid inside (0,1).
PosteriorSummary summarize(std::span<const PosteriorDraw> draws, std::span<const double> gamma_grid,
                           double level = kDefaultCredibleLevel);

// #{p > lambda} / (m (1 - lambda)), clipped to [0,1].
double storey_pi(std::span<const double> pvalues, double lambda);
// storey_pi(lambda) gamma / (max(R(gamma), 1) / m), R(gamma) = #{p <= gamma}.
double storey_pfdr(std::span<const double> pvalues, double lambda, double gamma);

// Exact sup |F_m(x) - F(x)| between the empirical cdf and a model cdf.
double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf);
double ecdf_sup_distance(std::span<const double> pvalues, const PValueMixture& model);
// Asymptotic Kolmogorov tail probability with the Stephens small-sample
// correction.
double ks_pvalue(double statistic, std::size_t n);

// N / (1 + 2 sum rho_k), summing autocorrelations until the first
// nonpositive lag. Constant series return N.
double effective_sample_size(std::span<const double> series);

// Type-7 (linear interpolation) sample quantile of an unsorted sample.
double sample_quantile(std::vector<double> values, double q);

} // namespace pfdr
