#include "pfdr/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <spdlog/spdlog.h>

#include "pfdr/errors.hpp"
#include "pfdr/kernels.hpp"

namespace pfdr {

double sample_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw DomainError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double effective_sample_size(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 2) return static_cast<double>(n);
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
  double c0 = 0.0;
  for (double v : series) c0 += (v - mean) * (v - mean);
  c0 /= static_cast<double>(n);
  if (!(c0 > 0.0)) return static_cast<double>(n);
  double rho_sum = 0.0;
  for (std::size_t lag = 1; lag < n; ++lag) {
    double ck = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) ck += (series[t] - mean) * (series[t + lag] - mean);
    const double rho = ck / (static_cast<double>(n) * c0);
    if (rho <= 0.0) break;
    rho_sum += rho;
  }
  return static_cast<double>(n) / (1.0 + 2.0 * rho_sum);
}

PosteriorSummary summarize(std::span<const PosteriorDraw> draws, std::span<const double> gamma_grid,
                           double level) {
  if (draws.size() < 2) throw DomainError("summarize needs at least two posterior draws");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("credible level must lie in (0,1)");
  for (std::size_t j = 0; j < gamma_grid.size(); ++j) {
    if (!(gamma_grid[j] > 0.0 && gamma_grid[j] < 1.0)) throw DomainError("gamma grid must lie in (0,1)");
    if (j > 0 && !(gamma_grid[j] > gamma_grid[j - 1])) {
      throw DomainError("gamma grid must be strictly increasing");
    }
  }
  const double tail = 0.5 * (1.0 - level);

  PosteriorSummary out;
  out.credible_level = level;
  std::vector<double> pis;
  pis.reserve(draws.size());
  for (const PosteriorDraw& d : draws) pis.push_back(d.pi);
  out.pi_mean = std::accumulate(pis.begin(), pis.end(), 0.0) / static_cast<double>(pis.size());
  out.pi_lo = sample_quantile(pis, tail);
  out.pi_hi = sample_quantile(pis, 1.0 - tail);
  out.ess_pi = effective_sample_size(pis);

  const kernels::PfdrMatrix matrix = kernels::pfdr_draw_matrix(draws, gamma_grid);
  out.clipped = matrix.clipped;
  if (matrix.clipped > 0) spdlog::info("summarize: clipped {} pFDR draw values to 1", matrix.clipped);

  std::vector<double> column(draws.size());
  for (std::size_t j = 0; j < gamma_grid.size(); ++j) {
    double sum = 0.0;
    for (std::size_t t = 0; t < draws.size(); ++t) {
      column[t] = matrix.at(t, j);
      sum += column[t];
    }
    PfdrCurvePoint point;
    point.gamma = gamma_grid[j];
    point.mean = sum / static_cast<double>(draws.size());
    point.lo = std::min(sample_quantile(column, tail), point.mean);
    point.hi = std::max(sample_quantile(column, 1.0 - tail), point.mean);
    out.pfdr_curve.push_back(point);
  }
  return out;
}

double storey_pi(std::span<const double> pvalues, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("storey lambda must lie in (0,1)");
  if (pvalues.empty()) throw DomainError("storey_pi of an empty sample");
  const auto above = std::count_if(pvalues.begin(), pvalues.end(), [&](double p) { return p > lambda; });
  const double estimate = static_cast<double>(above) / (static_cast<double>(pvalues.size()) * (1.0 - lambda));
  return std::clamp(estimate, 0.0, 1.0);
}

double storey_pfdr(std::span<const double> pvalues, double lambda, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("storey gamma must lie in (0,1)");
  const double pi0 = storey_pi(pvalues, lambda);
  const auto rejected = std::count_if(pvalues.begin(), pvalues.end(), [&](double p) { return p <= gamma; });
  const double rate = static_cast<double>(std::max<std::ptrdiff_t>(rejected, 1)) /
                      static_cast<double>(pvalues.size());
  return pi0 * gamma / rate;
}

double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw DomainError("KS statistic of an empty sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ecdf_sup_distance(std::span<const double> pvalues, const PValueMixture& model) {
  return ks_statistic(pvalues, [&](double x) { return model_cdf(x, model); });
}

double ks_pvalue(double statistic, std::size_t n) {
  if (n == 0) return 1.0;
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  const double lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * statistic;
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-16 * sum) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

} // namespace pfdr
