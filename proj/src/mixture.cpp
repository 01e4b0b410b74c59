#include "pfdr/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "pfdr/errors.hpp"
#include "pfdr/special.hpp"

namespace pfdr {

void DiscreteMixingMeasure::validate() const {
  if (atoms.empty()) throw DomainError("mixing measure has no atoms");
  if (atoms.size() != weights.size()) throw DomainError("mixing measure atoms/weights length mismatch");
  double total = 0.0;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    if (!(weights[k] >= 0.0)) throw DomainError("mixing measure has a negative weight");
    if (!atoms[k].is_reflected_j()) {
      std::ostringstream msg;
      msg << "atom " << k << " (a=" << atoms[k].a << ", b=" << atoms[k].b
          << ") violates a in (0,1], b >= 1";
      throw DomainError(msg.str());
    }
    total += weights[k];
  }
  if (std::fabs(total - 1.0) > kWeightSumTol) {
    std::ostringstream msg;
    msg << "mixing weights sum to " << total << ", not 1";
    throw DomainError(msg.str());
  }
}

void PValueMixture::validate() const {
  if (!(pi >= 0.0 && pi <= 1.0)) throw DomainError("null proportion must lie in [0,1]");
  mixing.validate();
}

double TailEnvelope::operator()(double x) const { return C * std::pow(x, 1.0 + eps); }

double beta_log_density(double x, BetaParams p) {
  if (!(x > 0.0 && x < 1.0)) throw DomainError("beta density requires 0 < x < 1");
  if (!(p.a > 0.0 && p.b > 0.0)) throw DomainError("beta density requires a, b > 0");
  return (p.a - 1.0) * std::log(x) + (p.b - 1.0) * std::log1p(-x) - special::log_beta(p.a, p.b);
}

double beta_density(double x, BetaParams p) { return std::exp(beta_log_density(x, p)); }

double beta_cdf(double x, BetaParams p) { return special::inc_beta(std::clamp(x, 0.0, 1.0), p.a, p.b); }

double beta_tail_near_one(double y, BetaParams p) {
  return special::inc_beta(std::clamp(y, 0.0, 1.0), p.b, p.a);
}

double mixture_density(double x, const DiscreteMixingMeasure& g) {
  double acc = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) acc += g.weights[k] * beta_density(x, g.atoms[k]);
  return acc;
}

double mixture_cdf(double x, const DiscreteMixingMeasure& g) {
  double acc = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) acc += g.weights[k] * beta_cdf(x, g.atoms[k]);
  return acc;
}

double mixture_tail_near_one(double y, const DiscreteMixingMeasure& g) {
  double acc = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) acc += g.weights[k] * beta_tail_near_one(y, g.atoms[k]);
  return acc;
}

double mixture_density_at_one(const DiscreteMixingMeasure& g) {
  double acc = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const BetaParams p = g.atoms[k];
    if (p.b == 1.0) acc += g.weights[k] * p.a; // a x^(a-1) at x = 1
    else if (p.b < 1.0) return HUGE_VAL;
  }
  return acc;
}

double model_density(double x, const PValueMixture& m) {
  return m.pi + (1.0 - m.pi) * mixture_density(x, m.mixing);
}

double model_cdf(double x, const PValueMixture& m) {
  const double xc = std::clamp(x, 0.0, 1.0);
  return m.pi * xc + (1.0 - m.pi) * mixture_cdf(xc, m.mixing);
}

double pfdr_model(const PValueMixture& m, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("pfdr requires gamma in (0,1]");
  const double null_part = m.pi * gamma;
  const double denom = null_part + (1.0 - m.pi) * mixture_cdf(gamma, m.mixing);
  if (!(denom > 0.0)) throw DomainError("pfdr requires F(gamma) > 0");
  return std::clamp(null_part / denom, 0.0, 1.0);
}

double pfdr_bar(double pi_f, double f_gamma, double gamma) {
  if (!(gamma > 0.0)) throw DomainError("pfdr_bar requires gamma > 0");
  if (!(f_gamma > 0.0)) throw DomainError("pfdr_bar requires F(gamma) > 0");
  return pi_f * gamma / f_gamma;
}

std::vector<double> pi_grid(double lambda_max) {
  std::vector<double> grid;
  for (int j = 1; j < 60; ++j) {
    const double lambda = 1.0 - std::ldexp(1.0, -j);
    if (lambda > lambda_max) break;
    grid.push_back(lambda);
  }
  return grid;
}

double pi_of_F(const CdfFunction& cdf, double lambda_max, std::optional<double> density_at_one) {
  double best = 1.0;
  for (double lambda : pi_grid(lambda_max)) {
    best = std::min(best, (1.0 - cdf(lambda)) / (1.0 - lambda));
  }
  if (density_at_one) best = std::min(best, *density_at_one);
  return std::clamp(best, 0.0, 1.0);
}

double pi_of_F(const PValueMixture& m, double lambda_max) {
  double best = 1.0;
  for (double lambda : pi_grid(lambda_max)) {
    const double y = 1.0 - lambda;
    const double survival = m.pi * y + (1.0 - m.pi) * mixture_tail_near_one(y, m.mixing);
    best = std::min(best, survival / y);
  }
  best = std::min(best, m.pi + (1.0 - m.pi) * mixture_density_at_one(m.mixing));
  return std::clamp(best, 0.0, 1.0);
}

std::vector<double> default_cm_grid() {
  std::vector<double> grid(201);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = 0.05 * static_cast<double>(i);
  return grid;
}

CmReport cm_check(const CdfFunction& cdf, CmTransform transform, int max_order,
                  const std::vector<double>& y_grid) {
  if (max_order < 1 || max_order > kCmMaxOrder) {
    throw DomainError("cm_check order must lie in [1, 12]");
  }
  if (y_grid.size() < 2) throw DomainError("cm_check needs at least two grid points");
  const double step = (y_grid.back() - y_grid.front()) / static_cast<double>(y_grid.size() - 1);
  if (!(step > 0.0)) throw DomainError("cm_check grid must be increasing");

  auto phi = [&](double y) {
    const double u = std::exp(-y);
    return transform == CmTransform::CdfAtExp ? cdf(u) : 1.0 - cdf(1.0 - u);
  };

  // values[i][k] = phi(y_i + k h)
  std::vector<std::vector<double>> values(y_grid.size(), std::vector<double>(max_order + 1));
  double scale = 0.0;
  for (std::size_t i = 0; i < y_grid.size(); ++i) {
    for (int k = 0; k <= max_order; ++k) {
      values[i][k] = phi(y_grid[i] + k * step);
      scale = std::max(scale, std::fabs(values[i][k]));
    }
  }
  const double tol = 1e-9 * scale;

  CmReport report;
  for (int order = 1; order <= max_order; ++order) {
    for (std::size_t i = 0; i < y_grid.size(); ++i) {
      double diff = 0.0;
      double binom = 1.0;
      for (int k = 0; k <= order; ++k) {
        const double sign = ((order - k) % 2 == 0) ? 1.0 : -1.0;
        diff += sign * binom * values[i][k];
        binom = binom * (order - k) / (k + 1);
      }
      const double signed_diff = (order % 2 == 0) ? diff : -diff;
      if (signed_diff < -tol) {
        report.passes = false;
        report.failure_order = order;
        report.failure_y = y_grid[i];
        return report;
      }
    }
    report.orders_passed = order;
  }
  return report;
}

ProductMixture prop8_construct(const ScalarMeasure& g1, const ScalarMeasure& g2) {
  if (g1.atoms.empty() || g2.atoms.empty()) throw DomainError("prop8_construct needs nonempty measures");
  if (g1.atoms.size() != g1.weights.size() || g2.atoms.size() != g2.weights.size()) {
    throw DomainError("prop8_construct atoms/weights length mismatch");
  }
  ProductMixture out;
  double inverse_c = 0.0;
  for (std::size_t i = 0; i < g1.atoms.size(); ++i) {
    for (std::size_t j = 0; j < g2.atoms.size(); ++j) {
      const BetaParams p{g1.atoms[i], g2.atoms[j]};
      if (!p.is_reflected_j()) throw DomainError("prop8_construct atoms must have a in (0,1], b >= 1");
      const double w = p.a * p.b * std::exp(special::log_beta(p.a, p.b)) * g1.weights[i] * g2.weights[j];
      out.measure.atoms.push_back(p);
      out.measure.weights.push_back(w);
      inverse_c += w;
    }
  }
  if (!(inverse_c > 0.0) || !std::isfinite(inverse_c)) {
    throw DomainError("prop8_construct normalizer is zero or not finite");
  }
  out.normalizer = 1.0 / inverse_c;
  for (double& w : out.measure.weights) w *= out.normalizer;
  return out;
}

EnvelopeReport tail_envelope_check(const DiscreteMixingMeasure& g, const TailEnvelope& env) {
  constexpr int kPoints = 200;
  std::vector<double> grid;
  grid.reserve(2 * kPoints);
  for (int k = 1; k <= kPoints; ++k) grid.push_back(env.delta * std::pow(10.0, -8.0 * k / kPoints));
  for (int k = 1; k < kPoints; ++k) grid.push_back(env.delta * k / kPoints);
  std::sort(grid.begin(), grid.end());

  EnvelopeReport report;
  for (double x : grid) {
    const double tail = mixture_tail_near_one(x, g);
    if (tail > env(x) * (1.0 + 1e-12)) {
      report.ok = false;
      report.first_violation = x;
      return report;
    }
  }
  return report;
}

} // namespace pfdr
