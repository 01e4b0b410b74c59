#include "pfdr/pvalue_models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <spdlog/spdlog.h>

#include "pfdr/errors.hpp"
#include "pfdr/quadrature.hpp"
#include "pfdr/random.hpp"
#include "pfdr/special.hpp"

namespace pfdr {

void TestModel::validate() const {
  if (n < 1) throw DomainError("test model requires n >= 1");
  if (kind == TestKind::TLocation && df < 1) throw DomainError("t model requires df >= 1");
  if (kind == TestKind::ExponentialScale) {
    if (!(theta0 > 0.0)) throw DomainError("exponential scale model requires theta0 > 0");
    if (sidedness == Sidedness::TwoSided) {
      throw DomainError("two-sided p-values require a null-symmetric statistic");
    }
  }
}

namespace {

void check_unit_open(double x) {
  if (!(x > 0.0 && x < 1.0)) {
    std::ostringstream msg;
    msg << "p-value argument " << x << " outside (0,1)";
    throw DomainError(msg.str());
  }
}

double effect(const TestModel& model, double theta1) {
  return std::sqrt(static_cast<double>(model.n)) * (theta1 - model.theta0);
}

double null_sf(const TestModel& model, double z) {
  return model.kind == TestKind::NormalLocation ? special::normal_sf(z)
                                                : special::student_t_sf(z, model.df);
}

double null_pdf(const TestModel& model, double z) {
  return model.kind == TestKind::NormalLocation ? special::normal_pdf(z)
                                                : special::student_t_pdf(z, model.df);
}

// Upper-p quantile of the symmetric null statistic.
double null_upper_quantile(const TestModel& model, double p) {
  auto sf = [&](double z) { return null_sf(model, z); };
  auto pdf = [&](double z) { return null_pdf(model, z); };
  double lo = -1.0;
  double hi = 1.0;
  for (int i = 0; i < 1020 && sf(lo) < p; ++i) lo *= 2.0;
  for (int i = 0; i < 1020 && sf(hi) > p; ++i) hi *= 2.0;
  return special::upper_quantile(sf, pdf, p, lo, hi);
}

// For the t model write g_delta(t) = c |t|^-(df+1) J(delta, t) with
//   J(delta, t) = int_0^inf phi(w - delta sign(t)) w^df exp(-df w^2 / (2 t^2)) dw,
// so density ratios at large |t| avoid the underflow of both densities.
double t_scaled_integral(double df, double delta, double t) {
  const double d = t > 0.0 ? delta : -delta;
  const double inv_t2 = 1.0 / (t * t);
  auto integrand = [&](double w) {
    if (w <= 0.0) return 0.0;
    const double r = w - d;
    return std::exp(-0.5 * r * r + df * std::log(w) - 0.5 * df * w * w * inv_t2);
  };
  const double mode = 0.5 * (d + std::sqrt(d * d + 4.0 * df));
  const double upper = std::max(mode, 0.0) + 40.0;
  std::vector<double> cuts{0.0, upper};
  for (double c : {mode - 10.0, mode, mode + 10.0, std::fabs(t), 10.0 * std::fabs(t)}) {
    if (c > 0.0 && c < upper) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  return integrate_gk15(integrand, cuts, 1e-12).value;
}

constexpr double kScaledRatioThreshold = 1.0;

// g_{theta1}(z) / g_{theta0}(z) for the standardized symmetric models.
double alt_to_null_ratio(const TestModel& model, double delta, double z) {
  if (model.kind == TestKind::NormalLocation) return std::exp(delta * z - 0.5 * delta * delta);
  if (std::fabs(z) < kScaledRatioThreshold) {
    return special::noncentral_t_pdf(z, model.df, delta) / special::student_t_pdf(z, model.df);
  }
  return t_scaled_integral(model.df, delta, z) / t_scaled_integral(model.df, 0.0, z);
}

double alt_sf(const TestModel& model, double delta, double z) {
  if (model.kind == TestKind::NormalLocation) return special::normal_sf(z - delta);
  return special::noncentral_t_sf(z, model.df, delta);
}

double alt_cdf(const TestModel& model, double delta, double z) {
  if (model.kind == TestKind::NormalLocation) return special::normal_cdf(z - delta);
  return special::noncentral_t_cdf(z, model.df, delta);
}

} // namespace

double pvalue_density_one_sided(const TestModel& model, double theta1, double x) {
  model.validate();
  check_unit_open(x);
  if (theta1 == model.theta0) return 1.0;
  if (model.kind == TestKind::ExponentialScale) {
    if (!(theta1 > 0.0)) throw DomainError("exponential scale model requires theta1 > 0");
    const double z = -model.theta0 * std::log(x); // G0^{-1}(1 - x)
    const double log_ratio =
        std::log(model.theta0 / theta1) + z * (1.0 / model.theta0 - 1.0 / theta1);
    return std::exp(log_ratio);
  }
  const double z = null_upper_quantile(model, x);
  return alt_to_null_ratio(model, effect(model, theta1), z);
}

double pvalue_density_two_sided(const TestModel& model, double theta1, double x) {
  model.validate();
  if (model.kind == TestKind::ExponentialScale) {
    throw DomainError("two-sided p-values require a null-symmetric statistic");
  }
  check_unit_open(x);
  if (theta1 == model.theta0) return 1.0;
  const double z = null_upper_quantile(model, 0.5 * x);
  const double delta = effect(model, theta1);
  if (model.kind == TestKind::NormalLocation) {
    // e^{-delta^2/2} cosh(delta z), arranged to avoid overflow.
    const double t = std::fabs(delta * z);
    return 0.5 * std::exp(t - 0.5 * delta * delta) * (1.0 + std::exp(-2.0 * t));
  }
  // g0 is symmetric, so f = (ratio(z) + ratio(-z)) / 2
  return 0.5 * (alt_to_null_ratio(model, delta, z) + alt_to_null_ratio(model, delta, -z));
}

double pvalue_density(const TestModel& model, double theta1, double x) {
  return model.sidedness == Sidedness::OneSided ? pvalue_density_one_sided(model, theta1, x)
                                                : pvalue_density_two_sided(model, theta1, x);
}

double pvalue_cdf(const TestModel& model, double theta1, double x) {
  model.validate();
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  if (theta1 == model.theta0) return x;
  if (model.kind == TestKind::ExponentialScale) return std::pow(x, model.theta0 / theta1);
  const double delta = effect(model, theta1);
  if (model.sidedness == Sidedness::OneSided) {
    return alt_sf(model, delta, null_upper_quantile(model, x));
  }
  const double z = null_upper_quantile(model, 0.5 * x);
  return alt_sf(model, delta, z) + alt_cdf(model, delta, -z);
}

BetaParams exponential_pvalue_shape(double mu0, double mu1) {
  if (!(mu0 > 0.0 && mu1 > 0.0)) throw DomainError("exponential scales must be positive");
  if (mu1 < mu0) {
    throw DomainError("exponential alternative must have mu1 >= mu0 for a beta(a,1) shape with a <= 1");
  }
  return {mu0 / mu1, 1.0};
}

void ScenarioSpec::validate() const {
  if (!(pi0 >= 0.0 && pi0 <= 1.0)) throw DomainError("pi0 must lie in [0,1]");
  if (m < 1) throw DomainError("scenario requires m >= 1");
  if (const auto* par = std::get_if<ParametricAlternative>(&alt)) {
    par->model.validate();
    if (par->model.kind == TestKind::ExponentialScale && !(par->theta1 > 0.0)) {
      throw DomainError("exponential scale model requires theta1 > 0");
    }
  } else {
    std::get<DiscreteMixingMeasure>(alt).validate();
  }
}

double alternative_density(const Alternative& alt, double x) {
  if (const auto* par = std::get_if<ParametricAlternative>(&alt)) {
    return pvalue_density(par->model, par->theta1, x);
  }
  return mixture_density(x, std::get<DiscreteMixingMeasure>(alt));
}

double alternative_cdf(const Alternative& alt, double x) {
  if (const auto* par = std::get_if<ParametricAlternative>(&alt)) {
    return pvalue_cdf(par->model, par->theta1, x);
  }
  return mixture_cdf(x, std::get<DiscreteMixingMeasure>(alt));
}

namespace {

double draw_parametric_pvalue(const ParametricAlternative& par, Rng& rng) {
  const TestModel& model = par.model;
  const bool two_sided = model.sidedness == Sidedness::TwoSided;
  switch (model.kind) {
  case TestKind::NormalLocation: {
    const double t = effect(model, par.theta1) + standard_normal(rng);
    return two_sided ? 2.0 * special::normal_sf(std::fabs(t)) : special::normal_sf(t);
  }
  case TestKind::TLocation: {
    const double z = standard_normal(rng);
    const double chi2 = 2.0 * std::gamma_distribution<double>(0.5 * model.df, 1.0)(rng);
    const double t = (z + effect(model, par.theta1)) / std::sqrt(chi2 / model.df);
    return two_sided ? 2.0 * special::student_t_sf(std::fabs(t), model.df)
                     : special::student_t_sf(t, model.df);
  }
  case TestKind::ExponentialScale: {
    const double t = std::exponential_distribution<double>(1.0 / par.theta1)(rng);
    return std::exp(-t / model.theta0);
  }
  }
  return 0.5;
}

} // namespace

SimulatedPValues sample_pvalues(const ScenarioSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  SimulatedPValues out;
  out.pvalues.reserve(spec.m);
  out.is_null.reserve(spec.m);

  const auto* mixture = std::get_if<DiscreteMixingMeasure>(&spec.alt);
  std::discrete_distribution<std::size_t> pick_atom;
  if (mixture) pick_atom = std::discrete_distribution<std::size_t>(mixture->weights.begin(), mixture->weights.end());

  for (std::size_t i = 0; i < spec.m; ++i) {
    const bool null = uniform01(rng) < spec.pi0;
    double p = 0.0;
    if (null) {
      p = uniform01(rng);
    } else if (mixture) {
      const BetaParams atom = mixture->atoms[pick_atom(rng)];
      p = sample_beta(rng, atom.a, atom.b);
    } else {
      p = draw_parametric_pvalue(std::get<ParametricAlternative>(spec.alt), rng);
    }
    if (!(p >= kPValueFloor && p <= 1.0 - kPValueFloor)) {
      p = std::clamp(std::isnan(p) ? 0.5 : p, kPValueFloor, 1.0 - kPValueFloor);
      ++out.clamped;
    }
    out.pvalues.push_back(p);
    out.is_null.push_back(null ? 1 : 0);
  }
  if (out.clamped > 0) {
    spdlog::warn("sample_pvalues: clamped {} of {} p-values into [1e-12, 1-1e-12]", out.clamped, spec.m);
  }
  return out;
}

} // namespace pfdr
