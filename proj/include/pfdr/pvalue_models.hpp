#pragma once

// p-value densities for parametric tests, and seeded simulation of p-value
// datasets under the two-groups model.
//
// Statistics are standardized so that under the null the statistic has the
// reference distribution (N(0,1), central t_df, or Exp with mean theta0).
// For the location models the alternative shifts by
// delta = sqrt(n) (theta1 - theta0); for the t model the alternative is the
// noncentral t with noncentrality delta. The exponential model is in scale
// form with upper-tail p-values p = exp(-T / theta0).

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "pfdr/mixture.hpp"

namespace pfdr {

enum class TestKind { NormalLocation, TLocation, ExponentialScale };
enum class Sidedness { OneSided, TwoSided };

struct TestModel {
  TestKind kind = TestKind::NormalLocation;
  double theta0 = 0.0;
  Sidedness sidedness = Sidedness::OneSided;
  int n = 1;
  int df = 1; // only read for TLocation

  void validate() const;
};

// f(x) = g_{theta1}(z) / g_{theta0}(z) with z the upper-x quantile of the null.
double pvalue_density_one_sided(const TestModel& model, double theta1, double x);
// f(x) = (g(z) + g(-z)) / (2 g0(z)) with z the upper-(x/2) quantile.
double pvalue_density_two_sided(const TestModel& model, double theta1, double x);
// Dispatches on model.sidedness.
double pvalue_density(const TestModel& model, double theta1, double x);
// P(p <= x) under the alternative theta1.
double pvalue_cdf(const TestModel& model, double theta1, double x);

// Shape of the exact beta(a, 1) p-value law of the exponential scale test:
// a = mu0 / mu1. DomainError when mu1 < mu0 or either is nonpositive.
BetaParams exponential_pvalue_shape(double mu0, double mu1);

struct ParametricAlternative {
  TestModel model;
  double theta1 = 1.0;
};

using Alternative = std::variant<ParametricAlternative, DiscreteMixingMeasure>;

struct ScenarioSpec {
  double pi0 = 0.8;
  Alternative alt = DiscreteMixingMeasure::point_mass({0.5, 3.0});
  std::size_t m = 1000;
  std::uint64_t seed = 42;

  void validate() const;
};

double alternative_density(const Alternative& alt, double x);
double alternative_cdf(const Alternative& alt, double x);

inline constexpr double kPValueFloor = 1e-12;

struct SimulatedPValues {
  std::vector<double> pvalues;
  std::vector<std::uint8_t> is_null;
  std::size_t clamped = 0; // draws moved into [1e-12, 1 - 1e-12]
};

SimulatedPValues sample_pvalues(const ScenarioSpec& spec);

} // namespace pfdr
