#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "../oracles.hpp"
#include "pfdr/errors.hpp"
#include "pfdr/estimators.hpp"
#include "pfdr/pvalue_models.hpp"
#include "pfdr/special.hpp"

using namespace pfdr;

namespace {

TestModel normal_model(Sidedness s = Sidedness::OneSided, int n = 1) {
  return {TestKind::NormalLocation, 0.0, s, n, 1};
}
TestModel t_model(int df, Sidedness s = Sidedness::OneSided) { return {TestKind::TLocation, 0.0, s, 1, df}; }
TestModel exp_model(double mu0) { return {TestKind::ExponentialScale, mu0, Sidedness::OneSided, 1, 1}; }

std::vector<double> unit_grid(int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = (i + 0.5) / n;
  return g;
}

bool nonincreasing(const std::vector<double>& v, double rel_slack) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[i - 1] * (1.0 + rel_slack) + 1e-300) return false;
  }
  return true;
}

} // namespace

TEST_CASE("one-sided normal density at x=0.5 is exp(-1/2)") {
  CHECK(pvalue_density_one_sided(normal_model(), 1.0, 0.5) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
}

TEST_CASE("one-sided normal density agrees with a Monte Carlo histogram") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> shifted(1.0, 1.0);
  const int n = 1000000;
  int in_bin = 0;
  for (int i = 0; i < n; ++i) {
    const double p = 0.5 * std::erfc(shifted(rng) / std::sqrt(2.0));
    if (p > 0.45 && p <= 0.55) ++in_bin;
  }
  const double hist = in_bin / (0.1 * n);
  CHECK(hist == doctest::Approx(std::exp(-0.5)).epsilon(0.015));
}

TEST_CASE("theta1 equal to theta0 gives the uniform density") {
  for (double x : {1e-6, 0.2, 0.5, 0.999}) {
    CHECK(pvalue_density_one_sided(normal_model(), 0.0, x) == 1.0);
    CHECK(pvalue_density_two_sided(normal_model(Sidedness::TwoSided), 0.0, x) == 1.0);
    CHECK(pvalue_density_one_sided(t_model(3), 0.0, x) == 1.0);
    CHECK(pvalue_density_one_sided(exp_model(1.5), 1.5, x) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("exponential scale density equals be(x; mu0/mu1, 1)") {
  CHECK(pvalue_density_one_sided(exp_model(1.0), 2.0, 0.25) == doctest::Approx(1.0).epsilon(1e-12));
  const TestModel m = exp_model(2.0);
  for (double x : {0.01, 0.3, 0.9}) {
    CHECK(pvalue_density(m, 8.0, x) == doctest::Approx(0.25 * std::pow(x, -0.75)).epsilon(1e-12));
    CHECK(pvalue_cdf(m, 8.0, x) == doctest::Approx(std::pow(x, 0.25)).epsilon(1e-12));
  }
}

TEST_CASE("exponential_pvalue_shape") {
  CHECK(exponential_pvalue_shape(1.0, 2.0) == BetaParams{0.5, 1.0});
  CHECK(exponential_pvalue_shape(1.0, 1.0) == BetaParams{1.0, 1.0});
  CHECK(exponential_pvalue_shape(2.0, 8.0).a == doctest::Approx(0.25));
  CHECK_THROWS_AS(exponential_pvalue_shape(2.0, 1.0), DomainError);
  CHECK_THROWS_AS(exponential_pvalue_shape(0.0, 1.0), DomainError);
}

TEST_CASE("two-sided normal floor near x=1") {
  const TestModel m = normal_model(Sidedness::TwoSided, 4);
  CHECK(pvalue_density_two_sided(m, 0.5, 1.0 - 1e-8) == doctest::Approx(std::exp(-0.5)).epsilon(1e-6));
  // the floor is exp(-n theta^2 / 2) for other n too
  const TestModel m9 = normal_model(Sidedness::TwoSided, 9);
  CHECK(std::fabs(pvalue_density_two_sided(m9, 0.2, 1.0 - 1e-8) - std::exp(-9 * 0.04 / 2)) < 1e-6);
}

TEST_CASE("one-sided normal tail vanishes") {
  for (double theta : {3.0, 4.0}) {
    CHECK(pvalue_density_one_sided(normal_model(), theta, 1.0 - 1e-6) < 1e-3);
  }
}

TEST_CASE("one-sided densities of MLR models are nonincreasing") {
  const auto grid = unit_grid(1000);
  struct Case {
    TestModel model;
    double theta1;
  };
  const std::vector<Case> cases{{normal_model(), 0.3}, {normal_model(), 2.5}, {normal_model(Sidedness::OneSided, 5), 0.4},
                                {t_model(3), 1.0},     {t_model(10), 2.0},   {exp_model(1.0), 3.0},
                                {exp_model(0.5), 0.7}};
  for (const auto& c : cases) {
    std::vector<double> f;
    for (double x : grid) f.push_back(pvalue_density_one_sided(c.model, c.theta1, x));
    CAPTURE(c.theta1);
    CHECK(nonincreasing(f, 1e-9));
  }
}

TEST_CASE("two-sided densities are nonincreasing with a positive floor") {
  const auto grid = unit_grid(1000);
  for (const auto& [model, theta1] :
       std::vector<std::pair<TestModel, double>>{{normal_model(Sidedness::TwoSided), 1.0},
                                                 {normal_model(Sidedness::TwoSided, 4), -0.5},
                                                 {t_model(3, Sidedness::TwoSided), 1.5},
                                                 {t_model(8, Sidedness::TwoSided), -1.0}}) {
    std::vector<double> f;
    for (double x : grid) f.push_back(pvalue_density_two_sided(model, theta1, x));
    CHECK(nonincreasing(f, 1e-9));
    CHECK(f.back() > 0.0);
    CHECK(f.front() > f.back());
  }
}

TEST_CASE("p-value densities integrate to one") {
  struct Case {
    TestModel model;
    double theta1;
  };
  const std::vector<Case> cases{{normal_model(), 1.0},
                                {normal_model(Sidedness::TwoSided, 4), 0.5},
                                {t_model(3), 1.0},
                                {t_model(3, Sidedness::TwoSided), 1.5},
                                {exp_model(1.0), 2.0}};
  for (const auto& c : cases) {
    const double total =
        oracle::tanh_sinh([&](double x) { return pvalue_density(c.model, c.theta1, x); }, 0.0, 1.0, 1e-9);
    CAPTURE(c.theta1);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("p-value cdf is the integral of the density") {
  const std::vector<std::pair<TestModel, double>> cases{{normal_model(), 1.0},
                                                        {normal_model(Sidedness::TwoSided, 4), 0.5},
                                                        {t_model(3), 1.0},
                                                        {t_model(5, Sidedness::TwoSided), -1.2}};
  for (const auto& [model, theta1] : cases) {
    for (double x : {0.01, 0.2, 0.7}) {
      const double ref = oracle::tanh_sinh([&](double s) { return pvalue_density(model, theta1, s); }, 0.0, x, 1e-10);
      CHECK(pvalue_cdf(model, theta1, x) == doctest::Approx(ref).epsilon(1e-6));
    }
  }
}

TEST_CASE("invalid model inputs") {
  CHECK_THROWS_AS(pvalue_density_one_sided(normal_model(), 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(pvalue_density_one_sided(normal_model(), 1.0, 1.0), DomainError);
  TestModel bad = normal_model();
  bad.n = 0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  TestModel two_exp = exp_model(1.0);
  two_exp.sidedness = Sidedness::TwoSided;
  CHECK_THROWS_AS(two_exp.validate(), DomainError);
  ScenarioSpec spec;
  spec.pi0 = 1.5;
  CHECK_THROWS_AS(spec.validate(), DomainError);
}

TEST_CASE("sample_pvalues: all-null data are uniform") {
  ScenarioSpec spec;
  spec.pi0 = 1.0;
  spec.m = 10000;
  spec.seed = 11;
  const auto sim = sample_pvalues(spec);
  REQUIRE(sim.pvalues.size() == spec.m);
  CHECK(std::all_of(sim.is_null.begin(), sim.is_null.end(), [](auto v) { return v == 1; }));
  const double d = ks_statistic(sim.pvalues, [](double x) { return x; });
  CHECK(ks_pvalue(d, spec.m) > 0.01);
}

TEST_CASE("sample_pvalues: all-alternative data follow be(0.5, 3)") {
  ScenarioSpec spec;
  spec.pi0 = 0.0;
  spec.m = 10000;
  spec.seed = 12;
  const auto sim = sample_pvalues(spec);
  CHECK(std::all_of(sim.is_null.begin(), sim.is_null.end(), [](auto v) { return v == 0; }));
  const double d = ks_statistic(sim.pvalues, oracle::beta_half_three_cdf);
  CHECK(ks_pvalue(d, spec.m) > 0.01);
}

TEST_CASE("sample_pvalues: parametric alternative follows its own cdf") {
  ScenarioSpec spec;
  spec.pi0 = 0.0;
  spec.m = 5000;
  spec.alt = ParametricAlternative{t_model(4, Sidedness::TwoSided), 1.0};
  const auto sim = sample_pvalues(spec);
  const double d = ks_statistic(sim.pvalues, [&](double x) { return x <= 0 ? 0.0 : x >= 1 ? 1.0 : alternative_cdf(spec.alt, x); });
  CHECK(ks_pvalue(d, spec.m) > 0.01);
}

TEST_CASE("sample_pvalues is deterministic and stays in the open interval") {
  ScenarioSpec spec;
  spec.m = 3000;
  spec.alt = DiscreteMixingMeasure{{{0.05, 1.0}, {0.5, 3.0}}, {0.5, 0.5}};
  const auto a = sample_pvalues(spec);
  const auto b = sample_pvalues(spec);
  CHECK(a.pvalues == b.pvalues);
  CHECK(a.is_null == b.is_null);
  for (double p : a.pvalues) {
    CHECK(p >= kPValueFloor);
    CHECK(p <= 1.0 - kPValueFloor);
  }
  spec.seed += 1;
  CHECK(sample_pvalues(spec).pvalues != a.pvalues);
}

TEST_CASE("t-model density ratio is continuous and finite in the extreme tail") {
  const TestModel one = t_model(3);
  const TestModel two = t_model(3, Sidedness::TwoSided);
  // statistic z = 1 sits at the switch between the two evaluation routes
  const double x_switch = special::student_t_sf(1.0, 3.0);
  const double below = pvalue_density(one, 1.0, x_switch * (1 + 1e-9));
  const double above = pvalue_density(one, 1.0, x_switch * (1 - 1e-9));
  CHECK(below == doctest::Approx(above).epsilon(1e-7));
  for (double x : {1e-30, 1e-100, 1e-250}) {
    const double f1 = pvalue_density(one, 1.0, x);
    const double f2 = pvalue_density(two, 1.0, x);
    CHECK(std::isfinite(f1));
    CHECK(std::isfinite(f2));
    CHECK(f1 > 1.0);
  }
  // direct ratio of densities where it does not underflow
  for (double z : {1.5, 4.0, -2.5}) {
    const double x = special::student_t_sf(z, 3.0);
    const double direct = special::noncentral_t_pdf(z, 3.0, 1.0) / special::student_t_pdf(z, 3.0);
    CHECK(pvalue_density(one, 1.0, x) == doctest::Approx(direct).epsilon(1e-8));
  }
}
