#pragma once

// Beta-mixture alternatives and the two-groups p-value model
//   F(x) = pi x + (1 - pi) H(x),  f(x) = pi + (1 - pi) h(x),
// together with the functionals built on it: pFDR, the maximal null
// proportion pi(F), complete-monotonicity diagnostics, the product
// construction of beta mixtures and the tail-envelope check.

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace pfdr {

// One reflected-J beta component; a in (0,1], b >= 1.
struct BetaParams {
  double a = 1.0;
  double b = 1.0;

  bool is_reflected_j() const { return a > 0.0 && a <= 1.0 && b >= 1.0; }
  friend bool operator==(const BetaParams&, const BetaParams&) = default;
};

inline constexpr double kWeightSumTol = 1e-12;

struct DiscreteMixingMeasure {
  std::vector<BetaParams> atoms;
  std::vector<double> weights;

  std::size_t size() const { return atoms.size(); }
  // Throws DomainError on an empty support, mismatched lengths, negative
  // weights, weights not summing to one, or non reflected-J atoms.
  void validate() const;

  static DiscreteMixingMeasure point_mass(BetaParams p) { return {{p}, {1.0}}; }
};

struct PValueMixture {
  double pi = 1.0;
  DiscreteMixingMeasure mixing;

  void validate() const;
};

// psi(x) = C x^(1 + eps) on (0, delta).
struct TailEnvelope {
  double C = 1.0;
  double eps = 0.05;
  double delta = 0.5;

  double operator()(double x) const;
};

double beta_log_density(double x, BetaParams p);
// be(x; a, b); DomainError for x outside the open unit interval.
double beta_density(double x, BetaParams p);
double beta_cdf(double x, BetaParams p);
// 1 - I_{1-y}(a, b) = I_y(b, a), accurate for small y.
double beta_tail_near_one(double y, BetaParams p);

double mixture_density(double x, const DiscreteMixingMeasure& g);
double mixture_cdf(double x, const DiscreteMixingMeasure& g);
double mixture_tail_near_one(double y, const DiscreteMixingMeasure& g);
// h(1^-): a for be(a, 1) atoms, 0 for atoms with b > 1.
double mixture_density_at_one(const DiscreteMixingMeasure& g);

double model_density(double x, const PValueMixture& m);
double model_cdf(double x, const PValueMixture& m);

// pi gamma / (pi gamma + (1 - pi) H(gamma)).
double pfdr_model(const PValueMixture& m, double gamma);
// pi(F) gamma / F(gamma), the conservative upper bound.
double pfdr_bar(double pi_f, double f_gamma, double gamma);

using CdfFunction = std::function<double(double)>;

inline constexpr double kDefaultLambdaMax = 1.0 - 1e-4;

// Grid lambda_j = 1 - 2^-j, j >= 1, truncated at lambda_max.
std::vector<double> pi_grid(double lambda_max = kDefaultLambdaMax);

// min over the grid of (1 - F(lambda)) / (1 - lambda), optionally also
// min'd with the density at 1 (the lambda -> 1 limit) and clipped to [0,1].
double pi_of_F(const CdfFunction& cdf, double lambda_max = kDefaultLambdaMax,
               std::optional<double> density_at_one = std::nullopt);
// Same functional for a beta-mixture model, using the analytic limit f(1^-).
double pi_of_F(const PValueMixture& m, double lambda_max = kDefaultLambdaMax);

enum class CmTransform {
  CdfAtExp,          // y -> H(e^-y)
  SurvivalAtOneMinus // y -> 1 - H(1 - e^-y)
};

struct CmReport {
  bool passes = true;
  int orders_passed = 0;
  std::optional<int> failure_order;
  std::optional<double> failure_y;
};

inline constexpr int kCmMaxOrder = 12;
inline constexpr int kCmDefaultOrder = 8;

// Uniform grid on [0, 10] with 201 points.
std::vector<double> default_cm_grid();

// Checks (-1)^n Delta_h^n phi(y) >= -tol for n = 1..max_order on the grid,
// with h the grid spacing and tol = 1e-9 max|phi|.
CmReport cm_check(const CdfFunction& cdf, CmTransform transform, int max_order = kCmDefaultOrder,
                  const std::vector<double>& y_grid = default_cm_grid());

// Finite measure on the real line (atoms with weights summing to one).
struct ScalarMeasure {
  std::vector<double> atoms;
  std::vector<double> weights;
};

struct ProductMixture {
  DiscreteMixingMeasure measure;
  double normalizer = 1.0; // c, with c^-1 = sum a b B(a,b) w1 w2
};

// dG(a, b) = c a b B(a, b) dG1(a) dG2(b), so that
// int be(x; a, b) dG = c h1(x) h2(x) with h1 = int a x^(a-1) dG1 and
// h2 = int b (1-x)^(b-1) dG2.
ProductMixture prop8_construct(const ScalarMeasure& g1, const ScalarMeasure& g2);

struct EnvelopeReport {
  bool ok = true;
  std::optional<double> first_violation;
};

// Verifies 1 - H(1 - x) <= psi(x) on a geometric-plus-linear grid in (0, delta).
EnvelopeReport tail_envelope_check(const DiscreteMixingMeasure& g, const TailEnvelope& env);

} // namespace pfdr
