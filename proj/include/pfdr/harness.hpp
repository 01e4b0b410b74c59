#pragma once

// Consistency experiments: simulate from a known two-groups model, fit the
// DP beta-mixture sampler, and measure how the posterior concentrates as
// the number of hypotheses m grows.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "pfdr/dp_sampler.hpp"
#include "pfdr/estimators.hpp"
#include "pfdr/pvalue_models.hpp"

namespace pfdr {

struct SweepSpec {
  std::vector<std::size_t> m_list{200, 1000, 5000};
  int replicates = 10;
  ScenarioSpec scenario; // m and seed are overridden per cell
  double epsilon = 0.05;
  std::vector<double> gamma_grid{0.01, 0.05, 0.1, 0.2};
  bool report_timing = false; // wall_time_s is 0 unless set, keeping tables reproducible

  void validate() const;
};

struct SweepRow {
  std::size_t m = 0;
  int replicate = 0;
  double ball_mass = 0.0;    // posterior mass of |pi - pi0| < epsilon
  double abs_pi_err = 0.0;   // |posterior mean pi - pi0|
  double sup_F_err = 0.0;    // sup over a 512-point grid of |E[F] - F0|
  double max_pfdr_err = 0.0; // max over gamma_grid of |E[pFDR] - pFDR0|
  double wall_time_s = 0.0;
  double pi_hat = 0.0;
  bool ok = true;
  std::string error;
};

inline constexpr std::size_t kSupGridPoints = 512;

// Cell seed: derive(derive(master, m), replicate). The cell's data stream
// uses derive(cell, 1) and its chain derive(cell, 2).
std::uint64_t cell_seed(std::uint64_t master, std::size_t m, int replicate);

enum class Execution { Parallel, Serial };

// The true p-value cdf F0 and pFDR of a scenario.
double scenario_cdf(const ScenarioSpec& scenario, double x);
double scenario_pfdr(const ScenarioSpec& scenario, double gamma);

SweepRow run_cell(const SweepSpec& spec, const DPConfig& config, const ChainSettings& settings,
                  std::size_t m, int replicate);

// Rows ordered by (m, replicate) regardless of execution order. Failing
// cells are recorded with ok = false and the sweep continues.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, const DPConfig& config,
                                const ChainSettings& settings, Execution execution = Execution::Parallel);

struct SweepLevelSummary {
  std::size_t m = 0;
  std::size_t cells = 0;
  double median_ball_mass = 0.0;
  double median_abs_pi_err = 0.0;
  double median_sup_F_err = 0.0;
  double median_max_pfdr_err = 0.0;
  double q90_pi_excess = 0.0; // 90th percentile of pi_hat - pi0
};

std::vector<SweepLevelSummary> summarize_sweep(const std::vector<SweepRow>& rows, double pi0);

struct ComparisonRow {
  double gamma = 0.0;
  double lambda = 0.0;
  double true_pfdr = 0.0;
  double bayes_mean = 0.0;
  double bayes_lo = 0.0;
  double bayes_hi = 0.0;
  double storey = 0.0;
};

struct Comparison {
  PosteriorSummary summary;
  std::vector<ComparisonRow> rows; // ordered by lambda, then gamma
};

Comparison compare_estimators(const ScenarioSpec& scenario, const DPConfig& config,
                              const ChainSettings& settings, const std::vector<double>& lambdas,
                              const std::vector<double>& gammas, double level = kDefaultCredibleLevel);

} // namespace pfdr
