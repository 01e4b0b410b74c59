#include "pfdr/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <spdlog/spdlog.h>

#include "pfdr/errors.hpp"
#include "pfdr/kernels.hpp"
#include "pfdr/random.hpp"

namespace pfdr {

void SweepSpec::validate() const {
  if (m_list.empty()) throw DomainError("sweep needs at least one m");
  for (std::size_t i = 0; i < m_list.size(); ++i) {
    if (m_list[i] < 1) throw DomainError("sweep m values must be positive");
    if (i > 0 && m_list[i] <= m_list[i - 1]) throw DomainError("sweep m_list must be strictly increasing");
  }
  if (replicates < 3) throw DomainError("sweep needs at least 3 replicates");
  if (!(epsilon > 0.0)) throw DomainError("sweep epsilon must be positive");
  if (gamma_grid.empty()) throw DomainError("sweep gamma grid is empty");
  scenario.validate();
}

std::uint64_t cell_seed(std::uint64_t master, std::size_t m, int replicate) {
  return derive_seed(derive_seed(master, static_cast<std::uint64_t>(m)), static_cast<std::uint64_t>(replicate));
}

double scenario_cdf(const ScenarioSpec& scenario, double x) {
  const double xc = std::clamp(x, 0.0, 1.0);
  return scenario.pi0 * xc + (1.0 - scenario.pi0) * alternative_cdf(scenario.alt, xc);
}

double scenario_pfdr(const ScenarioSpec& scenario, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("pfdr requires gamma in (0,1]");
  return std::min(1.0, scenario.pi0 * gamma / scenario_cdf(scenario, gamma));
}

namespace {

std::vector<double> sup_grid() {
  std::vector<double> grid(kSupGridPoints);
  for (std::size_t k = 0; k < kSupGridPoints; ++k) grid[k] = static_cast<double>(k) / (kSupGridPoints - 1);
  return grid;
}

double median(std::vector<double> v) { return sample_quantile(std::move(v), 0.5); }

} // namespace

SweepRow run_cell(const SweepSpec& spec, const DPConfig& config, const ChainSettings& settings,
                  std::size_t m, int replicate) {
  const auto start = std::chrono::steady_clock::now();
  SweepRow row;
  row.m = m;
  row.replicate = replicate;

  const std::uint64_t seed = cell_seed(spec.scenario.seed, m, replicate);
  ScenarioSpec scenario = spec.scenario;
  scenario.m = m;
  scenario.seed = derive_seed(seed, 1);
  ChainSettings chain_settings = settings;
  chain_settings.seed = derive_seed(seed, 2);

  const SimulatedPValues data = sample_pvalues(scenario);
  const ChainResult chain = run_chain(data.pvalues, config, chain_settings);
  const PosteriorSummary summary = summarize(chain.draws, spec.gamma_grid);

  double inside = 0.0;
  for (const PosteriorDraw& d : chain.draws) inside += std::fabs(d.pi - scenario.pi0) < spec.epsilon ? 1.0 : 0.0;
  row.ball_mass = inside / static_cast<double>(chain.draws.size());
  row.pi_hat = summary.pi_mean;
  row.abs_pi_err = std::fabs(summary.pi_mean - scenario.pi0);

  const std::vector<double> grid = sup_grid();
  const std::vector<double> mean_cdf = kernels::posterior_mean_cdf(chain.draws, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    row.sup_F_err = std::max(row.sup_F_err, std::fabs(mean_cdf[k] - scenario_cdf(scenario, grid[k])));
  }
  for (const PfdrCurvePoint& p : summary.pfdr_curve) {
    row.max_pfdr_err = std::max(row.max_pfdr_err, std::fabs(p.mean - scenario_pfdr(scenario, p.gamma)));
  }
  if (spec.report_timing) {
    row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return row;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const DPConfig& config,
                                const ChainSettings& settings, Execution execution) {
  spec.validate();
  config.validate();
  settings.validate();
  struct Cell {
    std::size_t m;
    int replicate;
  };
  std::vector<Cell> cells;
  for (std::size_t m : spec.m_list) {
    for (int r = 0; r < spec.replicates; ++r) cells.push_back({m, r});
  }
  std::vector<SweepRow> rows(cells.size());
  auto run_one = [&](std::size_t idx) {
    try {
      rows[idx] = run_cell(spec, config, settings, cells[idx].m, cells[idx].replicate);
    } catch (const std::exception& e) {
      rows[idx].m = cells[idx].m;
      rows[idx].replicate = cells[idx].replicate;
      rows[idx].ok = false;
      rows[idx].error = e.what();
      spdlog::error("sweep cell m={} replicate={} failed: {}", cells[idx].m, cells[idx].replicate, e.what());
    }
  };
  if (execution == Execution::Parallel) {
    const auto n = static_cast<std::ptrdiff_t>(cells.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) run_one(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < cells.size(); ++i) run_one(i);
  }
  return rows;
}

std::vector<SweepLevelSummary> summarize_sweep(const std::vector<SweepRow>& rows, double pi0) {
  std::vector<std::size_t> ms;
  for (const SweepRow& r : rows) {
    if (std::find(ms.begin(), ms.end(), r.m) == ms.end()) ms.push_back(r.m);
  }
  std::sort(ms.begin(), ms.end());
  std::vector<SweepLevelSummary> out;
  for (std::size_t m : ms) {
    std::vector<double> ball, abs_err, sup_err, pfdr_err, excess;
    for (const SweepRow& r : rows) {
      if (r.m != m || !r.ok) continue;
      ball.push_back(r.ball_mass);
      abs_err.push_back(r.abs_pi_err);
      sup_err.push_back(r.sup_F_err);
      pfdr_err.push_back(r.max_pfdr_err);
      excess.push_back(r.pi_hat - pi0);
    }
    SweepLevelSummary s;
    s.m = m;
    s.cells = ball.size();
    if (!ball.empty()) {
      s.median_ball_mass = median(ball);
      s.median_abs_pi_err = median(abs_err);
      s.median_sup_F_err = median(sup_err);
      s.median_max_pfdr_err = median(pfdr_err);
      s.q90_pi_excess = sample_quantile(excess, 0.9);
    }
    out.push_back(s);
  }
  return out;
}

Comparison compare_estimators(const ScenarioSpec& scenario, const DPConfig& config,
                              const ChainSettings& settings, const std::vector<double>& lambdas,
                              const std::vector<double>& gammas, double level) {
  const SimulatedPValues data = sample_pvalues(scenario);
  const ChainResult chain = run_chain(data.pvalues, config, settings);
  Comparison out;
  out.summary = summarize(chain.draws, gammas, level);
  for (double lambda : lambdas) {
    for (std::size_t j = 0; j < gammas.size(); ++j) {
      ComparisonRow row;
      row.gamma = gammas[j];
      row.lambda = lambda;
      row.true_pfdr = scenario_pfdr(scenario, gammas[j]);
      row.bayes_mean = out.summary.pfdr_curve[j].mean;
      row.bayes_lo = out.summary.pfdr_curve[j].lo;
      row.bayes_hi = out.summary.pfdr_curve[j].hi;
      row.storey = storey_pfdr(data.pvalues, lambda, gammas[j]);
      out.rows.push_back(row);
    }
  }
  return out;
}

} // namespace pfdr
