#include "pfdr/dp_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "pfdr/errors.hpp"
#include "pfdr/estimators.hpp"
#include "pfdr/special.hpp"

namespace pfdr {

void DPConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(name) + " must be positive");
  };
  positive(tau, "tau");
  positive(sigma_a, "sigma_a");
  positive(sigma_b, "sigma_b");
  positive(eps_b, "eps_b");
  positive(pi_alpha, "pi_alpha");
  positive(pi_beta, "pi_beta");
}

BetaParams DPConfig::to_beta(double la, double lb) const {
  const double a = std::max(std::exp(-std::fabs(la)), std::numeric_limits<double>::min());
  return {a, eps_b + std::exp(std::fabs(lb))};
}

void ChainSettings::validate() const {
  if (iterations < 1) throw DomainError("iterations must be positive");
  if (burn_in < 0 || burn_in >= iterations) throw DomainError("burn_in must lie in [0, iterations)");
  if (thin < 1) throw DomainError("thin must be >= 1");
  if (!(mh_step > 0.0)) throw DomainError("mh_step must be positive");
  if (aux_components < 1) throw DomainError("aux_components must be >= 1");
}

std::size_t LatentState::alt_count() const {
  return static_cast<std::size_t>(std::count(z.begin(), z.end(), Hypothesis::Alternative));
}

void LatentState::check_invariants(const DPConfig& config) const {
  if (z.size() != label.size()) throw std::logic_error("z/label length mismatch");
  std::vector<int> counts(clusters.size(), 0);
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i] == Hypothesis::Null) {
      if (label[i] != kNoCluster) throw std::logic_error("null point carries a cluster label");
      continue;
    }
    if (label[i] < 0 || static_cast<std::size_t>(label[i]) >= clusters.size()) {
      throw std::logic_error("alternative point without a live cluster");
    }
    ++counts[label[i]];
  }
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    const Cluster& c = clusters[k];
    if (c.size < 1 || c.size != counts[k]) throw std::logic_error("cluster size bookkeeping is inconsistent");
    if (!(c.params.a > 0.0 && c.params.a <= 1.0) || c.params.b < 1.0 + config.eps_b) {
      throw std::logic_error("cluster parameters left the support");
    }
  }
  if (!(pi >= 0.0 && pi <= 1.0)) throw std::logic_error("pi outside [0,1]");
}

PValueData::PValueData(std::span<const double> pvalues, bool flat) : flat_likelihood(flat) {
  x.reserve(pvalues.size());
  log_x.reserve(pvalues.size());
  log_1mx.reserve(pvalues.size());
  for (std::size_t i = 0; i < pvalues.size(); ++i) {
    const double p = pvalues[i];
    if (!(p > 0.0 && p < 1.0)) {
      std::ostringstream msg;
      msg << "p-value " << i << " = " << p << " outside (0,1)";
      throw DomainError(msg.str());
    }
    x.push_back(p);
    log_x.push_back(std::log(p));
    log_1mx.push_back(std::log1p(-p));
  }
}

Cluster make_cluster(double la, double lb, const DPConfig& config) {
  Cluster c;
  c.la = la;
  c.lb = lb;
  c.params = config.to_beta(la, lb);
  c.log_beta_fn = special::log_beta(c.params.a, c.params.b);
  return c;
}

Cluster draw_base_cluster(const DPConfig& config, Rng& rng) {
  const double la = config.sigma_a * standard_normal(rng);
  const double lb = config.sigma_b * standard_normal(rng);
  return make_cluster(la, lb, config);
}

double log_base_density(double la, double lb, const DPConfig& config) {
  const double ra = la / config.sigma_a;
  const double rb = lb / config.sigma_b;
  return -0.5 * (ra * ra + rb * rb) - std::log(config.sigma_a * config.sigma_b) -
         std::log(2.0 * std::numbers::pi);
}

double cluster_log_likelihood(const PValueData& data, std::size_t i, const Cluster& c) {
  if (data.flat_likelihood) return 0.0;
  return (c.params.a - 1.0) * data.log_x[i] + (c.params.b - 1.0) * data.log_1mx[i] - c.log_beta_fn;
}

namespace {

double sample_pi(double alpha, double beta, Rng& rng) { return sample_beta(rng, alpha, beta); }

// P(alternative) for odds pi * 1 : (1 - pi) * exp(log_lik).
double alt_probability(double pi, double log_lik) {
  if (pi >= 1.0) return 0.0;
  if (pi <= 0.0) return 1.0;
  const double log_odds = std::log1p(-pi) + log_lik - std::log(pi);
  if (std::isnan(log_odds)) return 0.0;
  return 1.0 / (1.0 + std::exp(-log_odds));
}

// Index drawn proportionally to exp(log_weights).
std::size_t sample_log_categorical(const std::vector<double>& log_weights, Rng& rng) {
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  double total = 0.0;
  std::vector<double> cumulative(log_weights.size());
  for (std::size_t k = 0; k < log_weights.size(); ++k) {
    total += std::exp(log_weights[k] - top);
    cumulative[k] = total;
  }
  const double u = uniform01(rng) * total;
  for (std::size_t k = 0; k < cumulative.size(); ++k) {
    if (u < cumulative[k]) return k;
  }
  return cumulative.size() - 1;
}

void remove_empty_clusters(LatentState& state) {
  std::vector<int> remap(state.clusters.size(), kNoCluster);
  std::vector<Cluster> kept;
  kept.reserve(state.clusters.size());
  for (std::size_t k = 0; k < state.clusters.size(); ++k) {
    if (state.clusters[k].size > 0) {
      remap[k] = static_cast<int>(kept.size());
      kept.push_back(state.clusters[k]);
    }
  }
  for (int& l : state.label) {
    if (l != kNoCluster) l = remap[l];
  }
  state.clusters = std::move(kept);
}

} // namespace

LatentState init_state(const PValueData& data, const DPConfig& config, Rng& rng) {
  config.validate();
  if (data.size() == 0) throw DomainError("cannot initialise a chain without p-values");
  LatentState state;
  state.z.resize(data.size());
  state.label.assign(data.size(), kNoCluster);
  int alt = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.x[i] > 0.5) {
      state.z[i] = Hypothesis::Null;
    } else {
      state.z[i] = Hypothesis::Alternative;
      state.label[i] = 0;
      ++alt;
    }
  }
  if (alt > 0) {
    state.clusters.push_back(draw_base_cluster(config, rng));
    state.clusters.back().size = alt;
  }
  state.pi = sample_pi(config.pi_alpha, config.pi_beta, rng);
  return state;
}

void update_z(LatentState& state, const PValueData& data, const DPConfig& config, Rng& rng) {
  std::size_t n_alt = state.alt_count();
  std::vector<double> crp_weights;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (state.z[i] == Hypothesis::Alternative) {
      Cluster& c = state.clusters[state.label[i]];
      const double p_alt = alt_probability(state.pi, cluster_log_likelihood(data, i, c));
      if (uniform01(rng) >= p_alt) {
        --c.size;
        --n_alt;
        state.label[i] = kNoCluster;
        state.z[i] = Hypothesis::Null;
      }
      continue;
    }
    // CRP proposal over the current alternative points.
    crp_weights.clear();
    for (const Cluster& c : state.clusters) crp_weights.push_back(static_cast<double>(c.size));
    crp_weights.push_back(config.tau);
    double total = config.tau + static_cast<double>(n_alt);
    double u = uniform01(rng) * total;
    std::size_t choice = crp_weights.size() - 1;
    for (std::size_t k = 0; k < crp_weights.size(); ++k) {
      if (u < crp_weights[k]) {
        choice = k;
        break;
      }
      u -= crp_weights[k];
    }
    const bool fresh = choice == state.clusters.size();
    Cluster proposal = fresh ? draw_base_cluster(config, rng) : state.clusters[choice];
    const double p_alt = alt_probability(state.pi, cluster_log_likelihood(data, i, proposal));
    if (uniform01(rng) < p_alt) {
      if (fresh) {
        proposal.size = 1;
        state.clusters.push_back(proposal);
      } else {
        ++state.clusters[choice].size;
      }
      state.label[i] = static_cast<int>(choice);
      state.z[i] = Hypothesis::Alternative;
      ++n_alt;
    }
  }
  remove_empty_clusters(state);
}

void update_pi(LatentState& state, const DPConfig& config, Rng& rng) {
  const double n_alt = static_cast<double>(state.alt_count());
  const double n_null = static_cast<double>(state.z.size()) - n_alt;
  state.pi = sample_pi(config.pi_alpha + n_null, config.pi_beta + n_alt, rng);
}

void update_clusters(LatentState& state, const PValueData& data, const DPConfig& config,
                     int aux_components, Rng& rng) {
  const double log_aux_weight = std::log(config.tau / aux_components);
  std::vector<Cluster> aux(aux_components);
  std::vector<double> log_w;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (state.z[i] != Hypothesis::Alternative) continue;
    const int own = state.label[i];
    Cluster& current = state.clusters[own];
    --current.size;
    const bool singleton = current.size == 0;
    for (int r = 0; r < aux_components; ++r) {
      aux[r] = (r == 0 && singleton) ? current : draw_base_cluster(config, rng);
    }

    log_w.clear();
    for (const Cluster& c : state.clusters) {
      log_w.push_back(c.size > 0 ? std::log(static_cast<double>(c.size)) + cluster_log_likelihood(data, i, c)
                                 : -std::numeric_limits<double>::infinity());
    }
    for (const Cluster& c : aux) log_w.push_back(log_aux_weight + cluster_log_likelihood(data, i, c));

    const std::size_t choice = sample_log_categorical(log_w, rng);
    if (choice < state.clusters.size()) {
      ++state.clusters[choice].size;
      state.label[i] = static_cast<int>(choice);
      continue;
    }
    Cluster fresh = aux[choice - state.clusters.size()];
    fresh.size = 1;
    if (singleton) {
      state.clusters[own] = fresh;
    } else {
      state.clusters.push_back(fresh);
      state.label[i] = static_cast<int>(state.clusters.size() - 1);
    }
  }
  remove_empty_clusters(state);
}

void update_cluster_params(LatentState& state, const PValueData& data, const DPConfig& config,
                           double mh_step, Rng& rng, MhCounters& counters) {
  const std::size_t k_count = state.clusters.size();
  std::vector<double> sum_log_x(k_count, 0.0);
  std::vector<double> sum_log_1mx(k_count, 0.0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (state.z[i] != Hypothesis::Alternative) continue;
    sum_log_x[state.label[i]] += data.log_x[i];
    sum_log_1mx[state.label[i]] += data.log_1mx[i];
  }
  for (std::size_t k = 0; k < k_count; ++k) {
    Cluster& c = state.clusters[k];
    auto log_target = [&](const Cluster& cand) {
      double lp = log_base_density(cand.la, cand.lb, config);
      if (!data.flat_likelihood) {
        lp += (cand.params.a - 1.0) * sum_log_x[k] + (cand.params.b - 1.0) * sum_log_1mx[k] -
              c.size * cand.log_beta_fn;
      }
      return lp;
    };
    const double la = c.la + mh_step * standard_normal(rng);
    const double lb = c.lb + mh_step * standard_normal(rng);
    Cluster cand = make_cluster(la, lb, config);
    cand.size = c.size;
    const double log_ratio = log_target(cand) - log_target(c);
    ++counters.proposed;
    if (std::log(uniform01(rng)) < log_ratio) {
      c = cand;
      ++counters.accepted;
    }
  }
}

DiscreteMixingMeasure draw_mixing_measure(const LatentState& state, const DPConfig& config, Rng& rng) {
  DiscreteMixingMeasure g;
  const double denom = static_cast<double>(state.alt_count()) + config.tau;
  for (const Cluster& c : state.clusters) {
    g.atoms.push_back(c.params);
    g.weights.push_back(static_cast<double>(c.size) / denom);
  }
  g.atoms.push_back(draw_base_cluster(config, rng).params);
  g.weights.push_back(config.tau / denom);
  return g;
}

ChainResult run_chain(std::span<const double> pvalues, const DPConfig& config,
                      const ChainSettings& settings) {
  return run_chain(PValueData(pvalues), config, settings);
}

ChainResult run_chain(const PValueData& data, const DPConfig& config, const ChainSettings& settings) {
  config.validate();
  settings.validate();
  Rng rng(settings.seed);
  LatentState state = init_state(data, config, rng);

  constexpr int kAdaptBatch = 50;
  constexpr double kTargetAcceptance = 0.3;
  double step = settings.mh_step;
  MhCounters batch;
  MhCounters post;
  ChainResult result;
  result.draws.reserve(static_cast<std::size_t>((settings.iterations - settings.burn_in) / settings.thin));

  for (int t = 1; t <= settings.iterations; ++t) {
    update_z(state, data, config, rng);
    update_pi(state, config, rng);
    update_clusters(state, data, config, settings.aux_components, rng);
    const bool burning = t <= settings.burn_in;
    update_cluster_params(state, data, config, step, rng, burning ? batch : post);

    if (burning && t % kAdaptBatch == 0 && batch.proposed > 0) {
      step *= batch.rate() > kTargetAcceptance ? 1.1 : 1.0 / 1.1;
      batch = {};
    }
    if (!burning && (t - settings.burn_in) % settings.thin == 0) {
      PosteriorDraw draw;
      draw.iteration = t;
      draw.pi = state.pi;
      draw.n_clusters = static_cast<int>(state.clusters.size());
      draw.g_draw = draw_mixing_measure(state, config, rng);
      result.draws.push_back(std::move(draw));
    }
  }
  result.acceptance_rate = post.rate();
  result.final_mh_step = step;
  if (post.proposed > 0 && (result.acceptance_rate < 0.1 || result.acceptance_rate > 0.6)) {
    spdlog::warn("run_chain: Metropolis acceptance rate {:.3f} outside [0.1, 0.6] (step {:.4g})",
                 result.acceptance_rate, step);
  }
  return result;
}

DiscreteMixingMeasure sample_dp_prior(const DPConfig& config, Rng& rng, double tail_mass) {
  config.validate();
  constexpr std::size_t kMaxAtoms = 100000;
  DiscreteMixingMeasure g;
  double remaining = 1.0;
  while (remaining > tail_mass && g.atoms.size() < kMaxAtoms) {
    const double v = sample_beta(rng, 1.0, config.tau);
    g.atoms.push_back(draw_base_cluster(config, rng).params);
    g.weights.push_back(remaining * v);
    remaining *= 1.0 - v;
  }
  g.weights.back() += remaining;
  return g;
}

double base_cdf_a(double a, const DPConfig& config) {
  if (a <= 0.0) return 0.0;
  if (a >= 1.0) return 1.0;
  return 2.0 * special::normal_sf(-std::log(a) / config.sigma_a);
}

double base_cdf_b(double b, const DPConfig& config) {
  if (b <= 1.0 + config.eps_b) return 0.0;
  return 1.0 - 2.0 * special::normal_sf(std::log(b - config.eps_b) / config.sigma_b);
}

PriorCheckReport prior_reproduction_check(const DPConfig& config, const ChainSettings& settings,
                                          double level) {
  const std::vector<double> single{0.5};
  const PValueData data(single, /*flat=*/true);
  const ChainResult chain = run_chain(data, config, settings);

  std::vector<double> pis;
  std::vector<double> as;
  std::vector<double> bs;
  for (const PosteriorDraw& d : chain.draws) {
    pis.push_back(d.pi);
    as.push_back(d.g_draw.atoms.back().a);
    bs.push_back(d.g_draw.atoms.back().b);
  }
  PriorCheckReport report;
  report.n_draws = pis.size();
  report.ks_pi = ks_statistic(pis, [&](double p) { return special::inc_beta(std::clamp(p, 0.0, 1.0), config.pi_alpha, config.pi_beta); });
  report.ks_a = ks_statistic(as, [&](double a) { return base_cdf_a(a, config); });
  report.ks_b = ks_statistic(bs, [&](double b) { return base_cdf_b(b, config); });
  report.p_pi = ks_pvalue(report.ks_pi, pis.size());
  report.p_a = ks_pvalue(report.ks_a, as.size());
  report.p_b = ks_pvalue(report.ks_b, bs.size());
  report.min_b = bs.empty() ? 0.0 : *std::min_element(bs.begin(), bs.end());
  report.passes = report.p_pi > level && report.p_a > level && report.p_b > level &&
                  report.min_b >= 1.0 + config.eps_b;
  return report;
}

} // namespace pfdr
