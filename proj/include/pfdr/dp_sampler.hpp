#pragma once

// Posterior sampler for the Dirichlet-process mixture of beta densities:
//
//   X_i | z_i = null        ~ U(0,1)
//   X_i | z_i = alt, (a,b)  ~ be(x; a, b)
//   z_i                     ~ Bernoulli(pi) (null), pi ~ Beta(alpha, beta)
//   (a_i, b_i) | G          ~ G for the alternative points, G ~ DP(G0, tau)
//
// G0 is placed on (L_a, L_b) ~ N(0, sigma_a^2) x N(0, sigma_b^2) with
// a = exp(-|L_a|) and b = eps_b + exp(|L_b|), so every atom is a
// reflected-J beta with b >= 1 + eps_b.
//
// One sweep is update_z -> update_pi -> update_clusters ->
// update_cluster_params. The DP is collapsed to the Chinese restaurant
// process over alternative points; new clusters are handled with the
// auxiliary-component method for non-conjugate mixtures.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pfdr/mixture.hpp"
#include "pfdr/random.hpp"

namespace pfdr {

struct DPConfig {
  double tau = 1.0;
  double sigma_a = 1.0;
  double sigma_b = 1.0;
  double eps_b = 0.05;
  double pi_alpha = 1.0;
  double pi_beta = 1.0;

  void validate() const;
  BetaParams to_beta(double la, double lb) const;
};

struct ChainSettings {
  int iterations = 4000;
  int burn_in = 1000;
  int thin = 1;
  std::uint64_t seed = 1;
  double mh_step = 0.5;
  int aux_components = 3;

  void validate() const;
};

enum class Hypothesis : std::uint8_t { Null = 0, Alternative = 1 };

struct Cluster {
  double la = 0.0;
  double lb = 0.0;
  BetaParams params;
  double log_beta_fn = 0.0; // log B(a, b), cached with params
  int size = 0;
};

inline constexpr int kNoCluster = -1;

struct LatentState {
  std::vector<Hypothesis> z;
  std::vector<int> label; // kNoCluster for null points
  std::vector<Cluster> clusters;
  double pi = 0.5;

  std::size_t alt_count() const;
  // Throws std::logic_error if labels, sizes or supports are inconsistent.
  void check_invariants(const DPConfig& config) const;
};

// Observations with cached log x and log(1 - x). The flat flag replaces
// every alternative likelihood by 1; it exists for prior-reproduction checks.
struct PValueData {
  std::vector<double> x;
  std::vector<double> log_x;
  std::vector<double> log_1mx;
  bool flat_likelihood = false;

  explicit PValueData(std::span<const double> pvalues, bool flat = false);
  std::size_t size() const { return x.size(); }
};

Cluster make_cluster(double la, double lb, const DPConfig& config);
Cluster draw_base_cluster(const DPConfig& config, Rng& rng);
double log_base_density(double la, double lb, const DPConfig& config);

// log be(x_i; cluster) or 0 when the likelihood is flat.
double cluster_log_likelihood(const PValueData& data, std::size_t i, const Cluster& c);

// p > 0.5 -> null, else alternative in one shared G0 cluster; pi from prior.
LatentState init_state(const PValueData& data, const DPConfig& config, Rng& rng);

// Resamples every z_i. An alternative point turns null with probability
// pi / (pi + (1 - pi) be(x_i; a_c, b_c)); a null point draws a CRP label
// (an existing cluster with weight n_k, a fresh G0 atom with weight tau)
// and turns alternative with probability (1 - pi) be / (pi + (1 - pi) be).
// Emptied clusters are removed at the end of the sweep.
void update_z(LatentState& state, const PValueData& data, const DPConfig& config, Rng& rng);

// pi ~ Beta(alpha + #null, beta + #alt).
void update_pi(LatentState& state, const DPConfig& config, Rng& rng);

// Reassigns every alternative point's label using aux_components
// auxiliary G0 atoms.
void update_clusters(LatentState& state, const PValueData& data, const DPConfig& config,
                     int aux_components, Rng& rng);

struct MhCounters {
  std::size_t proposed = 0;
  std::size_t accepted = 0;

  double rate() const { return proposed == 0 ? 0.0 : static_cast<double>(accepted) / proposed; }
};

// One Gaussian random-walk Metropolis step on (L_a, L_b) per cluster.
void update_cluster_params(LatentState& state, const PValueData& data, const DPConfig& config,
                           double mh_step, Rng& rng, MhCounters& counters);

// Posterior draw of G: weights n_k / (n_alt + tau) on the clusters and
// tau / (n_alt + tau) on one fresh G0 atom (the last atom).
DiscreteMixingMeasure draw_mixing_measure(const LatentState& state, const DPConfig& config, Rng& rng);

struct PosteriorDraw {
  int iteration = 0;
  double pi = 0.0;
  int n_clusters = 0;
  DiscreteMixingMeasure g_draw;
};

struct ChainResult {
  std::vector<PosteriorDraw> draws;
  double acceptance_rate = 0.0; // post burn-in
  double final_mh_step = 0.0;
};

ChainResult run_chain(std::span<const double> pvalues, const DPConfig& config,
                      const ChainSettings& settings);
ChainResult run_chain(const PValueData& data, const DPConfig& config, const ChainSettings& settings);

// G ~ DP(G0, tau) by stick breaking, truncated once the remaining stick
// falls below tail_mass; the remainder is folded into the last atom.
DiscreteMixingMeasure sample_dp_prior(const DPConfig& config, Rng& rng, double tail_mass = 1e-10);

struct PriorCheckReport {
  std::size_t n_draws = 0;
  double ks_pi = 0.0;
  double p_pi = 0.0;
  double ks_a = 0.0;
  double p_a = 0.0;
  double ks_b = 0.0;
  double p_b = 0.0;
  double min_b = 0.0;
  bool passes = false;
};

// Runs the chain on one data-free point; the pi draws must follow the
// Beta prior and the fresh atoms the pushforward of G0.
PriorCheckReport prior_reproduction_check(const DPConfig& config, const ChainSettings& settings,
                                          double level = 0.01);

// Pushforward cdfs of G0 on a = exp(-|L_a|) and b = eps_b + exp(|L_b|).
double base_cdf_a(double a, const DPConfig& config);
double base_cdf_b(double b, const DPConfig& config);

} // namespace pfdr
