#pragma once

// Run configuration: a flat `key = value` text format shared by every CLI
// subcommand. `#` starts a comment; lists are comma separated; beta atoms
// are written `a:b`. Every key has a default, so an empty file is valid.

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pfdr/dp_sampler.hpp"
#include "pfdr/harness.hpp"
#include "pfdr/mixture.hpp"
#include "pfdr/pvalue_models.hpp"

namespace pfdr {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  // scenario
  std::uint64_t seed = 42;
  double pi0 = 0.8;
  std::size_t m = 1000;
  std::string alt_kind = "beta_mixture"; // beta_mixture | normal | t | exponential
  std::vector<BetaParams> alt_atoms{{0.5, 3.0}};
  std::vector<double> alt_weights{1.0};
  double test_theta0 = 0.0;
  double test_theta1 = 1.0;
  int test_n = 1;
  int test_df = 3;
  std::string test_sided = "one"; // one | two

  // prior
  double tau = 1.0;
  double sigma_a = 1.0;
  double sigma_b = 1.0;
  double eps_b = 0.05;
  double pi_alpha = 1.0;
  double pi_beta = 1.0;

  // chain
  int iterations = 4000;
  int burn_in = 1000;
  int thin = 1;
  double mh_step = 0.5;
  int aux_components = 3;

  // estimation
  std::vector<double> gamma_grid{0.01, 0.05, 0.1, 0.2};
  double credible_level = 0.9;
  std::vector<double> storey_lambdas{0.5};

  // sweep
  std::vector<std::size_t> m_list{200, 1000, 5000};
  int replicates = 10;
  double epsilon = 0.05;
  bool report_timing = false;

  // diagnose
  int cm_max_order = 8;
  double envelope_C = 1.0;
  double envelope_eps = 0.05;
  double envelope_delta = 0.5;

  // plotdata
  int plot_points = 999;

  // runtime
  std::string output_dir = ".";
  std::string log_level = "info";
  int threads = 0;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  TestModel test_model() const;
  Alternative alternative() const;
  ScenarioSpec scenario() const;
  DPConfig dp_config() const;
  ChainSettings chain_settings() const; // chain seed = seed
  SweepSpec sweep_spec() const;
  PValueMixture mixture_model() const;  // pi0 with the beta-mixture alternative
  TailEnvelope envelope() const;
};

// Parses and validates; unknown keys, type mismatches and range violations
// are all reported in one ConfigError naming each offending key.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

// Canonical text of every key; parse_config(to_text(c)) == c.
std::string to_text(const RunConfig& config);

// FNV-1a of the canonical text, as 16 hex digits. output_dir, log_level and
// threads are excluded since they cannot change any output.
std::string config_hash(const RunConfig& config);

// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

} // namespace pfdr
