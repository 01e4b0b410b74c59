#pragma once

// File formats. CSVs are comma separated, '.' decimal, LF endings, with a
// mandatory header row preceded by one '#' metadata line. JSON outputs carry
// the same metadata under a top-level "meta" object.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pfdr/dp_sampler.hpp"
#include "pfdr/estimators.hpp"
#include "pfdr/harness.hpp"
#include "pfdr/mixture.hpp"
#include "pfdr/pvalue_models.hpp"

namespace pfdr {

class CsvError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct OutputMeta {
  std::string tool_version;
  std::uint64_t seed = 0;
  std::string config_hash;
};

// "# pfdr <version> seed=<seed> config=<hash>"
std::string meta_line(const OutputMeta& meta);

struct PValueTable {
  std::vector<double> pvalues;
  std::optional<std::vector<std::uint8_t>> is_null;
};

// index,pvalue,is_null
void write_pvalues_csv(const std::string& path, const OutputMeta& meta, const SimulatedPValues& data);
// Needs a pvalue column; is_null is optional. Errors name the offending row.
PValueTable read_pvalues_csv(const std::string& path);
PValueTable parse_pvalues_csv(const std::string& text);

// iteration,pi,n_clusters
void write_draws_csv(const std::string& path, const OutputMeta& meta, std::span<const PosteriorDraw> draws);
void write_gdraws_json(const std::string& path, const OutputMeta& meta, std::span<const PosteriorDraw> draws);
void write_summary_json(const std::string& path, const OutputMeta& meta, const PosteriorSummary& summary);
// m,replicate,ball_mass,abs_pi_err,sup_F_err,max_pfdr_err,wall_time_s
void write_sweep_csv(const std::string& path, const OutputMeta& meta, const std::vector<SweepRow>& rows);
// gamma,true_pfdr,bayes_mean,bayes_lo,bayes_hi,storey,lambda
void write_comparison_csv(const std::string& path, const OutputMeta& meta, const std::vector<ComparisonRow>& rows);
// x,density
void write_density_csv(const std::string& path, const OutputMeta& meta, std::span<const double> xs,
                       std::span<const double> density);

struct DiagnoseReport {
  double pi_of_F = 0.0;
  int cm_orders_passed = 0;           // H(e^-y)
  int cm_survival_orders_passed = 0;  // 1 - H(1 - e^-y)
  bool tail_envelope_ok = false;
  std::optional<double> tail_first_violation;
};

std::string diagnose_json(const OutputMeta& meta, const DiagnoseReport& report);
void write_text_file(const std::string& path, const std::string& text);

} // namespace pfdr
