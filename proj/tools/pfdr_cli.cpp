// pfdr command line: simulate / estimate / diagnose / sweep / compare / plotdata.
//
// Exit codes: 0 ok, 1 runtime failure (bad config, bad data, numeric
// failure), 2 usage error.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "pfdr/config.hpp"
#include "pfdr/csv_io.hpp"
#include "pfdr/dp_sampler.hpp"
#include "pfdr/estimators.hpp"
#include "pfdr/harness.hpp"
#include "pfdr/kernels.hpp"
#include "pfdr/mixture.hpp"
#include "pfdr/random.hpp"

namespace fs = std::filesystem;
using namespace pfdr;

namespace {

struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> threads;
  std::string pvalues; // estimate only
};

// --out, then PFDR_OUTPUT_DIR, then the config's output_dir.
RunConfig effective_config(const Flags& flags) {
  RunConfig c = flags.config_path.empty() ? RunConfig{} : load_config(flags.config_path);
  if (flags.seed) c.seed = *flags.seed;
  if (flags.threads) c.threads = *flags.threads;
  if (!flags.out.empty()) {
    c.output_dir = flags.out;
  } else if (const char* env = std::getenv("PFDR_OUTPUT_DIR"); env && *env) {
    c.output_dir = env;
  }
  return parse_config(to_text(c)); // revalidates overrides
}

std::string out_path(const RunConfig& c, const char* name) { return (fs::path(c.output_dir) / name).string(); }

OutputMeta meta_for(const RunConfig& c) { return {PFDR_VERSION, c.seed, config_hash(c)}; }

void run_simulate(const RunConfig& c) {
  const SimulatedPValues data = sample_pvalues(c.scenario());
  write_pvalues_csv(out_path(c, "pvalues.csv"), meta_for(c), data);
  std::size_t nulls = 0;
  for (auto z : data.is_null) nulls += z;
  std::cout << "wrote " << data.pvalues.size() << " p-values (" << nulls << " null) to "
            << out_path(c, "pvalues.csv") << "\n";
}

void run_estimate(const RunConfig& c, const std::string& pvalues_path) {
  const PValueTable table = read_pvalues_csv(pvalues_path);
  const ChainResult chain = run_chain(table.pvalues, c.dp_config(), c.chain_settings());
  const PosteriorSummary summary = summarize(chain.draws, c.gamma_grid, c.credible_level);
  const OutputMeta meta = meta_for(c);
  write_draws_csv(out_path(c, "draws.csv"), meta, chain.draws);
  write_gdraws_json(out_path(c, "gdraws.json"), meta, chain.draws);
  write_summary_json(out_path(c, "summary.json"), meta, summary);
  std::cout << "m = " << table.pvalues.size() << ", draws = " << chain.draws.size()
            << ", acceptance = " << format_double(chain.acceptance_rate) << "\n";
  std::cout << "pi: mean " << format_double(summary.pi_mean) << ", interval [" << format_double(summary.pi_lo)
            << ", " << format_double(summary.pi_hi) << "], ess " << format_double(summary.ess_pi) << "\n";
  for (const auto& p : summary.pfdr_curve)
    std::cout << "pFDR(" << format_double(p.gamma) << ") = " << format_double(p.mean) << " ["
              << format_double(p.lo) << ", " << format_double(p.hi) << "]\n";
}

void run_diagnose(const RunConfig& c) {
  const PValueMixture model = c.mixture_model();
  model.validate();
  const auto h = [&](double x) { return mixture_cdf(x, model.mixing); };
  DiagnoseReport report;
  report.pi_of_F = pi_of_F(model);
  report.cm_orders_passed = cm_check(h, CmTransform::CdfAtExp, c.cm_max_order).orders_passed;
  report.cm_survival_orders_passed = cm_check(h, CmTransform::SurvivalAtOneMinus, c.cm_max_order).orders_passed;
  const EnvelopeReport env = tail_envelope_check(model.mixing, c.envelope());
  report.tail_envelope_ok = env.ok;
  report.tail_first_violation = env.first_violation;
  const std::string text = diagnose_json(meta_for(c), report);
  write_text_file(out_path(c, "diagnose.json"), text);
  std::cout << text;
}

void run_sweep_cmd(const RunConfig& c) {
  const std::vector<SweepRow> rows = run_sweep(c.sweep_spec(), c.dp_config(), c.chain_settings());
  write_sweep_csv(out_path(c, "sweep.csv"), meta_for(c), rows);
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.ok ? 0 : 1;
  // descriptive medians; any pass threshold on them is a calibration choice
  std::cout << "m,cells,median_ball_mass,median_abs_pi_err,median_sup_F_err,median_max_pfdr_err,q90_pi_excess\n";
  for (const auto& s : summarize_sweep(rows, c.pi0))
    std::cout << s.m << ',' << s.cells << ',' << format_double(s.median_ball_mass) << ','
              << format_double(s.median_abs_pi_err) << ',' << format_double(s.median_sup_F_err) << ','
              << format_double(s.median_max_pfdr_err) << ',' << format_double(s.q90_pi_excess) << "\n";
  if (failed > 0) throw std::runtime_error(std::to_string(failed) + " sweep cells failed; see sweep.csv");
}

void run_compare(const RunConfig& c) {
  ChainSettings settings = c.chain_settings();
  settings.seed = derive_seed(c.seed, 2);
  const Comparison cmp = compare_estimators(c.scenario(), c.dp_config(), settings, c.storey_lambdas,
                                            c.gamma_grid, c.credible_level);
  write_comparison_csv(out_path(c, "comparison.csv"), meta_for(c), cmp.rows);
  std::cout << "gamma,lambda,true_pfdr,bayes_mean,storey\n";
  for (const auto& r : cmp.rows)
    std::cout << format_double(r.gamma) << ',' << format_double(r.lambda) << ',' << format_double(r.true_pfdr)
              << ',' << format_double(r.bayes_mean) << ',' << format_double(r.storey) << "\n";
}

// Alternative p-value density on an interior grid: the parametric test's
// density for the location/scale models, h(x) for a beta mixture.
void run_plotdata(const RunConfig& c) {
  std::vector<double> xs(static_cast<std::size_t>(c.plot_points));
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(i + 1) / (xs.size() + 1);
  std::vector<double> density;
  if (c.alt_kind == "beta_mixture") {
    const DiscreteMixingMeasure g{c.alt_atoms, c.alt_weights};
    density.reserve(xs.size());
    for (double x : xs) density.push_back(mixture_density(x, g));
  } else {
    density = kernels::density_curve(c.test_model(), c.test_theta1, xs);
  }
  write_density_csv(out_path(c, "density.csv"), meta_for(c), xs, density);
  std::cout << "wrote " << xs.size() << " density points to " << out_path(c, "density.csv") << "\n";
}

void add_common(CLI::App* sub, Flags& flags) {
  sub->add_option("--config", flags.config_path, "key = value config file (defaults when omitted)")
      ->check(CLI::ExistingFile);
  sub->add_option("--seed", flags.seed, "master seed, overrides the config");
  sub->add_option("--out", flags.out, "output directory, overrides PFDR_OUTPUT_DIR and the config");
  sub->add_option("--threads", flags.threads, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"pfdr: positive false discovery rate estimation with a Dirichlet-process beta mixture"};
  app.require_subcommand(1, 1);
  Flags flags;

  struct Cmd {
    const char* name;
    const char* help;
  };
  const Cmd cmds[] = {
      {"simulate", "simulate p-values from the configured two-groups scenario -> pvalues.csv"},
      {"estimate", "fit the DP beta-mixture posterior -> draws.csv, gdraws.json, summary.json"},
      {"diagnose", "pi(F), complete monotonicity and tail envelope of a beta mixture -> diagnose.json"},
      {"sweep", "consistency sweep over m and replicates -> sweep.csv"},
      {"compare", "true pFDR vs Bayes vs Storey on one simulated dataset -> comparison.csv"},
      {"plotdata", "alternative p-value density curve -> density.csv"},
  };
  for (const auto& cmd : cmds) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    add_common(sub, flags);
    if (std::string(cmd.name) == "estimate")
      sub->add_option("--pvalues", flags.pvalues, "input CSV with a pvalue column")->required();
  }

  if (argc > 1 && argv[1][0] != '-' && !app.get_subcommand_no_throw(argv[1])) {
    std::cerr << "error: unknown subcommand '" << argv[1] << "'\n\n" << app.help();
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }
  const std::string name = app.get_subcommands().front()->get_name();

  auto logger = spdlog::stderr_color_mt("pfdr");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");

  try {
    const RunConfig c = effective_config(flags);
    spdlog::set_level(spdlog::level::from_str(c.log_level));
    kernels::set_threads(c.threads);
    fs::create_directories(c.output_dir);

    std::cout << "# effective config (seed " << c.seed << ", hash " << config_hash(c) << ")\n"
              << to_text(c) << "\n";

    if (name == "simulate") run_simulate(c);
    else if (name == "estimate") run_estimate(c, flags.pvalues);
    else if (name == "diagnose") run_diagnose(c);
    else if (name == "sweep") run_sweep_cmd(c);
    else if (name == "compare") run_compare(c);
    else run_plotdata(c);
  } catch (const std::exception& e) {
    spdlog::error("{}: {}", name, e.what());
    return 1;
  }
  return 0;
}
