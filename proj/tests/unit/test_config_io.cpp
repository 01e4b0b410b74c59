#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "pfdr/config.hpp"
#include "pfdr/csv_io.hpp"

using namespace pfdr;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("pfdr_io_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

const OutputMeta kMeta{"0.1.0", 42, "0123456789abcdef"};

} // namespace

TEST_CASE("empty config gives the defaults") {
  const RunConfig c = parse_config("");
  CHECK(c == RunConfig{});
  CHECK(parse_config("# only a comment\n\n   \n") == RunConfig{});
}

TEST_CASE("config values parse, with comments and lists") {
  const RunConfig c = parse_config(
      "seed = 7  # trailing comment\n"
      "pi0=0.6\n"
      "alt_atoms = 0.2:2, 1:1.5\n"
      "alt_weights = 0.25, 0.75\n"
      "gamma_grid = 0.02,0.1\n"
      "m_list = 10, 20, 40\n"
      "report_timing = true\n");
  CHECK(c.seed == 7);
  CHECK(c.pi0 == 0.6);
  REQUIRE(c.alt_atoms.size() == 2);
  CHECK(c.alt_atoms[1] == BetaParams{1.0, 1.5});
  CHECK(c.m_list == std::vector<std::size_t>{10, 20, 40});
  CHECK(c.report_timing);
  const auto scenario = c.scenario();
  CHECK(std::holds_alternative<DiscreteMixingMeasure>(scenario.alt));
}

TEST_CASE("range errors name the key") {
  try {
    parse_config("tau = -1\n");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("tau") != std::string::npos);
  }
  try {
    parse_config("tua = 1\nsigma_a = 0\nm = abc\n");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("tua") != std::string::npos);
    CHECK(msg.find("m:") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("alt_weights = 0.5\nalt_atoms = 0.5:2, 0.3:4\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("burn_in = 5000\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("gamma_grid = 0.2, 0.1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("no equals sign\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.txt"), ConfigError);
}

TEST_CASE("config round trip through the canonical text") {
  RunConfig c;
  c.seed = 123456789012345ULL;
  c.pi0 = 0.1 + 0.2; // not exactly representable as a short decimal
  c.alt_atoms = {{1.0 / 3.0, 2.5}, {0.7, 1.0}};
  c.alt_weights = {0.4, 0.6};
  c.gamma_grid = {1e-5, 0.3};
  c.output_dir = "some/dir";
  const RunConfig back = parse_config(to_text(c));
  CHECK(back == c);
  CHECK(config_hash(back) == config_hash(c));
  CHECK(config_hash(c).size() == 16);
  RunConfig d = c;
  d.tau = 2.0;
  CHECK(config_hash(d) != config_hash(c));
  RunConfig e = c;
  e.output_dir = "elsewhere";
  e.threads = 3;
  e.log_level = "off";
  CHECK(config_hash(e) == config_hash(c));
}

TEST_CASE("format_double round trips") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) * std::pow(10.0, (i % 40) - 20);
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(1.0) == "1");
}

TEST_CASE("p-value CSV write and read back") {
  TempDir dir;
  SimulatedPValues data;
  data.pvalues = {0.1, 1.0 / 3.0, 0.999};
  data.is_null = {0, 1, 1};
  const auto path = (dir.path / "p.csv").string();
  write_pvalues_csv(path, kMeta, data);
  const std::string text = slurp(path);
  CHECK(text.rfind("# pfdr 0.1.0 seed=42 config=0123456789abcdef\nindex,pvalue,is_null\n", 0) == 0);
  CHECK(text.find('\r') == std::string::npos);
  const auto table = read_pvalues_csv(path);
  CHECK(table.pvalues == data.pvalues);
  REQUIRE(table.is_null.has_value());
  CHECK(*table.is_null == data.is_null);
}

TEST_CASE("p-value CSV parsing errors carry row numbers") {
  auto message = [](const std::string& text) {
    try {
      parse_pvalues_csv(text);
    } catch (const CsvError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("pvalue\n0.1\nabc\n").find("row 3") != std::string::npos);
  CHECK(message("pvalue\n0.1\n1.5\n").find("row 3") != std::string::npos);
  CHECK(message("# meta\nindex,pvalue\n0,0.5\n1\n").find("row 4") != std::string::npos);
  CHECK(message("index,p\n0,0.5\n").find("row 1") != std::string::npos);
  CHECK_FALSE(message("pvalue\n").empty());
  // a bare column without metadata is accepted
  const auto t = parse_pvalues_csv("pvalue\n0.25\n0.5\n");
  CHECK(t.pvalues == std::vector<double>{0.25, 0.5});
  CHECK_FALSE(t.is_null.has_value());
}

TEST_CASE("JSON outputs carry metadata") {
  TempDir dir;
  PosteriorSummary s;
  s.pi_mean = 0.8;
  s.pfdr_curve = {{0.05, 0.2, 0.1, 0.3}};
  const auto path = (dir.path / "summary.json").string();
  write_summary_json(path, kMeta, s);
  const auto doc = nlohmann::json::parse(slurp(path));
  CHECK(doc["meta"]["seed"] == 42);
  CHECK(doc["meta"]["config_hash"] == "0123456789abcdef");
  CHECK(doc["pfdr_curve"][0]["gamma"] == 0.05);

  DiagnoseReport r;
  r.pi_of_F = 0.8;
  r.tail_envelope_ok = true;
  const auto diag = nlohmann::json::parse(diagnose_json(kMeta, r));
  CHECK(diag["tail_first_violation"].is_null());
  CHECK(diag["meta"]["tool_version"] == "0.1.0");
}

TEST_CASE("sweep and comparison CSV headers") {
  TempDir dir;
  std::vector<SweepRow> rows(1);
  rows[0].m = 200;
  rows[0].ball_mass = 0.25;
  const auto sweep = (dir.path / "sweep.csv").string();
  write_sweep_csv(sweep, kMeta, rows);
  CHECK(slurp(sweep).find("\nm,replicate,ball_mass,abs_pi_err,sup_F_err,max_pfdr_err,wall_time_s\n200,0,0.25,") !=
        std::string::npos);
  const auto cmp = (dir.path / "comparison.csv").string();
  write_comparison_csv(cmp, kMeta, {ComparisonRow{0.05, 0.5, 0.3, 0.31, 0.2, 0.4, 0.29}});
  CHECK(slurp(cmp).find("\ngamma,true_pfdr,bayes_mean,bayes_lo,bayes_hi,storey,lambda\n0.05,0.3,0.31,0.2,0.4,0.29,0.5\n") !=
        std::string::npos);
}
