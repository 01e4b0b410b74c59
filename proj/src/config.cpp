#include "pfdr/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <type_traits>

#include "pfdr/errors.hpp"

namespace pfdr {

std::string format_double(double v) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, result.ptr);
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto result = std::from_chars(s.data(), s.data() + s.size(), v);
  if (result.ec != std::errc() || result.ptr != s.data() + s.size()) {
    throw ConfigError("expected a number, got '" + s + "'");
  }
  return v;
}

template <typename Int>
Int parse_integer(const std::string& s) {
  Int v{};
  const auto result = std::from_chars(s.data(), s.data() + s.size(), v);
  if (result.ec != std::errc() || result.ptr != s.data() + s.size()) {
    throw ConfigError("expected an integer, got '" + s + "'");
  }
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("expected true/false, got '" + s + "'");
}

BetaParams parse_atom(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw ConfigError("expected an atom a:b, got '" + s + "'");
  return {parse_double(trim(s.substr(0, colon))), parse_double(trim(s.substr(colon + 1)))};
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, F&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ',';
    out += fmt(items[i]);
  }
  return out;
}

// Binds each key to a parser and a printer over one RunConfig instance.
struct Field {
  std::function<void(RunConfig&, const std::string&)> parse;
  std::function<std::string(const RunConfig&)> print;
};

template <typename T>
Field number_field(T RunConfig::*member) {
  return {[member](RunConfig& c, const std::string& v) {
            if constexpr (std::is_floating_point_v<T>) {
              c.*member = parse_double(v);
            } else {
              c.*member = parse_integer<T>(v);
            }
          },
          [member](const RunConfig& c) {
            if constexpr (std::is_floating_point_v<T>) {
              return format_double(c.*member);
            } else {
              return std::to_string(c.*member);
            }
          }};
}

Field string_field(std::string RunConfig::*member) {
  return {[member](RunConfig& c, const std::string& v) { c.*member = v; },
          [member](const RunConfig& c) { return c.*member; }};
}

Field bool_field(bool RunConfig::*member) {
  return {[member](RunConfig& c, const std::string& v) { c.*member = parse_bool(v); },
          [member](const RunConfig& c) { return std::string(c.*member ? "true" : "false"); }};
}

Field double_list_field(std::vector<double> RunConfig::*member) {
  return {[member](RunConfig& c, const std::string& v) {
            std::vector<double> out;
            for (const std::string& item : split_list(v)) out.push_back(parse_double(item));
            c.*member = out;
          },
          [member](const RunConfig& c) { return join(c.*member, [](double d) { return format_double(d); }); }};
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = [] {
    std::map<std::string, Field> t;
    t["seed"] = number_field(&RunConfig::seed);
    t["pi0"] = number_field(&RunConfig::pi0);
    t["m"] = number_field(&RunConfig::m);
    t["alt_kind"] = string_field(&RunConfig::alt_kind);
    t["alt_atoms"] = {[](RunConfig& c, const std::string& v) {
                        std::vector<BetaParams> atoms;
                        for (const std::string& item : split_list(v)) atoms.push_back(parse_atom(item));
                        c.alt_atoms = atoms;
                      },
                      [](const RunConfig& c) {
                        return join(c.alt_atoms, [](BetaParams p) { return format_double(p.a) + ":" + format_double(p.b); });
                      }};
    t["alt_weights"] = double_list_field(&RunConfig::alt_weights);
    t["test_theta0"] = number_field(&RunConfig::test_theta0);
    t["test_theta1"] = number_field(&RunConfig::test_theta1);
    t["test_n"] = number_field(&RunConfig::test_n);
    t["test_df"] = number_field(&RunConfig::test_df);
    t["test_sided"] = string_field(&RunConfig::test_sided);
    t["tau"] = number_field(&RunConfig::tau);
    t["sigma_a"] = number_field(&RunConfig::sigma_a);
    t["sigma_b"] = number_field(&RunConfig::sigma_b);
    t["eps_b"] = number_field(&RunConfig::eps_b);
    t["pi_alpha"] = number_field(&RunConfig::pi_alpha);
    t["pi_beta"] = number_field(&RunConfig::pi_beta);
    t["iterations"] = number_field(&RunConfig::iterations);
    t["burn_in"] = number_field(&RunConfig::burn_in);
    t["thin"] = number_field(&RunConfig::thin);
    t["mh_step"] = number_field(&RunConfig::mh_step);
    t["aux_components"] = number_field(&RunConfig::aux_components);
    t["gamma_grid"] = double_list_field(&RunConfig::gamma_grid);
    t["credible_level"] = number_field(&RunConfig::credible_level);
    t["storey_lambdas"] = double_list_field(&RunConfig::storey_lambdas);
    t["m_list"] = {[](RunConfig& c, const std::string& v) {
                     std::vector<std::size_t> out;
                     for (const std::string& item : split_list(v)) out.push_back(parse_integer<std::size_t>(item));
                     c.m_list = out;
                   },
                   [](const RunConfig& c) { return join(c.m_list, [](std::size_t m) { return std::to_string(m); }); }};
    t["replicates"] = number_field(&RunConfig::replicates);
    t["epsilon"] = number_field(&RunConfig::epsilon);
    t["report_timing"] = bool_field(&RunConfig::report_timing);
    t["cm_max_order"] = number_field(&RunConfig::cm_max_order);
    t["envelope_C"] = number_field(&RunConfig::envelope_C);
    t["envelope_eps"] = number_field(&RunConfig::envelope_eps);
    t["envelope_delta"] = number_field(&RunConfig::envelope_delta);
    t["plot_points"] = number_field(&RunConfig::plot_points);
    t["output_dir"] = string_field(&RunConfig::output_dir);
    t["log_level"] = string_field(&RunConfig::log_level);
    t["threads"] = number_field(&RunConfig::threads);
    return t;
  }();
  return table;
}

// Collects range violations as "key: message".
class Checker {
public:
  void require(bool ok, const std::string& key, const std::string& message) {
    if (!ok) problems_.push_back(key + ": " + message);
  }
  void append(const std::string& problem) { problems_.push_back(problem); }
  const std::vector<std::string>& problems() const { return problems_; }

private:
  std::vector<std::string> problems_;
};

bool strictly_increasing_in_unit(const std::vector<double>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0 && v[i] < 1.0)) return false;
    if (i > 0 && !(v[i] > v[i - 1])) return false;
  }
  return !v.empty();
}

void validate(const RunConfig& c, Checker& check) {
  check.require(c.pi0 >= 0.0 && c.pi0 <= 1.0, "pi0", "must lie in [0,1]");
  check.require(c.m >= 1, "m", "must be >= 1");
  const std::vector<std::string> kinds{"beta_mixture", "normal", "t", "exponential"};
  check.require(std::find(kinds.begin(), kinds.end(), c.alt_kind) != kinds.end(), "alt_kind",
                "must be one of beta_mixture, normal, t, exponential");
  if (c.alt_kind == "beta_mixture") {
    check.require(!c.alt_atoms.empty(), "alt_atoms", "must list at least one atom");
    check.require(c.alt_atoms.size() == c.alt_weights.size(), "alt_weights", "must have one weight per atom");
    for (const BetaParams& p : c.alt_atoms) {
      check.require(p.is_reflected_j(), "alt_atoms", "atoms need a in (0,1] and b >= 1");
    }
    double total = 0.0;
    bool nonnegative = true;
    for (double w : c.alt_weights) {
      total += w;
      nonnegative = nonnegative && w >= 0.0;
    }
    check.require(nonnegative && std::fabs(total - 1.0) <= kWeightSumTol, "alt_weights",
                  "must be nonnegative and sum to 1");
  }
  check.require(c.test_n >= 1, "test_n", "must be >= 1");
  check.require(c.test_df >= 1, "test_df", "must be >= 1");
  check.require(c.test_sided == "one" || c.test_sided == "two", "test_sided", "must be one or two");
  if (c.alt_kind == "exponential") {
    check.require(c.test_theta0 > 0.0, "test_theta0", "exponential scale must be positive");
    check.require(c.test_theta1 > 0.0, "test_theta1", "exponential scale must be positive");
    check.require(c.test_sided == "one", "test_sided", "exponential model is one-sided only");
  }
  check.require(c.tau > 0.0, "tau", "must be positive");
  check.require(c.sigma_a > 0.0, "sigma_a", "must be positive");
  check.require(c.sigma_b > 0.0, "sigma_b", "must be positive");
  check.require(c.eps_b > 0.0, "eps_b", "must be positive");
  check.require(c.pi_alpha > 0.0, "pi_alpha", "must be positive");
  check.require(c.pi_beta > 0.0, "pi_beta", "must be positive");
  check.require(c.iterations >= 1, "iterations", "must be >= 1");
  check.require(c.burn_in >= 0 && c.burn_in < c.iterations, "burn_in", "must lie in [0, iterations)");
  check.require(c.thin >= 1, "thin", "must be >= 1");
  check.require(c.mh_step > 0.0, "mh_step", "must be positive");
  check.require(c.aux_components >= 1, "aux_components", "must be >= 1");
  check.require(strictly_increasing_in_unit(c.gamma_grid), "gamma_grid",
                "must be nonempty, strictly increasing and inside (0,1)");
  check.require(c.credible_level > 0.0 && c.credible_level < 1.0, "credible_level", "must lie in (0,1)");
  bool lambdas_ok = !c.storey_lambdas.empty();
  for (double l : c.storey_lambdas) lambdas_ok = lambdas_ok && l > 0.0 && l < 1.0;
  check.require(lambdas_ok, "storey_lambdas", "must be nonempty and inside (0,1)");
  bool m_list_ok = !c.m_list.empty();
  for (std::size_t i = 0; i < c.m_list.size(); ++i) {
    m_list_ok = m_list_ok && c.m_list[i] >= 1 && (i == 0 || c.m_list[i] > c.m_list[i - 1]);
  }
  check.require(m_list_ok, "m_list", "must be nonempty, positive and strictly increasing");
  check.require(c.replicates >= 3, "replicates", "must be >= 3");
  check.require(c.epsilon > 0.0, "epsilon", "must be positive");
  check.require(c.cm_max_order >= 1 && c.cm_max_order <= kCmMaxOrder, "cm_max_order", "must lie in [1, 12]");
  check.require(c.envelope_C > 0.0, "envelope_C", "must be positive");
  check.require(c.envelope_eps > 0.0, "envelope_eps", "must be positive");
  check.require(c.envelope_delta > 0.0 && c.envelope_delta < 1.0, "envelope_delta", "must lie in (0,1)");
  check.require(c.plot_points >= 2, "plot_points", "must be >= 2");
  check.require(!c.output_dir.empty(), "output_dir", "must not be empty");
  const std::vector<std::string> levels{"trace", "debug", "info", "warn", "error", "off"};
  check.require(std::find(levels.begin(), levels.end(), c.log_level) != levels.end(), "log_level",
                "must be one of trace, debug, info, warn, error, off");
  check.require(c.threads >= 0, "threads", "must be >= 0");
}

std::string join_problems(const std::vector<std::string>& problems) {
  std::string out = "invalid configuration:";
  for (const std::string& p : problems) out += "\n  " + p;
  return out;
}

} // namespace

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  Checker check;
  std::vector<std::string> unknown;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      check.append("line " + std::to_string(line_no) + ": expected key = value");
      continue;
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    const auto it = fields().find(key);
    if (it == fields().end()) {
      unknown.push_back(key);
      continue;
    }
    try {
      it->second.parse(config, value);
    } catch (const ConfigError& e) {
      check.append(key + ": " + e.what());
    }
  }
  if (!unknown.empty()) {
    std::string listed;
    for (std::size_t i = 0; i < unknown.size(); ++i) listed += (i ? ", " : "") + unknown[i];
    check.append("unknown keys: " + listed);
  }
  if (check.problems().empty()) validate(config, check);
  if (!check.problems().empty()) throw ConfigError(join_problems(check.problems()));
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string to_text(const RunConfig& config) {
  std::string out;
  for (const auto& [key, field] : fields()) out += key + " = " + field.print(config) + "\n";
  return out;
}

std::string config_hash(const RunConfig& config) {
  // runtime-only keys do not change results, so they stay out of the hash
  RunConfig c = config;
  c.output_dir = RunConfig{}.output_dir;
  c.log_level = RunConfig{}.log_level;
  c.threads = 0;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_text(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

TestModel RunConfig::test_model() const {
  TestModel model;
  if (alt_kind == "t") model.kind = TestKind::TLocation;
  else if (alt_kind == "exponential") model.kind = TestKind::ExponentialScale;
  else model.kind = TestKind::NormalLocation;
  model.theta0 = test_theta0;
  model.sidedness = test_sided == "two" ? Sidedness::TwoSided : Sidedness::OneSided;
  model.n = test_n;
  model.df = test_df;
  return model;
}

Alternative RunConfig::alternative() const {
  if (alt_kind == "beta_mixture") return DiscreteMixingMeasure{alt_atoms, alt_weights};
  return ParametricAlternative{test_model(), test_theta1};
}

ScenarioSpec RunConfig::scenario() const {
  ScenarioSpec s;
  s.pi0 = pi0;
  s.alt = alternative();
  s.m = m;
  s.seed = seed;
  return s;
}

DPConfig RunConfig::dp_config() const {
  return {tau, sigma_a, sigma_b, eps_b, pi_alpha, pi_beta};
}

ChainSettings RunConfig::chain_settings() const {
  ChainSettings s;
  s.iterations = iterations;
  s.burn_in = burn_in;
  s.thin = thin;
  s.seed = seed;
  s.mh_step = mh_step;
  s.aux_components = aux_components;
  return s;
}

SweepSpec RunConfig::sweep_spec() const {
  SweepSpec s;
  s.m_list = m_list;
  s.replicates = replicates;
  s.scenario = scenario();
  s.epsilon = epsilon;
  s.gamma_grid = gamma_grid;
  s.report_timing = report_timing;
  return s;
}

PValueMixture RunConfig::mixture_model() const {
  if (alt_kind != "beta_mixture") throw ConfigError("alt_kind: diagnose needs a beta_mixture alternative");
  return {pi0, DiscreteMixingMeasure{alt_atoms, alt_weights}};
}

TailEnvelope RunConfig::envelope() const { return {envelope_C, envelope_eps, envelope_delta}; }

} // namespace pfdr
