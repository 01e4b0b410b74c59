#include "pfdr/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pfdr/config.hpp"

namespace pfdr {

using nlohmann::json;

std::string meta_line(const OutputMeta& meta) {
  return "# pfdr " + meta.tool_version + " seed=" + std::to_string(meta.seed) + " config=" + meta.config_hash;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CsvError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw CsvError("failed writing '" + path + "'");
}

namespace {

json meta_json(const OutputMeta& meta) {
  return {{"tool_version", meta.tool_version}, {"seed", meta.seed}, {"config_hash", meta.config_hash}};
}

json measure_json(const DiscreteMixingMeasure& g) {
  json atoms = json::array();
  for (std::size_t k = 0; k < g.size(); ++k) {
    atoms.push_back({{"a", g.atoms[k].a}, {"b", g.atoms[k].b}, {"weight", g.weights[k]}});
  }
  return atoms;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

} // namespace

void write_pvalues_csv(const std::string& path, const OutputMeta& meta, const SimulatedPValues& data) {
  std::string text = meta_line(meta) + "\nindex,pvalue,is_null\n";
  for (std::size_t i = 0; i < data.pvalues.size(); ++i) {
    text += std::to_string(i) + "," + format_double(data.pvalues[i]) + "," +
            std::to_string(static_cast<int>(data.is_null[i])) + "\n";
  }
  write_text_file(path, text);
}

PValueTable parse_pvalues_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int row = 0;
  bool have_header = false;
  int p_col = -1;
  int null_col = -1;
  std::size_t n_cols = 0;
  PValueTable table;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header) {
      if (row == 1 && !line.empty() && line.front() == '#') continue;
      const auto header = split_fields(line);
      n_cols = header.size();
      for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == "pvalue") p_col = static_cast<int>(c);
        if (header[c] == "is_null") null_col = static_cast<int>(c);
      }
      if (p_col < 0) throw CsvError("row " + std::to_string(row) + ": header has no 'pvalue' column");
      if (null_col >= 0) table.is_null.emplace();
      have_header = true;
      continue;
    }
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != n_cols) {
      throw CsvError("row " + std::to_string(row) + ": expected " + std::to_string(n_cols) + " fields, got " +
                     std::to_string(fields.size()));
    }
    const std::string& f = fields[p_col];
    double p = 0.0;
    const auto res = std::from_chars(f.data(), f.data() + f.size(), p);
    if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
      throw CsvError("row " + std::to_string(row) + ": pvalue '" + f + "' is not a number");
    }
    if (!(p > 0.0 && p < 1.0)) {
      throw CsvError("row " + std::to_string(row) + ": pvalue " + f + " outside (0,1)");
    }
    table.pvalues.push_back(p);
    if (null_col >= 0) {
      const std::string& z = fields[null_col];
      if (z != "0" && z != "1") throw CsvError("row " + std::to_string(row) + ": is_null must be 0 or 1");
      table.is_null->push_back(z == "1" ? 1 : 0);
    }
  }
  if (!have_header) throw CsvError("row 1: missing header");
  if (table.pvalues.empty()) throw CsvError("no p-values found");
  return table;
}

PValueTable read_pvalues_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError("cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_pvalues_csv(text.str());
}

void write_draws_csv(const std::string& path, const OutputMeta& meta, std::span<const PosteriorDraw> draws) {
  std::string text = meta_line(meta) + "\niteration,pi,n_clusters\n";
  for (const PosteriorDraw& d : draws) {
    text += std::to_string(d.iteration) + "," + format_double(d.pi) + "," + std::to_string(d.n_clusters) + "\n";
  }
  write_text_file(path, text);
}

void write_gdraws_json(const std::string& path, const OutputMeta& meta, std::span<const PosteriorDraw> draws) {
  json doc;
  doc["meta"] = meta_json(meta);
  json arr = json::array();
  for (const PosteriorDraw& d : draws) {
    arr.push_back({{"iteration", d.iteration}, {"pi", d.pi}, {"atoms", measure_json(d.g_draw)}});
  }
  doc["draws"] = std::move(arr);
  write_text_file(path, doc.dump(1) + "\n");
}

void write_summary_json(const std::string& path, const OutputMeta& meta, const PosteriorSummary& summary) {
  json doc;
  doc["meta"] = meta_json(meta);
  doc["pi_mean"] = summary.pi_mean;
  doc["pi_ci"] = {summary.pi_lo, summary.pi_hi};
  doc["credible_level"] = summary.credible_level;
  doc["ess_pi"] = summary.ess_pi;
  doc["clipped"] = summary.clipped;
  json curve = json::array();
  for (const PfdrCurvePoint& p : summary.pfdr_curve) {
    curve.push_back({{"gamma", p.gamma}, {"mean", p.mean}, {"lo", p.lo}, {"hi", p.hi}});
  }
  doc["pfdr_curve"] = std::move(curve);
  write_text_file(path, doc.dump(2) + "\n");
}

void write_sweep_csv(const std::string& path, const OutputMeta& meta, const std::vector<SweepRow>& rows) {
  std::string text = meta_line(meta) + "\nm,replicate,ball_mass,abs_pi_err,sup_F_err,max_pfdr_err,wall_time_s\n";
  for (const SweepRow& r : rows) {
    if (!r.ok) {
      text += std::to_string(r.m) + "," + std::to_string(r.replicate) + ",nan,nan,nan,nan," +
              format_double(r.wall_time_s) + "\n";
      continue;
    }
    text += std::to_string(r.m) + "," + std::to_string(r.replicate) + "," + format_double(r.ball_mass) + "," +
            format_double(r.abs_pi_err) + "," + format_double(r.sup_F_err) + "," + format_double(r.max_pfdr_err) +
            "," + format_double(r.wall_time_s) + "\n";
  }
  write_text_file(path, text);
}

void write_comparison_csv(const std::string& path, const OutputMeta& meta, const std::vector<ComparisonRow>& rows) {
  std::string text = meta_line(meta) + "\ngamma,true_pfdr,bayes_mean,bayes_lo,bayes_hi,storey,lambda\n";
  for (const ComparisonRow& r : rows) {
    text += format_double(r.gamma) + "," + format_double(r.true_pfdr) + "," + format_double(r.bayes_mean) + "," +
            format_double(r.bayes_lo) + "," + format_double(r.bayes_hi) + "," + format_double(r.storey) + "," +
            format_double(r.lambda) + "\n";
  }
  write_text_file(path, text);
}

void write_density_csv(const std::string& path, const OutputMeta& meta, std::span<const double> xs,
                       std::span<const double> density) {
  std::string text = meta_line(meta) + "\nx,density\n";
  for (std::size_t i = 0; i < xs.size(); ++i) text += format_double(xs[i]) + "," + format_double(density[i]) + "\n";
  write_text_file(path, text);
}

std::string diagnose_json(const OutputMeta& meta, const DiagnoseReport& report) {
  json doc;
  doc["meta"] = meta_json(meta);
  doc["pi_of_F"] = report.pi_of_F;
  doc["cm_orders_passed"] = report.cm_orders_passed;
  doc["cm_survival_orders_passed"] = report.cm_survival_orders_passed;
  doc["tail_envelope_ok"] = report.tail_envelope_ok;
  doc["tail_first_violation"] = report.tail_first_violation ? json(*report.tail_first_violation) : json(nullptr);
  return doc.dump(2) + "\n";
}

} // namespace pfdr
