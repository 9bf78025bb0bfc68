#include "charax/diagnostics.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "charax/error.hpp"

namespace charax {

namespace {

using Field = std::optional<double> DiagnosticsRow::*;

// Column order after run_id and t.
constexpr std::array<std::pair<std::string_view, Field>, 12> kColumns{{
    {"linf_u", &DiagnosticsRow::linf_u},
    {"min_theta", &DiagnosticsRow::min_theta},
    {"mass_u", &DiagnosticsRow::mass_u},
    {"mass_theta", &DiagnosticsRow::mass_theta},
    {"lp1", &DiagnosticsRow::lp1},
    {"lp2", &DiagnosticsRow::lp2},
    {"lp4", &DiagnosticsRow::lp4},
    {"lpinf", &DiagnosticsRow::lpinf},
    {"bv_deriv", &DiagnosticsRow::bv_deriv},
    {"energy_residual", &DiagnosticsRow::energy_residual},
    {"alpha_margin_lo", &DiagnosticsRow::alpha_margin_lo},
    {"alpha_margin_hi", &DiagnosticsRow::alpha_margin_hi},
}};

double parse_number(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error("cannot parse number '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out.flush()) throw Error("write failed for " + path.string());
}

}  // namespace

double lp_norm(const GridFunction& f, double p) {
  if (!(p >= 1.0)) throw DomainError("lp_norm needs p >= 1");
  if (std::isinf(p)) return f.max_abs();
  std::vector<double> terms(f.size());
  for (std::size_t j = 0; j < terms.size(); ++j) terms[j] = std::pow(std::abs(f[j]), p);
  return std::pow(compensated_sum(terms) * f.grid().dx(), 1.0 / p);
}

double lp_norm(const GridFunction2D& f, double p) {
  if (!(p >= 1.0)) throw DomainError("lp_norm needs p >= 1");
  if (std::isinf(p)) return f.max_abs();
  std::vector<double> terms(f.size());
  for (std::size_t k = 0; k < terms.size(); ++k) {
    terms[k] = std::pow(std::abs(f.values()[k]), p);
  }
  return std::pow(compensated_sum(terms) * f.grid().cell_area(), 1.0 / p);
}

std::vector<double> ScalingTable::ratios() const {
  std::vector<double> r;
  for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
    r.push_back(rows[k + 1].product / rows[k].product);
  }
  return r;
}

bool ScalingTable::bounded(double lo, double hi) const {
  for (double r : ratios()) {
    if (!(r >= lo && r <= hi)) return false;
  }
  return true;
}

void DiagnosticsReport::validate() const {
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const DiagnosticsRow& row = rows[k];
    if (!std::isfinite(row.t)) throw Error("report: non-finite t");
    if (k > 0 && !(row.t > rows[k - 1].t)) {
      throw Error("report: t-stamps are not strictly increasing");
    }
    for (const auto& [name, field] : kColumns) {
      if ((row.*field) && !std::isfinite(*(row.*field))) {
        throw Error("report: non-finite " + std::string(name));
      }
    }
  }
  for (const ScalingTable& table : scaling) {
    for (const ScalingRow& r : table.rows) {
      if (!std::isfinite(r.eps) || !std::isfinite(r.sup_grad) ||
          !std::isfinite(r.product)) {
        throw Error("report: non-finite scaling entry");
      }
    }
  }
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw Error("format_number failed");
  return std::string(buf.data(), ptr);
}

std::string to_csv(const DiagnosticsReport& report) {
  report.validate();
  std::string out(kCsvHeader);
  out += '\n';
  for (const DiagnosticsRow& row : report.rows) {
    out += report.run_id;
    out += ',';
    out += format_number(row.t);
    for (const auto& [name, field] : kColumns) {
      out += ',';
      if (row.*field) out += format_number(*(row.*field));
    }
    out += '\n';
  }
  return out;
}

DiagnosticsReport report_from_csv(std::string_view text) {
  DiagnosticsReport report;
  bool header_seen = false;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kCsvHeader) throw Error("CSV header does not match the schema");
      header_seen = true;
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != kColumns.size() + 2) throw Error("CSV row has wrong arity");
    report.run_id = std::string(cells[0]);
    DiagnosticsRow row;
    row.t = parse_number(cells[1]);
    for (std::size_t c = 0; c < kColumns.size(); ++c) {
      if (!cells[c + 2].empty()) row.*(kColumns[c].second) = parse_number(cells[c + 2]);
    }
    report.rows.push_back(row);
  }
  if (!header_seen) throw Error("CSV is empty");
  return report;
}

nlohmann::json to_json(const DiagnosticsReport& report) {
  report.validate();
  nlohmann::json j;
  j["run_id"] = report.run_id;
  j["config"] = report.config;
  nlohmann::json series = nlohmann::json::array();
  for (const DiagnosticsRow& row : report.rows) {
    nlohmann::json r;
    r["t"] = row.t;
    for (const auto& [name, field] : kColumns) {
      r[std::string(name)] = (row.*field) ? nlohmann::json(*(row.*field)) : nlohmann::json();
    }
    series.push_back(std::move(r));
  }
  j["series"] = std::move(series);
  nlohmann::json tables = nlohmann::json::array();
  for (const ScalingTable& table : report.scaling) {
    nlohmann::json rows = nlohmann::json::array();
    for (const ScalingRow& r : table.rows) {
      rows.push_back({{"eps", r.eps}, {"sup_grad", r.sup_grad}, {"product", r.product}});
    }
    tables.push_back({{"name", table.name}, {"rows", std::move(rows)}});
  }
  j["scaling_tables"] = std::move(tables);
  return j;
}

DiagnosticsReport report_from_json(const nlohmann::json& j) {
  DiagnosticsReport report;
  report.run_id = j.at("run_id").get<std::string>();
  report.config = j.value("config", nlohmann::json::object());
  for (const auto& r : j.at("series")) {
    DiagnosticsRow row;
    row.t = r.at("t").get<double>();
    for (const auto& [name, field] : kColumns) {
      const auto it = r.find(std::string(name));
      if (it != r.end() && !it->is_null()) row.*field = it->get<double>();
    }
    report.rows.push_back(row);
  }
  for (const auto& t : j.value("scaling_tables", nlohmann::json::array())) {
    ScalingTable table;
    table.name = t.at("name").get<std::string>();
    for (const auto& r : t.at("rows")) {
      table.rows.push_back({r.at("eps").get<double>(), r.at("sup_grad").get<double>(),
                            r.at("product").get<double>()});
    }
    report.scaling.push_back(std::move(table));
  }
  return report;
}

void write_csv(const DiagnosticsReport& report, const std::filesystem::path& path) {
  write_file(path, to_csv(report));
}

void write_json(const DiagnosticsReport& report, const std::filesystem::path& path) {
  write_file(path, to_json(report).dump(2) + "\n");
}

DiagnosticsReport read_csv(const std::filesystem::path& path) {
  return report_from_csv(read_file(path));
}

DiagnosticsReport read_json(const std::filesystem::path& path) {
  return report_from_json(nlohmann::json::parse(read_file(path)));
}

std::string scaling_to_csv(const ScalingTable& table) {
  std::string out = "eps,sup_grad,product\n";
  for (const ScalingRow& r : table.rows) {
    out += format_number(r.eps) + ',' + format_number(r.sup_grad) + ',' +
           format_number(r.product) + '\n';
  }
  return out;
}

}  // namespace charax
