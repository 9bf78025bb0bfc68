#pragma once

// Norms, run reports and their CSV/JSON serialisation.
//
// CSV schema (header is fixed):
//   run_id,t,linf_u,min_theta,mass_u,mass_theta,lp1,lp2,lp4,lpinf,bv_deriv,
//   energy_residual,alpha_margin_lo,alpha_margin_hi
// Quantities a solver does not produce are written as empty fields. Numbers use
// the shortest decimal form that round-trips.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "charax/grid.hpp"

namespace charax {

/// (sum |f|^p dx)^(1/p); max |f| for p = infinity. Throws DomainError if p < 1.
double lp_norm(const GridFunction& f, double p);
double lp_norm(const GridFunction2D& f, double p);

struct DiagnosticsRow {
  double t = 0.0;
  std::optional<double> linf_u;
  std::optional<double> min_theta;
  std::optional<double> mass_u;
  std::optional<double> mass_theta;
  std::optional<double> lp1;
  std::optional<double> lp2;
  std::optional<double> lp4;
  std::optional<double> lpinf;
  std::optional<double> bv_deriv;
  std::optional<double> energy_residual;
  std::optional<double> alpha_margin_lo;
  std::optional<double> alpha_margin_hi;

  friend bool operator==(const DiagnosticsRow&, const DiagnosticsRow&) = default;
};

struct ScalingRow {
  double eps;
  double sup_grad;  // sup over t of |u_x|_inf
  double product;   // eps * sup_grad

  friend bool operator==(const ScalingRow&, const ScalingRow&) = default;
};

struct ScalingTable {
  std::string name;
  std::vector<ScalingRow> rows;

  /// product[k+1] / product[k] for consecutive rows.
  std::vector<double> ratios() const;
  /// Every ratio within [lo, hi].
  bool bounded(double lo = 0.5, double hi = 2.0) const;

  friend bool operator==(const ScalingTable&, const ScalingTable&) = default;
};

struct DiagnosticsReport {
  std::string run_id;
  nlohmann::json config = nlohmann::json::object();
  std::vector<DiagnosticsRow> rows;
  std::vector<ScalingTable> scaling;

  /// Throws Error unless t-stamps are strictly increasing and every entry is
  /// finite.
  void validate() const;
};

inline constexpr std::string_view kCsvHeader =
    "run_id,t,linf_u,min_theta,mass_u,mass_theta,lp1,lp2,lp4,lpinf,bv_deriv,"
    "energy_residual,alpha_margin_lo,alpha_margin_hi";

/// Shortest round-trip decimal representation.
std::string format_number(double v);

std::string to_csv(const DiagnosticsReport& report);
nlohmann::json to_json(const DiagnosticsReport& report);
DiagnosticsReport report_from_csv(std::string_view text);
DiagnosticsReport report_from_json(const nlohmann::json& j);

void write_csv(const DiagnosticsReport& report, const std::filesystem::path& path);
void write_json(const DiagnosticsReport& report, const std::filesystem::path& path);
DiagnosticsReport read_csv(const std::filesystem::path& path);
DiagnosticsReport read_json(const std::filesystem::path& path);

/// eps,sup_grad,product
std::string scaling_to_csv(const ScalingTable& table);

}  // namespace charax
