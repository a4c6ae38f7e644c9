#pragma once

#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dsw/energy.hpp"
#include "dsw/experiments.hpp"

namespace dsw {

inline constexpr int kSeriesSchemaVersion = 1;

/// Full-precision decimal form: 17 significant digits round-trip an IEEE
/// double exactly.
inline std::string format_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

/// One row per sample: t, then E0/E1/E/f/e0/e1 per tracked index (headers
/// suffixed _i<order>_t<time order>), then F and the run-level monitors.
inline void emit_series(const std::vector<EnergyReport>& series, std::ostream& out) {
  out << "# schema_version " << kSeriesSchemaVersion << " kind energy_series\n";
  out << "t";
  if (!series.empty()) {
    for (const auto& e : series.front().entries) {
      std::string suffix =
          "_i" + std::to_string(e.order) + "_t" + std::to_string(e.time_order);
      out << ",E0" << suffix << ",E1" << suffix << ",E" << suffix << ",f" << suffix
          << ",e0" << suffix << ",e1" << suffix;
    }
  }
  out << ",F,identity_residual,sup_phi_t,sup_grad,min_denominator,min_determinant_factor\n";
  for (const auto& r : series) {
    out << format_full(r.t);
    for (const auto& e : r.entries)
      out << ',' << format_full(e.E0) << ',' << format_full(e.E1) << ','
          << format_full(e.E) << ',' << format_full(e.f) << ',' << format_full(e.e0)
          << ',' << format_full(e.e1);
    out << ',' << format_full(r.F) << ',' << format_full(r.identity_residual) << ','
        << format_full(r.sup_phi_t) << ',' << format_full(r.sup_grad) << ','
        << format_full(r.min_denominator) << ',' << format_full(r.min_determinant_factor)
        << '\n';
  }
}

/// Parse a file produced by emit_series back into rows of doubles
/// (comment lines skipped, header names returned separately).
struct SeriesTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

inline SeriesTable parse_series(std::istream& in) {
  SeriesTable table;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    if (!header_seen) {
      while (std::getline(ss, cell, ',')) table.columns.push_back(cell);
      header_seen = true;
      continue;
    }
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline void emit_sweep(const std::vector<SweepRecord>& records,
                       const std::optional<FitResult>& fit, std::ostream& out) {
  out << "# schema_version " << kSeriesSchemaVersion << " kind sweep_table\n";
  if (fit)
    out << "# fit slope " << format_full(fit->slope) << " intercept "
        << format_full(fit->intercept) << " records_used " << fit->records_used << "\n";
  else
    out << "# fit absent (fewer than 3 uncensored records)\n";
  out << "eps,alpha,lifespan_estimate,censored,criterion,h,dt_max\n";
  for (const auto& r : records) {
    out << format_full(r.eps) << ',' << format_full(r.alpha) << ','
        << format_full(r.lifespan_estimate) << ',' << (r.censored ? 1 : 0) << ','
        << (r.criterion ? criterion_name(*r.criterion) : "none") << ','
        << format_full(r.h) << ',' << format_full(r.dt_max) << '\n';
  }
}

} // namespace dsw
