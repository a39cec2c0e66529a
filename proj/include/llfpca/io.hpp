#pragma once

#include <Eigen/Core>
#include <fstream>
#include <json.hpp>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "fpca.hpp"
#include "ratestudy.hpp"
#include "smooth1d.hpp"
#include "smooth2d.hpp"

// File writers/readers. All floating-point text uses shortest round-trip
// formatting so identical inputs give byte-identical files.

namespace llfpca {

using ordered_json = nlohmann::ordered_json;

namespace detail {

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // no platform newline translation
  if (!out) throw IoError("cannot write " + path);
  return out;
}

inline nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("invalid JSON in " + path + ": " + e.what());
  }
  return j;
}

inline void dump_json(const ordered_json& j, const std::string& path) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace detail

// --- two-column curve files (t, value) ------------------------------------

inline void write_curve_csv(const std::string& path, const std::string& value_header,
                            const std::vector<double>& points,
                            const std::vector<double>& values) {
  if (points.size() != values.size()) throw LengthMismatch(points.size(), values.size());
  auto out = detail::open_out(path);
  out << "t," << value_header << '\n';
  for (std::size_t g = 0; g < points.size(); ++g)
    out << format_double(points[g]) << ',' << format_double(values[g]) << '\n';
  if (!out) throw IoError("write failed for " + path);
}

inline std::pair<std::vector<double>, std::vector<double>> read_curve_csv(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw EmptyFile(path);
  std::vector<double> ts, vs;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) throw MalformedRow(lineno, "expected 2 fields");
    ts.push_back(detail::parse_number(std::string_view(line).substr(0, comma), lineno));
    vs.push_back(detail::parse_number(std::string_view(line).substr(comma + 1), lineno));
  }
  return {std::move(ts), std::move(vs)};
}

inline void write_mean_json(const std::string& path, const MeanEstimate& est) {
  ordered_json j;
  j["grid"] = est.grid.points();
  j["values"] = est.values;
  j["bandwidth"] = est.bandwidth;
  detail::dump_json(j, path);
}

// --- surface files ----------------------------------------------------------

// Matrix CSV: corner cell "st", header row of grid points, then one row per
// grid point with the leading point value.
inline void write_surface_csv(const std::string& path, const EvaluationGrid& grid,
                              const Eigen::MatrixXd& values) {
  auto out = detail::open_out(path);
  out << "st";
  for (double t : grid.points()) out << ',' << format_double(t);
  out << '\n';
  for (std::size_t a = 0; a < grid.size(); ++a) {
    out << format_double(grid.points()[a]);
    for (std::size_t b = 0; b < grid.size(); ++b)
      out << ','
          << format_double(values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

inline std::pair<std::vector<double>, Eigen::MatrixXd> read_surface_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw EmptyFile(path);
  std::vector<double> pts;
  {
    std::string_view row(line);
    auto comma = row.find(',');
    std::size_t start = comma == std::string_view::npos ? row.size() : comma + 1;
    while (start < row.size()) {
      auto next = row.find(',', start);
      auto end = next == std::string_view::npos ? row.size() : next;
      pts.push_back(detail::parse_number(row.substr(start, end - start), 1));
      start = end + 1;
    }
  }
  Eigen::MatrixXd values(pts.size(), pts.size());
  std::size_t lineno = 1, r = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (r >= pts.size()) throw MalformedRow(lineno, "more rows than header columns");
    std::string_view row(line);
    std::size_t start = 0, col = 0;
    bool lead = true;
    while (start <= row.size()) {
      auto next = row.find(',', start);
      auto end = next == std::string_view::npos ? row.size() : next;
      double v = detail::parse_number(row.substr(start, end - start), lineno);
      if (lead) {
        lead = false;
      } else {
        if (col >= pts.size()) throw MalformedRow(lineno, "too many columns");
        values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col++)) = v;
      }
      if (next == std::string_view::npos) break;
      start = next + 1;
    }
    if (col != pts.size()) throw MalformedRow(lineno, "too few columns");
    ++r;
  }
  if (r != pts.size()) throw IoError("surface row count mismatch in " + path);
  return {std::move(pts), std::move(values)};
}

inline ordered_json surface_to_json(const EvaluationGrid& grid, const Eigen::MatrixXd& values) {
  ordered_json j;
  j["grid"] = grid.points();
  ordered_json rows = ordered_json::array();
  for (std::size_t a = 0; a < grid.size(); ++a) {
    ordered_json row = ordered_json::array();
    for (std::size_t b = 0; b < grid.size(); ++b)
      row.push_back(values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
    rows.push_back(std::move(row));
  }
  j["values"] = std::move(rows);
  return j;
}

// --- eigen system files -----------------------------------------------------

inline void write_eigensystem_json(const std::string& path, const EigenSystem& eig) {
  ordered_json j;
  j["eigenvalues"] = eig.eigenvalues;
  j["grid"] = eig.grid.points();
  ordered_json funcs = ordered_json::array();
  for (const Eigen::VectorXd& psi : eig.eigenfunctions) {
    ordered_json f = ordered_json::array();
    for (Eigen::Index g = 0; g < psi.size(); ++g) f.push_back(psi[g]);
    funcs.push_back(std::move(f));
  }
  j["eigenfunctions"] = std::move(funcs);
  detail::dump_json(j, path);
}

// One column per retained component.
inline void write_eigensystem_csv(const std::string& path, const EigenSystem& eig) {
  auto out = detail::open_out(path);
  out << "t";
  for (std::size_t j = 0; j < eig.retained(); ++j) out << ",psi" << (j + 1);
  out << '\n';
  for (std::size_t g = 0; g < eig.grid.size(); ++g) {
    out << format_double(eig.grid.points()[g]);
    for (std::size_t j = 0; j < eig.retained(); ++j)
      out << ',' << format_double(eig.eigenfunctions[j][static_cast<Eigen::Index>(g)]);
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

// --- rate study files ---------------------------------------------------------

inline ordered_json rate_report_to_json(const RateStudyReport& report) {
  ordered_json j;
  j["scenario"] = report.scenario;
  j["slope"] = report.slope;
  j["slope_se"] = report.slope_se;
  if (report.theoretical_known)
    j["theoretical_exponent"] = report.theoretical;
  else
    j["theoretical_exponent"] = "unknown";
  ordered_json pts = ordered_json::array();
  for (const RatePoint& p : report.points) {
    ordered_json pj;
    pj["n"] = p.n;
    pj["mean_error"] = p.mean_error;
    pj["sd_error"] = p.sd_error;
    pj["failures"] = p.failures;
    pts.push_back(std::move(pj));
  }
  j["points"] = std::move(pts);
  return j;
}

inline void write_rate_report_csv(const std::string& path, const RateStudyReport& report) {
  auto out = detail::open_out(path);
  out << "n,mean_error,sd_error,failures\n";
  for (const RatePoint& p : report.points)
    out << p.n << ',' << format_double(p.mean_error) << ',' << format_double(p.sd_error) << ','
        << p.failures << '\n';
  if (!out) throw IoError("write failed for " + path);
}

// --- band / box summary files ---------------------------------------------

inline void write_band_csv(const std::string& path, const std::vector<double>& points,
                           const std::vector<double>& mean, const std::vector<double>& p01,
                           const std::vector<double>& p99) {
  auto out = detail::open_out(path);
  out << "t,mean,p01,p99\n";
  for (std::size_t g = 0; g < points.size(); ++g)
    out << format_double(points[g]) << ',' << format_double(mean[g]) << ','
        << format_double(p01[g]) << ',' << format_double(p99[g]) << '\n';
  if (!out) throw IoError("write failed for " + path);
}

struct BoxSummaryRow {
  std::string label;
  double median = 0.0, q1 = 0.0, q3 = 0.0, p01 = 0.0, p99 = 0.0;
};

inline void write_box_summary_csv(const std::string& path,
                                  const std::vector<BoxSummaryRow>& rows) {
  auto out = detail::open_out(path);
  out << "stat,median,q1,q3,p01,p99\n";
  for (const BoxSummaryRow& r : rows)
    out << r.label << ',' << format_double(r.median) << ',' << format_double(r.q1) << ','
        << format_double(r.q3) << ',' << format_double(r.p01) << ',' << format_double(r.p99)
        << '\n';
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace llfpca
