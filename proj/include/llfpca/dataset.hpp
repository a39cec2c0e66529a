#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace llfpca {

struct Interval {
  double a = 0.0;
  double b = 1.0;
  double length() const { return b - a; }
};

// One sampled point (T_ij, Y_ij) of a latent curve.
struct Observation {
  double time = 0.0;
  double value = 0.0;
};

struct Curve {
  std::string id;
  std::vector<Observation> observations;

  std::size_t m() const { return observations.size(); }
  // Number of ordered within-curve pairs, m_i (m_i - 1).
  std::size_t pair_count() const { return m() * (m() - 1); }
};

// Immutable collection of irregularly sampled curves on a common domain.
class FunctionalDataset {
 public:
  FunctionalDataset(Interval domain, std::vector<Curve> curves)
      : domain_(domain), curves_(std::move(curves)) {
    if (!(domain_.a < domain_.b)) throw InvalidDataset("domain must satisfy a < b");
    if (curves_.empty()) throw InvalidDataset("dataset needs at least one curve");
    for (const Curve& c : curves_) {
      if (c.observations.empty())
        throw InvalidDataset("curve '" + c.id + "' has no observations");
      for (const Observation& o : c.observations) {
        if (!std::isfinite(o.time) || !std::isfinite(o.value))
          throw InvalidDataset("non-finite observation in curve '" + c.id + "'");
        if (o.time < domain_.a || o.time > domain_.b)
          throw InvalidDataset("time outside domain in curve '" + c.id + "'");
      }
    }
  }

  const Interval& domain() const { return domain_; }
  const std::vector<Curve>& curves() const { return curves_; }
  std::size_t curve_count() const { return curves_.size(); }

  std::size_t total_observations() const {
    std::size_t total = 0;
    for (const Curve& c : curves_) total += c.m();
    return total;
  }

  // Curves with at least two observations (the only ones contributing
  // within-curve pairs).
  std::size_t pairable_curve_count() const {
    std::size_t total = 0;
    for (const Curve& c : curves_) total += c.m() >= 2 ? 1 : 0;
    return total;
  }

 private:
  Interval domain_;
  std::vector<Curve> curves_;
};

// Discretization support: evaluation points plus quadrature weights whose sum
// equals the domain length.
class EvaluationGrid {
 public:
  EvaluationGrid(Interval domain, std::vector<double> points, std::vector<double> weights)
      : domain_(domain), points_(std::move(points)), weights_(std::move(weights)) {
    if (points_.size() < 2) throw InvalidGridSize(static_cast<long>(points_.size()));
    if (points_.size() != weights_.size())
      throw InvalidGrid("points and weights must have equal length");
    if (points_.front() != domain_.a || points_.back() != domain_.b)
      throw InvalidGrid("grid must span the domain endpoints");
    double wsum = 0.0;
    for (std::size_t g = 0; g < points_.size(); ++g) {
      if (g > 0 && !(points_[g] > points_[g - 1]))
        throw InvalidGrid("grid points must be strictly increasing");
      if (weights_[g] < 0.0) throw InvalidGrid("quadrature weights must be nonnegative");
      wsum += weights_[g];
    }
    if (std::abs(wsum - domain_.length()) > 1e-8 * std::max(1.0, domain_.length()))
      throw InvalidGrid("quadrature weights must sum to the domain length");
  }

  const Interval& domain() const { return domain_; }
  const std::vector<double>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return points_.size(); }

  bool same_points(const EvaluationGrid& other) const {
    return points_ == other.points_ && weights_ == other.weights_;
  }

 private:
  Interval domain_;
  std::vector<double> points_;
  std::vector<double> weights_;
};

// G equally spaced points with trapezoid weights (d/2, d, ..., d, d/2).
inline EvaluationGrid make_grid(Interval domain, int G) {
  if (G < 2) throw InvalidGridSize(G);
  std::vector<double> pts(static_cast<std::size_t>(G));
  std::vector<double> w(static_cast<std::size_t>(G));
  double d = domain.length() / (G - 1);
  for (int g = 0; g < G; ++g) {
    pts[static_cast<std::size_t>(g)] = domain.a + d * g;
    w[static_cast<std::size_t>(g)] = (g == 0 || g == G - 1) ? d / 2.0 : d;
  }
  pts.front() = domain.a;
  pts.back() = domain.b;
  return EvaluationGrid(domain, std::move(pts), std::move(w));
}

// gamma_nk = (n^{-1} sum_i m_i^{-k})^{-1}, the k-th order harmonic mean of the
// per-curve observation counts.
inline double harmonic_mean(const std::vector<std::size_t>& counts, int k) {
  if (k < 1) throw InvalidDataset("harmonic mean order must be >= 1");
  if (counts.empty()) throw InvalidDataset("harmonic mean needs at least one count");
  double acc = 0.0;
  for (std::size_t m : counts) {
    if (m == 0) throw InvalidDataset("observation counts must be positive");
    acc += std::pow(static_cast<double>(m), -static_cast<double>(k));
  }
  return static_cast<double>(counts.size()) / acc;
}

inline double harmonic_mean(const FunctionalDataset& ds, int k) {
  std::vector<std::size_t> counts;
  counts.reserve(ds.curve_count());
  for (const Curve& c : ds.curves()) counts.push_back(c.m());
  return harmonic_mean(counts, k);
}

namespace detail {

inline double parse_number(std::string_view field, std::size_t line) {
  // Trim surrounding whitespace; from_chars wants a tight token.
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t'))
    field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
    field.remove_suffix(1);
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw MalformedRow(line, "expected a number, got '" + std::string(field) + "'");
  return out;
}

}  // namespace detail

// Reads `curve_id,t,y` rows (header line required); groups rows by curve id
// preserving file order. When no domain is given, uses [min t, max t].
inline FunctionalDataset load_csv(const std::string& path,
                                  std::optional<Interval> domain = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw EmptyFile(path);

  std::vector<Curve> curves;
  std::size_t lineno = 1;
  double tmin = std::numeric_limits<double>::infinity();
  double tmax = -std::numeric_limits<double>::infinity();

  auto find_curve = [&](const std::string& id) -> Curve& {
    for (auto it = curves.rbegin(); it != curves.rend(); ++it)
      if (it->id == id) return *it;
    curves.push_back(Curve{id, {}});
    return curves.back();
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::string_view row(line);
    auto c1 = row.find(',');
    auto c2 = c1 == std::string_view::npos ? std::string_view::npos : row.find(',', c1 + 1);
    if (c1 == std::string_view::npos || c2 == std::string_view::npos)
      throw MalformedRow(lineno, "expected 3 comma-separated fields");
    if (row.find(',', c2 + 1) != std::string_view::npos)
      throw MalformedRow(lineno, "expected 3 comma-separated fields");
    std::string id(row.substr(0, c1));
    double t = detail::parse_number(row.substr(c1 + 1, c2 - c1 - 1), lineno);
    double y = detail::parse_number(row.substr(c2 + 1), lineno);
    if (!std::isfinite(t) || !std::isfinite(y))
      throw MalformedRow(lineno, "non-finite value");
    if (domain && (t < domain->a || t > domain->b)) throw TimeOutOfDomain(lineno, t);
    find_curve(id).observations.push_back({t, y});
    tmin = std::min(tmin, t);
    tmax = std::max(tmax, t);
  }
  if (curves.empty()) throw EmptyFile(path);

  Interval dom = domain ? *domain : Interval{tmin, tmax};
  return FunctionalDataset(dom, std::move(curves));
}

// Shortest round-trip decimal rendering of a double.
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline void save_csv(const FunctionalDataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "curve_id,t,y\n";
  for (const Curve& c : ds.curves())
    for (const Observation& o : c.observations)
      out << c.id << ',' << format_double(o.time) << ',' << format_double(o.value) << '\n';
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace llfpca
