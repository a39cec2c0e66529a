#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "fpca.hpp"
#include "rng.hpp"

namespace llfpca {

// Karhunen-Loeve model: X(t) = mean(t) + sum_k xi_k psi_k(t), xi_k ~ N(0, omega_k),
// observed with independent N(0, sigma2) noise.
struct KLComponent {
  double omega = 0.0;
  std::function<double(double)> psi;
};

struct KLModelSpec {
  std::function<double(double)> mean_fn;
  std::vector<KLComponent> components;
  double sigma2 = 0.0;
  Interval domain{0.0, 1.0};
};

// Standard Brownian motion on [0,1] observed with noise; R(s,t) = min(s,t).
struct BrownianModel {
  double sigma2 = 0.01;
};

// Sampling design: number of curves and the rule for per-curve counts m_i.
// Times are drawn i.i.d. uniform on the model domain.
struct DesignSpec {
  enum class MRule { Fixed, PerCurve, RandomRange };

  int n = 0;
  MRule m_rule = MRule::Fixed;
  int m_fixed = 0;
  std::vector<int> m_per_curve;
  int m_lo = 2, m_hi = 2;

  static DesignSpec fixed(int n, int m) { return {n, MRule::Fixed, m, {}, 0, 0}; }
  static DesignSpec per_curve(std::vector<int> ms) {
    DesignSpec d{static_cast<int>(ms.size()), MRule::PerCurve, 0, std::move(ms), 0, 0};
    return d;
  }
  static DesignSpec random_range(int n, int lo, int hi) {
    return {n, MRule::RandomRange, 0, {}, lo, hi};
  }
};

inline void validate_kl_spec(const KLModelSpec& spec) {
  if (!spec.mean_fn) throw InvalidModelSpec("mean function missing");
  if (spec.sigma2 < 0.0) throw InvalidModelSpec("noise variance must be nonnegative");
  if (!(spec.domain.a < spec.domain.b)) throw InvalidModelSpec("domain must satisfy a < b");
  for (std::size_t k = 0; k < spec.components.size(); ++k) {
    if (!(spec.components[k].omega > 0.0))
      throw InvalidModelSpec("component variances must be positive");
    if (k > 0 && spec.components[k].omega > spec.components[k - 1].omega)
      throw InvalidModelSpec("component variances must be nonincreasing");
    if (!spec.components[k].psi) throw InvalidModelSpec("component function missing");
  }
  // Numerical orthonormality of the component functions (trapezoid quadrature).
  const int G = 1001;
  double d = spec.domain.length() / (G - 1);
  for (std::size_t j = 0; j < spec.components.size(); ++j)
    for (std::size_t k = j; k < spec.components.size(); ++k) {
      double acc = 0.0;
      for (int g = 0; g < G; ++g) {
        double t = spec.domain.a + d * g;
        double w = (g == 0 || g == G - 1) ? d / 2.0 : d;
        acc += w * spec.components[j].psi(t) * spec.components[k].psi(t);
      }
      double target = j == k ? 1.0 : 0.0;
      if (std::abs(acc - target) > 1e-3)
        throw InvalidModelSpec("component functions are not orthonormal in L2");
    }
}

// Three-component model on [0,1]: quadratic mean 5(t-0.6)^2; constant, sine
// and cosine components with variances (0.6, 0.3, 0.1); noise variance 0.2.
inline KLModelSpec simulation1_spec() {
  using std::numbers::pi;
  KLModelSpec spec;
  spec.domain = {0.0, 1.0};
  spec.sigma2 = 0.2;
  spec.mean_fn = [](double t) { return 5.0 * (t - 0.6) * (t - 0.6); };
  spec.components = {
      {0.6, [](double) { return 1.0; }},
      {0.3, [](double t) { return std::sqrt(2.0) * std::sin(2.0 * pi * t); }},
      {0.1, [](double t) { return std::sqrt(2.0) * std::cos(2.0 * pi * t); }},
  };
  return spec;
}

namespace detail {

inline int draw_m(const DesignSpec& design, int curve_index, CounterRng& rng) {
  switch (design.m_rule) {
    case DesignSpec::MRule::Fixed:
      return design.m_fixed;
    case DesignSpec::MRule::PerCurve:
      return design.m_per_curve[static_cast<std::size_t>(curve_index)];
    case DesignSpec::MRule::RandomRange:
      return static_cast<int>(rng.uniform_int(design.m_lo, design.m_hi));
  }
  return 0;
}

}  // namespace detail

// Deterministic under seed; curve i draws from an independent substream, so
// generation order (and parallel generation) cannot change the output.
// Per-curve draw order: m_i (if random), times, component scores, noise.
inline FunctionalDataset generate_kl(const KLModelSpec& spec, const DesignSpec& design,
                                     Seed seed) {
  validate_kl_spec(spec);
  if (design.n < 1) throw InvalidModelSpec("design needs n >= 1");
  CounterRng root(seed);
  std::vector<Curve> curves;
  curves.reserve(static_cast<std::size_t>(design.n));
  double noise_sd = std::sqrt(spec.sigma2);
  for (int i = 0; i < design.n; ++i) {
    CounterRng rng = root.split(static_cast<std::uint64_t>(i));
    int m = detail::draw_m(design, i, rng);
    if (m < 1) throw InvalidModelSpec("design produced m_i < 1");
    Curve c;
    c.id = "c" + std::to_string(i + 1);
    c.observations.resize(static_cast<std::size_t>(m));
    for (auto& o : c.observations) o.time = rng.uniform(spec.domain.a, spec.domain.b);
    std::vector<double> scores(spec.components.size());
    for (std::size_t k = 0; k < scores.size(); ++k)
      scores[k] = rng.normal(0.0, std::sqrt(spec.components[k].omega));
    for (auto& o : c.observations) {
      double x = spec.mean_fn(o.time);
      for (std::size_t k = 0; k < scores.size(); ++k)
        x += scores[k] * spec.components[k].psi(o.time);
      o.value = x + rng.normal(0.0, noise_sd);
    }
    curves.push_back(std::move(c));
  }
  return FunctionalDataset(spec.domain, std::move(curves));
}

// Brownian path values at arbitrary (possibly unsorted) times: increments are
// generated in time order with variances equal to the gaps, then mapped back
// to the input order.
inline std::vector<double> sample_brownian_at(const std::vector<double>& times, CounterRng& rng) {
  std::vector<std::size_t> order(times.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&times](std::size_t a, std::size_t b) { return times[a] < times[b]; });
  std::vector<double> values(times.size());
  double prev_t = 0.0, x = 0.0;
  for (std::size_t idx : order) {
    x += rng.normal(0.0, std::sqrt(times[idx] - prev_t));
    prev_t = times[idx];
    values[idx] = x;
  }
  return values;
}

// Noisy Brownian curves on [0,1]. Per-curve draw order: m_i (if random),
// times, path increments (in time order), then observation noise.
inline FunctionalDataset generate_brownian(const DesignSpec& design, double sigma2, Seed seed) {
  if (design.n < 1) throw InvalidModelSpec("design needs n >= 1");
  if (sigma2 < 0.0) throw InvalidModelSpec("noise variance must be nonnegative");
  CounterRng root(seed);
  std::vector<Curve> curves;
  curves.reserve(static_cast<std::size_t>(design.n));
  double noise_sd = std::sqrt(sigma2);
  for (int i = 0; i < design.n; ++i) {
    CounterRng rng = root.split(static_cast<std::uint64_t>(i));
    int m = detail::draw_m(design, i, rng);
    if (m < 1) throw InvalidModelSpec("design produced m_i < 1");
    std::vector<double> times(static_cast<std::size_t>(m));
    for (double& t : times) t = rng.uniform(0.0, 1.0);
    std::vector<double> values = sample_brownian_at(times, rng);
    Curve c;
    c.id = "c" + std::to_string(i + 1);
    c.observations.resize(times.size());
    for (std::size_t j = 0; j < times.size(); ++j)
      c.observations[j] = {times[j], values[j] + rng.normal(0.0, noise_sd)};
    curves.push_back(std::move(c));
  }
  return FunctionalDataset(Interval{0.0, 1.0}, std::move(curves));
}

// Analytic eigenvalues and grid-sampled component functions of a KL model.
inline ModelEigenSystem true_eigensystem(const KLModelSpec& spec, const EvaluationGrid& grid,
                                         int J) {
  if (J < 1 || static_cast<std::size_t>(J) > spec.components.size())
    throw TooManyComponents(J, spec.components.size());
  ModelEigenSystem out;
  for (int j = 0; j < J; ++j) {
    const KLComponent& comp = spec.components[static_cast<std::size_t>(j)];
    out.eigenvalues.push_back(comp.omega);
    Eigen::VectorXd psi(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t g = 0; g < grid.size(); ++g)
      psi[static_cast<Eigen::Index>(g)] = comp.psi(grid.points()[g]);
    out.eigenfunctions.push_back(std::move(psi));
  }
  return out;
}

// Brownian covariance min(s,t): omega_k = 4 / ((2k-1)^2 pi^2),
// psi_k(t) = sqrt(2) sin((k - 1/2) pi t).
inline ModelEigenSystem true_eigensystem(const BrownianModel&, const EvaluationGrid& grid,
                                         int J) {
  using std::numbers::pi;
  if (J < 1) throw TooManyComponents(J, 0);
  ModelEigenSystem out;
  for (int j = 1; j <= J; ++j) {
    double freq = (j - 0.5) * pi;
    out.eigenvalues.push_back(4.0 / ((2.0 * j - 1.0) * (2.0 * j - 1.0) * pi * pi));
    Eigen::VectorXd psi(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t g = 0; g < grid.size(); ++g)
      psi[static_cast<Eigen::Index>(g)] = std::sqrt(2.0) * std::sin(freq * grid.points()[g]);
    out.eigenfunctions.push_back(std::move(psi));
  }
  return out;
}

// Exact covariance surface min(s,t) sampled on the grid.
inline Eigen::MatrixXd brownian_covariance_matrix(const EvaluationGrid& grid) {
  const auto G = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd out(G, G);
  for (Eigen::Index a = 0; a < G; ++a)
    for (Eigen::Index b = 0; b < G; ++b)
      out(a, b) = std::min(grid.points()[static_cast<std::size_t>(a)],
                           grid.points()[static_cast<std::size_t>(b)]);
  return out;
}

// Noise-free curves evaluated exactly at the grid points (one row per curve):
// the dense-sampling arm where estimation bypasses kernel smoothing.
inline Eigen::MatrixXd generate_kl_dense(const KLModelSpec& spec, int n,
                                         const EvaluationGrid& grid, Seed seed) {
  validate_kl_spec(spec);
  CounterRng root(seed);
  Eigen::MatrixXd out(n, static_cast<Eigen::Index>(grid.size()));
  for (int i = 0; i < n; ++i) {
    CounterRng rng = root.split(static_cast<std::uint64_t>(i));
    std::vector<double> scores(spec.components.size());
    for (std::size_t k = 0; k < scores.size(); ++k)
      scores[k] = rng.normal(0.0, std::sqrt(spec.components[k].omega));
    for (std::size_t g = 0; g < grid.size(); ++g) {
      double t = grid.points()[g];
      double x = spec.mean_fn(t);
      for (std::size_t k = 0; k < scores.size(); ++k)
        x += scores[k] * spec.components[k].psi(t);
      out(i, static_cast<Eigen::Index>(g)) = x;
    }
  }
  return out;
}

}  // namespace llfpca
