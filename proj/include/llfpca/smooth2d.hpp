#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "dataset.hpp"
#include "kernels.hpp"
#include "smooth1d.hpp"

namespace llfpca {

struct RawCovarianceEstimate {
  EvaluationGrid grid;  // shared by both axes
  Eigen::MatrixXd values;
  double bandwidth = 0.0;
};

struct CovarianceEstimate {
  RawCovarianceEstimate raw;
  MeanEstimate mean;
  Eigen::MatrixXd values;  // raw minus the rank-one mean product
};

struct ErrorVarianceEstimate {
  double sigma2 = 0.0;
  double integral_variance_fn = 0.0;   // quadrature integral of V-hat
  double integral_cov_diagonal = 0.0;  // quadrature integral of C-hat(t,t)
  bool negative = false;               // reported untruncated; flagged instead
};

namespace detail {

struct SurfaceMoments {
  double S00 = 0, S10 = 0, S01 = 0, S20 = 0, S11 = 0, S02 = 0;
  double R00 = 0, R10 = 0, R01 = 0;
  long pairs = 0;

  void add(double w, double u, double v, double y) {
    S00 += w;
    S10 += w * u;
    S01 += w * v;
    S20 += w * u * u;
    S11 += w * u * v;
    S02 += w * v * v;
    R00 += w * y;
    R10 += w * u * y;
    R01 += w * v * y;
    ++pairs;
  }

  // Intercept of the weighted planar fit:
  //   (A1 R00 - A2 R10 - A3 R01) / B
  // with A1 = S20 S02 - S11^2, A2 = S10 S02 - S01 S11, A3 = S01 S20 - S10 S11
  // and  B = A1 S00 - A2 S10 - A3 S01.
  double solve(double s, double t) const {
    if (pairs < 3)
      throw DegenerateSurfaceWindow(s, t, "fewer than three contributing pairs");
    double A1 = S20 * S02 - S11 * S11;
    double A2 = S10 * S02 - S01 * S11;
    double A3 = S01 * S20 - S10 * S11;
    double B = A1 * S00 - A2 * S10 - A3 * S01;
    if (std::abs(B) < 1e-12 * std::max(std::abs(A1 * S00), 1.0))
      throw DegenerateSurfaceWindow(s, t, "normal equations numerically singular");
    return (A1 * R00 - A2 * R10 - A3 * R01) / B;
  }
};

}  // namespace detail

// Planar local fit over within-curve ordered pairs (j, k), j != k, with an
// arbitrary pair response resp(curve_index, j, k). Curves with m_i < 2 are
// skipped; each pairable curve gets total weight 1/n_eff spread over its
// N_i = m_i (m_i - 1) ordered pairs.
template <class ResponseFn>
double local_linear_surface_fit_with(const FunctionalDataset& ds, const KernelSpec& kernel,
                                     double h, double s, double t, ResponseFn&& resp) {
  if (!(h > 0.0)) throw NonpositiveBandwidth(h);
  std::size_t n_eff = ds.pairable_curve_count();
  if (n_eff == 0) throw NoPairableCurves();

  detail::SurfaceMoments acc;
  for (std::size_t i = 0; i < ds.curve_count(); ++i) {
    const Curve& c = ds.curves()[i];
    if (c.m() < 2) continue;
    double wi = 1.0 / (static_cast<double>(n_eff) * static_cast<double>(c.pair_count()));
    for (std::size_t j = 0; j < c.m(); ++j) {
      double ku = evaluate(kernel, (c.observations[j].time - s) / h);
      if (ku == 0.0) continue;
      for (std::size_t k = 0; k < c.m(); ++k) {
        if (k == j) continue;
        double kv = evaluate(kernel, (c.observations[k].time - t) / h);
        if (kv == 0.0) continue;
        double u = (c.observations[j].time - s) / h;
        double v = (c.observations[k].time - t) / h;
        acc.add(wi * ku * kv / (h * h), u, v, resp(i, j, k));
      }
    }
  }
  return acc.solve(s, t);
}

// Raw covariance smoother: planar fit of the products Y_ij * Y_ik at (s, t).
inline double local_linear_surface_fit(const FunctionalDataset& ds, const KernelSpec& kernel,
                                       double h, double s, double t) {
  const auto& curves = ds.curves();
  return local_linear_surface_fit_with(
      ds, kernel, h, s, t, [&curves](std::size_t i, std::size_t j, std::size_t k) {
        return curves[i].observations[j].value * curves[i].observations[k].value;
      });
}

namespace detail {

// Shared state for evaluating the product-response surface at many points:
// per-curve time-sorted copies allow each kernel window to be located by
// binary search so off-window pairs are never touched.
class SurfaceEvaluator {
 public:
  SurfaceEvaluator(const FunctionalDataset& ds, const KernelSpec& kernel, double h)
      : kernel_(kernel), h_(h) {
    if (!(h > 0.0)) throw NonpositiveBandwidth(h);
    for (const Curve& c : ds.curves()) {
      if (c.m() < 2) continue;
      SortedCurve sc;
      std::vector<std::size_t> order(c.m());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&c](std::size_t a, std::size_t b) {
        return c.observations[a].time < c.observations[b].time;
      });
      sc.times.reserve(c.m());
      sc.values.reserve(c.m());
      for (std::size_t idx : order) {
        sc.times.push_back(c.observations[idx].time);
        sc.values.push_back(c.observations[idx].value);
      }
      sc.weight = 1.0 / static_cast<double>(c.pair_count());
      curves_.push_back(std::move(sc));
    }
    if (curves_.empty()) throw NoPairableCurves();
    double n_eff = static_cast<double>(curves_.size());
    for (SortedCurve& sc : curves_) sc.weight /= n_eff;
  }

  double at(double s, double t) const {
    SurfaceMoments acc;
    for (const SortedCurve& sc : curves_) {
      auto [jlo, jhi] = window(sc.times, s);
      if (jlo == jhi) continue;
      auto [klo, khi] = window(sc.times, t);
      for (std::size_t j = jlo; j < jhi; ++j) {
        double u = (sc.times[j] - s) / h_;
        double ku = evaluate(kernel_, u);
        if (ku == 0.0) continue;
        for (std::size_t k = klo; k < khi; ++k) {
          if (k == j) continue;
          double v = (sc.times[k] - t) / h_;
          double kv = evaluate(kernel_, v);
          if (kv == 0.0) continue;
          acc.add(sc.weight * ku * kv / (h_ * h_), u, v, sc.values[j] * sc.values[k]);
        }
      }
    }
    return acc.solve(s, t);
  }

 private:
  struct SortedCurve {
    std::vector<double> times;   // ascending
    std::vector<double> values;  // matched to times
    double weight = 0.0;         // 1 / (n_eff * N_i)
  };

  std::pair<std::size_t, std::size_t> window(const std::vector<double>& times, double x) const {
    auto lo = std::lower_bound(times.begin(), times.end(), x - h_);
    auto hi = std::upper_bound(lo, times.end(), x + h_);
    return {static_cast<std::size_t>(lo - times.begin()),
            static_cast<std::size_t>(hi - times.begin())};
  }

  KernelSpec kernel_;
  double h_;
  std::vector<SortedCurve> curves_;
};

}  // namespace detail

// Full raw covariance surface on grid x grid. Only the upper triangle is
// evaluated; the lower is mirrored, making symmetry exact by construction.
inline RawCovarianceEstimate estimate_raw_covariance(const FunctionalDataset& ds,
                                                     const KernelSpec& kernel, double h_R,
                                                     const EvaluationGrid& grid) {
  detail::SurfaceEvaluator eval(ds, kernel, h_R);
  const auto& pts = grid.points();
  Eigen::MatrixXd values(pts.size(), pts.size());
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a; b < pts.size(); ++b) {
      double v = eval.at(pts[a], pts[b]);
      values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = v;
      values(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = v;
    }
  return RawCovarianceEstimate{grid, std::move(values), h_R};
}

// R-hat(s,t) = C-hat(s,t) - mu-hat(s) mu-hat(t).
inline CovarianceEstimate estimate_covariance(RawCovarianceEstimate raw, MeanEstimate mean) {
  if (!raw.grid.same_points(mean.grid))
    throw GridMismatch("raw covariance and mean were estimated on different grids");
  Eigen::Map<const Eigen::VectorXd> mu(mean.values.data(),
                                       static_cast<Eigen::Index>(mean.values.size()));
  Eigen::MatrixXd values = raw.values - mu * mu.transpose();
  return CovarianceEstimate{std::move(raw), std::move(mean), std::move(values)};
}

// sigma2-hat = (integral of V-hat - integral of C-hat(t,t)) / (b - a), both
// integrals taken with the grid's quadrature weights. Negative estimates are
// reported as-is with the `negative` flag set.
inline ErrorVarianceEstimate estimate_sigma2(const FunctionalDataset& ds, const KernelSpec& kernel,
                                             double h_R, double h_V, const EvaluationGrid& grid) {
  VarianceFunctionEstimate vfn = estimate_variance_function(ds, kernel, h_V, grid);
  detail::SurfaceEvaluator eval(ds, kernel, h_R);
  double iv = 0.0, ic = 0.0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double t = grid.points()[g];
    iv += grid.weights()[g] * vfn.values[g];
    ic += grid.weights()[g] * eval.at(t, t);
  }
  double sigma2 = (iv - ic) / grid.domain().length();
  return ErrorVarianceEstimate{sigma2, iv, ic, sigma2 < 0.0};
}

}  // namespace llfpca
