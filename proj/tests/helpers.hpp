#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "llfpca/llfpca.hpp"

namespace testutil {

inline llfpca::FunctionalDataset make_ds(
    const std::vector<std::vector<std::pair<double, double>>>& curve_points,
    llfpca::Interval domain = {0.0, 1.0}) {
  std::vector<llfpca::Curve> curves;
  for (std::size_t i = 0; i < curve_points.size(); ++i) {
    llfpca::Curve c;
    c.id = "c" + std::to_string(i + 1);
    for (auto [t, y] : curve_points[i]) c.observations.push_back({t, y});
    curves.push_back(std::move(c));
  }
  return llfpca::FunctionalDataset(domain, std::move(curves));
}

// Independent check for the 1-D smoother: assemble the weighted least-squares
// normal equations over all observations and solve densely.
inline double oracle_fit_1d(const llfpca::FunctionalDataset& ds, const llfpca::KernelSpec& kernel,
                            double h, double t, bool square = false) {
  double n = static_cast<double>(ds.curve_count());
  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
  Eigen::Vector2d b = Eigen::Vector2d::Zero();
  for (const llfpca::Curve& c : ds.curves()) {
    double wi = 1.0 / (n * static_cast<double>(c.m()));
    for (const llfpca::Observation& o : c.observations) {
      double w = wi * llfpca::scaled(kernel, h, o.time - t);
      if (w == 0.0) continue;
      double d = o.time - t;
      double y = square ? o.value * o.value : o.value;
      Eigen::Vector2d x(1.0, d);
      A += w * x * x.transpose();
      b += w * y * x;
    }
  }
  return A.fullPivLu().solve(b)[0];
}

// Independent check for the 2-D smoother: dense 3x3 normal equations over all
// ordered within-curve pairs.
inline double oracle_fit_2d(const llfpca::FunctionalDataset& ds, const llfpca::KernelSpec& kernel,
                            double h, double s, double t) {
  double n_eff = static_cast<double>(ds.pairable_curve_count());
  Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
  Eigen::Vector3d b = Eigen::Vector3d::Zero();
  for (const llfpca::Curve& c : ds.curves()) {
    if (c.m() < 2) continue;
    double wi = 1.0 / (n_eff * static_cast<double>(c.pair_count()));
    for (std::size_t j = 0; j < c.m(); ++j)
      for (std::size_t k = 0; k < c.m(); ++k) {
        if (j == k) continue;
        double w = wi * llfpca::scaled(kernel, h, c.observations[j].time - s) *
                   llfpca::scaled(kernel, h, c.observations[k].time - t);
        if (w == 0.0) continue;
        Eigen::Vector3d x(1.0, c.observations[j].time - s, c.observations[k].time - t);
        A += w * x * x.transpose();
        b += w * c.observations[j].value * c.observations[k].value * x;
      }
  }
  return A.fullPivLu().solve(b)[0];
}

// Random irregular design with responses given by fn(t).
template <class Fn>
llfpca::FunctionalDataset random_design(llfpca::CounterRng& rng, int n, int m_lo, int m_hi,
                                        Fn&& fn) {
  std::vector<llfpca::Curve> curves;
  for (int i = 0; i < n; ++i) {
    llfpca::Curve c;
    c.id = "c" + std::to_string(i + 1);
    long m = rng.uniform_int(m_lo, m_hi);
    for (long j = 0; j < m; ++j) {
      double t = rng.uniform01();
      c.observations.push_back({t, fn(t)});
    }
    curves.push_back(std::move(c));
  }
  return llfpca::FunctionalDataset({0.0, 1.0}, std::move(curves));
}

}  // namespace testutil
