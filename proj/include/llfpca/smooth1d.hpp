#pragma once

#include <cmath>
#include <vector>

#include "dataset.hpp"
#include "kernels.hpp"

namespace llfpca {

// Response fed to the univariate smoother: raw values for the mean function,
// squared values for the second-moment (variance) function.
enum class ResponseTransform { Identity, Square };

struct MeanEstimate {
  EvaluationGrid grid;
  std::vector<double> values;
  double bandwidth = 0.0;
};

struct VarianceFunctionEstimate {
  EvaluationGrid grid;
  std::vector<double> values;
  double bandwidth = 0.0;
};

// Weighted local-linear fit at `t`: every curve gets total weight 1/n, spread
// uniformly over its observations (1/(n m_i) each). Returns the intercept of
// the kernel-weighted least-squares line, via the closed form
//   (R0 S2 - R1 S1) / (S0 S2 - S1^2)
// with S_r, R_r the weighted moment sums of (T - t)/h.
inline double local_linear_fit(const FunctionalDataset& ds, const KernelSpec& kernel, double h,
                               double t, ResponseTransform transform) {
  if (!(h > 0.0)) throw NonpositiveBandwidth(h);

  double S0 = 0.0, S1 = 0.0, S2 = 0.0, R0 = 0.0, R1 = 0.0;
  double n = static_cast<double>(ds.curve_count());
  bool seen = false;
  double first_time = 0.0;
  bool two_distinct = false;

  for (const Curve& c : ds.curves()) {
    double wi = 1.0 / (n * static_cast<double>(c.m()));
    for (const Observation& o : c.observations) {
      double d = o.time - t;
      double k = scaled(kernel, h, d);
      if (k == 0.0) continue;
      if (!seen) {
        seen = true;
        first_time = o.time;
      } else if (o.time != first_time) {
        two_distinct = true;
      }
      double u = d / h;
      double wk = wi * k;
      double y = transform == ResponseTransform::Square ? o.value * o.value : o.value;
      S0 += wk;
      S1 += wk * u;
      S2 += wk * u * u;
      R0 += wk * y;
      R1 += wk * u * y;
    }
  }

  if (!two_distinct)
    throw DegenerateWindow(t, "fewer than two distinct observation times in window");
  double det = S0 * S2 - S1 * S1;
  if (det < 1e-12 * std::max(S0 * S2, 1.0))
    throw DegenerateWindow(t, "normal equations numerically singular");
  return (R0 * S2 - R1 * S1) / det;
}

inline MeanEstimate estimate_mean(const FunctionalDataset& ds, const KernelSpec& kernel,
                                  double h_mu, const EvaluationGrid& grid) {
  MeanEstimate out{grid, {}, h_mu};
  out.values.reserve(grid.size());
  for (double t : grid.points())
    out.values.push_back(local_linear_fit(ds, kernel, h_mu, t, ResponseTransform::Identity));
  return out;
}

// Local-linear smooth of the squared responses: estimates V(t) = C(t,t) + sigma^2.
inline VarianceFunctionEstimate estimate_variance_function(const FunctionalDataset& ds,
                                                           const KernelSpec& kernel, double h_V,
                                                           const EvaluationGrid& grid) {
  VarianceFunctionEstimate out{grid, {}, h_V};
  out.values.reserve(grid.size());
  for (double t : grid.points())
    out.values.push_back(local_linear_fit(ds, kernel, h_V, t, ResponseTransform::Square));
  return out;
}

}  // namespace llfpca
