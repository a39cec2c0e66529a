#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dataset.hpp"
#include "fpca.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "simgen.hpp"
#include "smooth1d.hpp"
#include "smooth2d.hpp"

namespace llfpca {

// Sampling-density summaries entering the uniform error-bound formulas.
struct RateFormulas {
  int n = 0;
  double gamma1 = 0.0;  // first-order harmonic mean of m_i
  double gamma2 = 0.0;  // second-order harmonic mean of m_i
};

inline RateFormulas rate_formulas(const FunctionalDataset& ds) {
  return {static_cast<int>(ds.curve_count()), harmonic_mean(ds, 1), harmonic_mean(ds, 2)};
}

// Uniform error bound for 1-D smoothers:
//   delta_n1(h) = sqrt((1 + 1/(h gamma1)) log n / n).
inline double delta_n1(const RateFormulas& f, double h) {
  if (!(h > 0.0)) throw NonpositiveBandwidth(h);
  return std::sqrt((1.0 + 1.0 / (h * f.gamma1)) * std::log(static_cast<double>(f.n)) /
                   static_cast<double>(f.n));
}

// Uniform error bound for the 2-D smoother:
//   delta_n2(h) = sqrt((1 + 1/(h gamma1) + 1/(h^2 gamma2)) log n / n).
inline double delta_n2(const RateFormulas& f, double h) {
  if (!(h > 0.0)) throw NonpositiveBandwidth(h);
  return std::sqrt((1.0 + 1.0 / (h * f.gamma1) + 1.0 / (h * h * f.gamma2)) *
                   std::log(static_cast<double>(f.n)) / static_cast<double>(f.n));
}

enum class Regime { Sparse, Dense, Mixed };
enum class RateTarget { MeanSup, CovSup, Sigma2, EigvalJ, EigfunSupJ, EigfunL2J };
enum class ModelKind { Sim1, Brownian };

struct ScenarioBandwidths {
  double h_mu = 0.0, h_R = 0.0, h_V = 0.0;
};

// One Monte Carlo rate experiment: estimate `target` across n_list and fit
// the log-log error slope.
struct Scenario {
  std::string name;
  Regime regime = Regime::Sparse;
  RateTarget target = RateTarget::MeanSup;
  std::vector<int> n_list;
  std::function<int(int)> m_rule;                     // n -> per-curve count
  std::function<ScenarioBandwidths(int)> bandwidths;  // n -> bandwidth set
  double bandwidth_exponent = 0.0;                    // a in h ~ c n^a
  int replicates = 50;
  ModelKind model = ModelKind::Sim1;
  int component = 1;          // j for eigen targets
  int grid_size_1d = 101;
  int grid_size_2d = 51;
  bool trim_boundary = false;  // restrict sup norms to [a+h, b-h]
};

struct RatePoint {
  int n = 0;
  double mean_error = 0.0;
  double sd_error = 0.0;
  int failures = 0;
};

struct RateStudyReport {
  std::string scenario;
  std::vector<RatePoint> points;
  double slope = 0.0;
  double slope_se = 0.0;
  double theoretical = 0.0;
  bool theoretical_known = false;
};

// Log-n slope implied by the error bound under the scenario's bandwidth
// power law, ignoring log factors: the bias term decays like n^{2a} and the
// stochastic term like the delta formulas; the slower of the two wins.
inline double theoretical_exponent(const Scenario& scenario) {
  if (scenario.regime == Regime::Mixed)
    throw UnknownCombination("no closed-form exponent for mixed designs");
  if (scenario.regime == Regime::Dense) return -0.5;
  double a = scenario.bandwidth_exponent;
  switch (scenario.target) {
    case RateTarget::MeanSup:
    case RateTarget::Sigma2:
    case RateTarget::EigfunSupJ:
    case RateTarget::EigfunL2J:
      return std::max(2.0 * a, -(1.0 + a) / 2.0);
    case RateTarget::CovSup:
      return std::max(2.0 * a, -(1.0 + 2.0 * a) / 2.0);
    case RateTarget::EigvalJ:
      return -0.5;
  }
  throw UnknownCombination("unrecognized target");
}

// OLS slope of y on x with standard error; needs at least 4 points.
inline std::pair<double, double> fit_loglog_slope(const std::vector<double>& log_n,
                                                  const std::vector<double>& log_err) {
  std::size_t k = log_n.size();
  if (k != log_err.size()) throw LengthMismatch(k, log_err.size());
  if (k < 4) throw Error("TooFewRatePoints", "slope fit needs at least 4 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    mx += log_n[i];
    my += log_err[i];
  }
  mx /= static_cast<double>(k);
  my /= static_cast<double>(k);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += (log_n[i] - mx) * (log_n[i] - mx);
    sxy += (log_n[i] - mx) * (log_err[i] - my);
  }
  double slope = sxy / sxx;
  double intercept = my - slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double r = log_err[i] - (intercept + slope * log_n[i]);
    rss += r * r;
  }
  double se = k > 2 ? std::sqrt(rss / (static_cast<double>(k) - 2.0) / sxx) : 0.0;
  return {slope, se};
}

namespace detail {

struct ScenarioTruth {
  std::vector<double> mean_on_grid1;
  Eigen::MatrixXd cov_on_grid2;
  ModelEigenSystem eigen_on_grid2;
  double sigma2 = 0.0;
};

inline ScenarioTruth scenario_truth(const Scenario& sc, const EvaluationGrid& grid1,
                                    const EvaluationGrid& grid2, int j0) {
  ScenarioTruth truth;
  if (sc.model == ModelKind::Sim1) {
    KLModelSpec spec = simulation1_spec();
    truth.sigma2 = spec.sigma2;
    truth.mean_on_grid1.reserve(grid1.size());
    for (double t : grid1.points()) truth.mean_on_grid1.push_back(spec.mean_fn(t));
    const auto G2 = static_cast<Eigen::Index>(grid2.size());
    truth.cov_on_grid2 = Eigen::MatrixXd::Zero(G2, G2);
    ModelEigenSystem full =
        true_eigensystem(spec, grid2, static_cast<int>(spec.components.size()));
    for (std::size_t k = 0; k < full.eigenvalues.size(); ++k)
      truth.cov_on_grid2 +=
          full.eigenvalues[k] * (full.eigenfunctions[k] * full.eigenfunctions[k].transpose());
    truth.eigen_on_grid2 = std::move(full);
  } else {
    BrownianModel bm;
    truth.sigma2 = bm.sigma2;
    truth.mean_on_grid1.assign(grid1.size(), 0.0);
    truth.cov_on_grid2 = brownian_covariance_matrix(grid2);
    truth.eigen_on_grid2 = true_eigensystem(bm, grid2, j0);
  }
  return truth;
}

inline FunctionalDataset scenario_dataset(const Scenario& sc, int n, int m, Seed seed) {
  if (sc.model == ModelKind::Sim1)
    return generate_kl(simulation1_spec(), DesignSpec::fixed(n, m), seed);
  return generate_brownian(DesignSpec::fixed(n, m), BrownianModel{}.sigma2, seed);
}

// Sup over grid indices allowed by the boundary trim.
inline double masked_sup(const std::vector<double>& est, const std::vector<double>& truth,
                         const EvaluationGrid& grid, double trim) {
  double sup = 0.0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double t = grid.points()[g];
    if (t < grid.domain().a + trim || t > grid.domain().b - trim) continue;
    sup = std::max(sup, std::abs(est[g] - truth[g]));
  }
  return sup;
}

}  // namespace detail

// Runs the Monte Carlo experiment. Failed replicates (degenerate windows,
// lost components) are counted and dropped, never imputed. Deterministic for
// a fixed seed regardless of worker count.
inline RateStudyReport run_scenario(const Scenario& sc, Seed seed, unsigned workers = 1) {
  if (sc.n_list.size() < 4)
    throw Error("TooFewRatePoints", "scenario needs at least 4 sample sizes");
  RateStudyReport report;
  report.scenario = sc.name;
  try {
    report.theoretical = theoretical_exponent(sc);
    report.theoretical_known = true;
  } catch (const UnknownCombination&) {
    report.theoretical = std::numeric_limits<double>::quiet_NaN();
    report.theoretical_known = false;
  }

  EvaluationGrid grid1 = make_grid({0.0, 1.0}, sc.grid_size_1d);
  EvaluationGrid grid2 = make_grid({0.0, 1.0}, sc.grid_size_2d);
  int j0 = std::max(sc.component, 1);
  detail::ScenarioTruth truth = detail::scenario_truth(sc, grid1, grid2, j0);

  for (std::size_t ni = 0; ni < sc.n_list.size(); ++ni) {
    int n = sc.n_list[ni];
    int m = sc.m_rule(n);
    ScenarioBandwidths hs = sc.bandwidths(n);
    std::vector<std::optional<double>> errors(static_cast<std::size_t>(sc.replicates));

    parallel_for(static_cast<std::size_t>(sc.replicates), workers, [&](std::size_t rep) {
      Seed rep_seed = derive_seed(seed, ni, rep);
      try {
        FunctionalDataset ds = detail::scenario_dataset(sc, n, m, rep_seed);
        KernelSpec kernel = make_kernel(KernelFamily::Epanechnikov);
        switch (sc.target) {
          case RateTarget::MeanSup: {
            MeanEstimate mu = estimate_mean(ds, kernel, hs.h_mu, grid1);
            errors[rep] = detail::masked_sup(mu.values, truth.mean_on_grid1, grid1,
                                             sc.trim_boundary ? hs.h_mu : 0.0);
            break;
          }
          case RateTarget::CovSup: {
            MeanEstimate mu = estimate_mean(ds, kernel, hs.h_mu, grid2);
            CovarianceEstimate cov =
                estimate_covariance(estimate_raw_covariance(ds, kernel, hs.h_R, grid2), mu);
            double sup = 0.0;
            double trim = sc.trim_boundary ? hs.h_R : 0.0;
            for (std::size_t a = 0; a < grid2.size(); ++a) {
              double s = grid2.points()[a];
              if (s < trim || s > 1.0 - trim) continue;
              for (std::size_t b = 0; b < grid2.size(); ++b) {
                double t = grid2.points()[b];
                if (t < trim || t > 1.0 - trim) continue;
                sup = std::max(sup, std::abs(cov.values(static_cast<Eigen::Index>(a),
                                                        static_cast<Eigen::Index>(b)) -
                                             truth.cov_on_grid2(static_cast<Eigen::Index>(a),
                                                                static_cast<Eigen::Index>(b))));
              }
            }
            errors[rep] = sup;
            break;
          }
          case RateTarget::Sigma2: {
            ErrorVarianceEstimate est = estimate_sigma2(ds, kernel, hs.h_R, hs.h_V, grid1);
            errors[rep] = std::abs(est.sigma2 - truth.sigma2);
            break;
          }
          case RateTarget::EigvalJ:
          case RateTarget::EigfunSupJ:
          case RateTarget::EigfunL2J: {
            MeanEstimate mu = estimate_mean(ds, kernel, hs.h_mu, grid2);
            CovarianceEstimate cov =
                estimate_covariance(estimate_raw_covariance(ds, kernel, hs.h_R, grid2), mu);
            EigenSystem eig = decompose(cov, j0);
            std::vector<ComponentErrors> errs = eigen_errors(eig, truth.eigen_on_grid2, j0);
            if (static_cast<int>(errs.size()) < sc.component)
              throw Error("LostComponent", "requested component not retained");
            const ComponentErrors& ce = errs[static_cast<std::size_t>(sc.component - 1)];
            errors[rep] = sc.target == RateTarget::EigvalJ     ? ce.eigenvalue_abs_error
                          : sc.target == RateTarget::EigfunSupJ ? ce.sup_error
                                                                : ce.l2_error;
            break;
          }
        }
      } catch (const Error&) {
        errors[rep] = std::nullopt;  // counted below
      }
    });

    RatePoint pt;
    pt.n = n;
    double sum = 0.0;
    int ok = 0;
    for (const auto& e : errors)
      if (e) {
        sum += *e;
        ++ok;
      } else {
        ++pt.failures;
      }
    if (ok > 0) {
      pt.mean_error = sum / ok;
      double ss = 0.0;
      for (const auto& e : errors)
        if (e) ss += (*e - pt.mean_error) * (*e - pt.mean_error);
      pt.sd_error = ok > 1 ? std::sqrt(ss / (ok - 1)) : 0.0;
      report.points.push_back(pt);
    } else {
      pt.mean_error = std::numeric_limits<double>::quiet_NaN();
      report.points.push_back(pt);
    }
  }

  std::vector<double> lx, ly;
  for (const RatePoint& pt : report.points)
    if (pt.mean_error > 0.0 && std::isfinite(pt.mean_error)) {
      lx.push_back(std::log(static_cast<double>(pt.n)));
      ly.push_back(std::log(pt.mean_error));
    }
  auto [slope, se] = fit_loglog_slope(lx, ly);
  report.slope = slope;
  report.slope_se = se;
  return report;
}

// The four bundled experiments covering the sparse 1-D, sparse 2-D, dense,
// and eigenvalue regimes.
inline std::vector<Scenario> shipped_scenarios(int replicates = 50) {
  std::vector<int> ns{100, 200, 400, 800, 1600};
  std::vector<Scenario> out;

  Scenario sparse_mean;
  sparse_mean.name = "sparse-mean";
  sparse_mean.regime = Regime::Sparse;
  sparse_mean.target = RateTarget::MeanSup;
  sparse_mean.n_list = ns;
  sparse_mean.m_rule = [](int) { return 5; };
  sparse_mean.bandwidths = [](int n) {
    double h = 0.153 * std::pow(n / 200.0, -0.2);
    return ScenarioBandwidths{h, h, h};
  };
  sparse_mean.bandwidth_exponent = -0.2;
  sparse_mean.replicates = replicates;
  out.push_back(sparse_mean);

  Scenario sparse_cov;
  sparse_cov.name = "sparse-cov";
  sparse_cov.regime = Regime::Sparse;
  sparse_cov.target = RateTarget::CovSup;
  sparse_cov.n_list = ns;
  sparse_cov.m_rule = [](int) { return 5; };
  sparse_cov.bandwidths = [](int n) {
    return ScenarioBandwidths{0.153 * std::pow(n / 200.0, -1.0 / 6.0),
                              0.116 * std::pow(n / 200.0, -1.0 / 6.0), 0.0};
  };
  sparse_cov.bandwidth_exponent = -1.0 / 6.0;
  sparse_cov.replicates = replicates;
  out.push_back(sparse_cov);

  Scenario dense_mean;
  dense_mean.name = "dense-mean";
  dense_mean.regime = Regime::Dense;
  dense_mean.target = RateTarget::MeanSup;
  dense_mean.n_list = ns;
  dense_mean.m_rule = [](int n) {
    return static_cast<int>(std::ceil(2.0 * std::pow(n, 0.25)));
  };
  dense_mean.bandwidths = [](int n) {
    double h = std::pow(n, -0.25);
    return ScenarioBandwidths{h, h, h};
  };
  dense_mean.bandwidth_exponent = -0.25;
  dense_mean.replicates = replicates;
  out.push_back(dense_mean);

  Scenario sparse_eig;
  sparse_eig.name = "sparse-eigenvalue";
  sparse_eig.regime = Regime::Sparse;
  sparse_eig.target = RateTarget::EigvalJ;
  sparse_eig.component = 1;
  sparse_eig.n_list = ns;
  sparse_eig.m_rule = [](int) { return 5; };
  sparse_eig.bandwidths = [](int n) {
    double h = std::pow(std::log(static_cast<double>(n)) / n, 1.0 / 3.0);
    return ScenarioBandwidths{h, h, h};
  };
  sparse_eig.bandwidth_exponent = -1.0 / 3.0;
  sparse_eig.replicates = replicates;
  out.push_back(sparse_eig);

  return out;
}

inline const Scenario& find_scenario(const std::vector<Scenario>& scenarios,
                                     const std::string& name) {
  for (const Scenario& sc : scenarios)
    if (sc.name == name) return sc;
  throw Error("UnknownScenario", "no bundled scenario named '" + name + "'");
}

}  // namespace llfpca
