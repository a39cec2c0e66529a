// Acceptance harness: each criterion prints its sub-checks and one final
// "C<k> PASS|FAIL" line, and the process exits nonzero on any failure.
//
//   acceptance <k> [--cli PATH]    run criterion k (1..8)
//   acceptance all [--cli PATH]    run every criterion in order
//
// Criterion 7 drives the command-line binary and needs --cli.

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "llfpca/llfpca.hpp"

namespace {

using namespace llfpca;

int g_failures = 0;

void check(bool ok, const std::string& what) {
  std::printf("  [%s] %s\n", ok ? " ok " : "FAIL", what.c_str());
  if (!ok) ++g_failures;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

template <class Fn>
FunctionalDataset random_dataset(CounterRng& rng, int n, int m_lo, int m_hi, Fn&& value_at) {
  std::vector<Curve> curves;
  for (int i = 0; i < n; ++i) {
    Curve c;
    c.id = "c" + std::to_string(i + 1);
    long m = rng.uniform_int(m_lo, m_hi);
    for (long j = 0; j < m; ++j) {
      double t = rng.uniform01();
      c.observations.push_back({t, value_at(t)});
    }
    curves.push_back(std::move(c));
  }
  return FunctionalDataset({0.0, 1.0}, std::move(curves));
}

// Independent reference route: hand-coded Epanechnikov weight and dense
// normal-equation solves, sharing no code with the closed-form smoothers.
double epan_weight(double v, double h) {
  double u = v / h;
  return std::abs(u) < 1.0 ? 0.75 * (1.0 - u * u) / h : 0.0;
}

double dense_fit_1d(const FunctionalDataset& ds, double h, double t) {
  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
  Eigen::Vector2d b = Eigen::Vector2d::Zero();
  const double n = static_cast<double>(ds.curve_count());
  for (const Curve& c : ds.curves()) {
    for (const Observation& o : c.observations) {
      double w = epan_weight(o.time - t, h) / (n * static_cast<double>(c.m()));
      if (w == 0.0) continue;
      Eigen::Vector2d x(1.0, o.time - t);
      A += w * x * x.transpose();
      b += w * o.value * x;
    }
  }
  return A.fullPivLu().solve(b)[0];
}

double dense_fit_2d(const FunctionalDataset& ds, double h, double s, double t) {
  Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
  Eigen::Vector3d b = Eigen::Vector3d::Zero();
  double n_eff = 0.0;
  for (const Curve& c : ds.curves())
    if (c.m() >= 2) n_eff += 1.0;
  for (const Curve& c : ds.curves()) {
    if (c.m() < 2) continue;
    double Ni = static_cast<double>(c.m()) * static_cast<double>(c.m() - 1);
    for (std::size_t j = 0; j < c.m(); ++j)
      for (std::size_t k = 0; k < c.m(); ++k) {
        if (j == k) continue;
        double w = epan_weight(c.observations[j].time - s, h) *
                   epan_weight(c.observations[k].time - t, h) / (n_eff * Ni);
        if (w == 0.0) continue;
        Eigen::Vector3d x(1.0, c.observations[j].time - s, c.observations[k].time - t);
        A += w * x * x.transpose();
        b += w * c.observations[j].value * c.observations[k].value * x;
      }
  }
  return A.fullPivLu().solve(b)[0];
}

Eigen::VectorXd grid_weights(const EvaluationGrid& grid) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t g = 0; g < grid.size(); ++g) w[static_cast<Eigen::Index>(g)] = grid.weights()[g];
  return w;
}

// --- Criterion 1: exact reproduction of affine targets -----------------

void criterion1() {
  const KernelSpec kern = make_kernel(KernelFamily::Epanechnikov);
  CounterRng rng(Seed{8101});
  EvaluationGrid eval = make_grid({0.0, 1.0}, 21);

  double worst1 = 0.0;
  int degenerate = 0;
  for (int rep = 0; rep < 100; ++rep) {
    double a = 4.0 * rng.uniform01() - 2.0, b = 4.0 * rng.uniform01() - 2.0;
    auto ds = random_dataset(rng, static_cast<int>(rng.uniform_int(5, 12)), 3, 8,
                             [&](double t) { return a + b * t; });
    for (double t : eval.points()) {
      try {
        worst1 = std::max(worst1, std::abs(local_linear_fit(ds, kern, 0.5, t, ResponseTransform::Identity) - (a + b * t)));
      } catch (const DegenerateWindow&) {
        ++degenerate;
      }
    }
  }
  check(degenerate == 0, "all 2100 curve-fit windows well posed (" + std::to_string(degenerate) +
                             " degenerate)");
  check(worst1 <= 1e-10,
        "1-D smoother reproduces affine functions, sup error " + num(worst1) + " <= 1e-10");

  double worst_const = 0.0, worst_plane = 0.0;
  for (int rep = 0; rep < 30; ++rep) {
    double c = 6.0 * rng.uniform01() - 3.0;
    auto ds = random_dataset(rng, static_cast<int>(rng.uniform_int(6, 10)), 3, 6,
                             [&](double) { return c; });
    double c0 = 4.0 * rng.uniform01() - 2.0, c1 = 4.0 * rng.uniform01() - 2.0,
           c2 = 4.0 * rng.uniform01() - 2.0;
    const auto& curves = ds.curves();
    for (double s = 0.0; s <= 1.0; s += 0.25)
      for (double t = 0.0; t <= 1.0; t += 0.25) {
        try {
          worst_const = std::max(
              worst_const, std::abs(local_linear_surface_fit(ds, kern, 0.5, s, t) - c * c));
          double plane = local_linear_surface_fit_with(
              ds, kern, 0.5, s, t, [&](std::size_t i, std::size_t j, std::size_t k) {
                return c0 + c1 * curves[i].observations[j].time + c2 * curves[i].observations[k].time;
              });
          worst_plane = std::max(worst_plane, std::abs(plane - (c0 + c1 * s + c2 * t)));
        } catch (const DegenerateSurfaceWindow&) {
          ++degenerate;
        }
      }
  }
  check(degenerate == 0, "all 750 surface-fit windows well posed");
  check(worst_const <= 1e-9,
        "2-D smoother reproduces constants, sup error " + num(worst_const) + " <= 1e-9");
  check(worst_plane <= 1e-9,
        "2-D smoother reproduces affine surfaces, sup error " + num(worst_plane) + " <= 1e-9");
}

// --- Criterion 2: closed forms match dense normal-equation solves ------

void criterion2() {
  const KernelSpec kern = make_kernel(KernelFamily::Epanechnikov);
  double worst1 = 0.0, worst2 = 0.0;
  int eval1 = 0, eval2 = 0;
  for (int seed = 0; seed < 100; ++seed) {
    CounterRng rng(Seed{90000 + static_cast<std::uint64_t>(seed)});
    auto ds = random_dataset(rng, static_cast<int>(rng.uniform_int(2, 10)), 2, 6,
                             [&](double) { return rng.normal(); });
    for (int p = 0; p < 7; ++p) {
      double h = 0.15 + 0.45 * rng.uniform01(), t = rng.uniform01();
      try {
        double impl = local_linear_fit(ds, kern, h, t, ResponseTransform::Identity);
        double oracle = dense_fit_1d(ds, h, t);
        worst1 = std::max(worst1, std::abs(impl - oracle) / std::max(1.0, std::abs(oracle)));
        ++eval1;
      } catch (const DegenerateWindow&) {
      }
    }
    for (int p = 0; p < 5; ++p) {
      double h = 0.25 + 0.35 * rng.uniform01(), s = rng.uniform01(), t = rng.uniform01();
      try {
        double impl = local_linear_surface_fit(ds, kern, h, s, t);
        double oracle = dense_fit_2d(ds, h, s, t);
        worst2 = std::max(worst2, std::abs(impl - oracle) / std::max(1.0, std::abs(oracle)));
        ++eval2;
      } catch (const DegenerateSurfaceWindow&) {
      } catch (const NoPairableCurves&) {
      }
    }
  }
  check(eval1 >= 400, "enough well-posed 1-D comparisons (" + std::to_string(eval1) + " >= 400)");
  check(eval2 >= 250, "enough well-posed 2-D comparisons (" + std::to_string(eval2) + " >= 250)");
  check(worst1 <= 1e-9,
        "1-D closed form matches dense solve, relative error " + num(worst1) + " <= 1e-9");
  check(worst2 <= 1e-9,
        "2-D closed form matches dense solve, relative error " + num(worst2) + " <= 1e-9");
}

// --- Criterion 3: analytic min(s,t) surface eigensystem -----------------

void criterion3() {
  EvaluationGrid grid = make_grid({0.0, 1.0}, 201);
  EigenSystem eig = decompose_matrix(grid, brownian_covariance_matrix(grid), 3);
  // Quoted three-decimal reference triple; the third entry rounds the
  // analytic 4/(25 pi^2) = 0.0162114 down by 1.3%, so the 1% recovery check
  // must target the analytic eigenvalues and the quoted triple is verified
  // separately at its own print precision (half a unit in the last digit).
  const double reference[3] = {0.405, 0.045, 0.016};
  Eigen::VectorXd w = grid_weights(grid);
  for (int k = 0; k < 3; ++k) {
    double analytic = 4.0 / ((2.0 * k + 1.0) * (2.0 * k + 1.0) * std::numbers::pi * std::numbers::pi);
    check(std::abs(analytic - reference[k]) <= 0.0005,
          "reference value " + num(reference[k]) + " is " + num(analytic) +
              " rounded to three decimals");
    double rel = std::abs(eig.eigenvalues[static_cast<std::size_t>(k)] - analytic) / analytic;
    check(rel <= 0.01, "eigenvalue " + std::to_string(k + 1) + " = " +
                           num(eig.eigenvalues[static_cast<std::size_t>(k)]) + " within 1% of " +
                           num(analytic));
    Eigen::VectorXd truth(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t g = 0; g < grid.size(); ++g)
      truth[static_cast<Eigen::Index>(g)] =
          std::numbers::sqrt2 * std::sin((k + 0.5) * std::numbers::pi * grid.points()[g]);
    Eigen::VectorXd aligned = align_sign(eig.eigenfunctions[static_cast<std::size_t>(k)], truth, w);
    double sup = (aligned - truth).cwiseAbs().maxCoeff();
    check(sup <= 0.02, "eigenfunction " + std::to_string(k + 1) + " sup error " + num(sup) +
                           " <= 0.02 after sign alignment");
  }
}

// --- Criterion 4: quadratic-mean KL study at desk scale -----------------

void criterion4() {
  ReproduceOptions opts;
  opts.replicates = 50;
  opts.seed = Seed{20240101};
  ReproduceReport report = run_reproduce_sim1(opts);
  const ArmReport& m50 = report.arms[2];
  check(m50.label == "m50", "arm layout: " + m50.label + " at index 2");

  const double truth_omega[3] = {0.6, 0.3, 0.1};
  std::vector<double> med = m50.omega_median();
  for (int j = 0; j < 3; ++j) {
    double rel = std::abs(med[static_cast<std::size_t>(j)] - truth_omega[j]) / truth_omega[j];
    check(rel <= 0.20, "median score variance " + std::to_string(j + 1) + " = " +
                           num(med[static_cast<std::size_t>(j)]) + " within 20% of " +
                           num(truth_omega[j]));
  }

  double s2 = m50.sigma2_median();
  check(s2 >= 0.16 && s2 <= 0.24, "median noise variance " + num(s2) + " in [0.16, 0.24]");

  KLModelSpec spec = simulation1_spec();
  EvaluationGrid grid2 = make_grid(spec.domain, opts.grid_size_2d);
  ModelEigenSystem truth = true_eigensystem(spec, grid2, 3);
  for (int j = 0; j < 2; ++j) {
    double sup = 0.0;
    const Band& band = m50.psi_band[static_cast<std::size_t>(j)];
    for (std::size_t g = 0; g < band.mean.size(); ++g)
      sup = std::max(sup, std::abs(band.mean[g] -
                                   truth.eigenfunctions[static_cast<std::size_t>(j)]
                                                       [static_cast<Eigen::Index>(g)]));
    check(sup <= 0.1, "pointwise-mean eigenfunction " + std::to_string(j + 1) + " sup error " +
                          num(sup) + " <= 0.1");
  }

  double w5 = report.arms[0].mu_band.mean_width(), w10 = report.arms[1].mu_band.mean_width(),
         w50 = report.arms[2].mu_band.mean_width(), winf = report.arms[3].mu_band.mean_width();
  check(w5 > w10 && w10 > w50 && w50 > winf,
        "mean-curve percentile bands narrow monotonically: " + num(w5) + " > " + num(w10) +
            " > " + num(w50) + " > " + num(winf));

  const Band& b5 = report.arms[0].mu_band;
  const Band& binf = report.arms[3].mu_band;
  int narrower = 0;
  for (std::size_t g = 0; g < b5.points.size(); ++g)
    if (binf.p99[g] - binf.p01[g] < b5.p99[g] - b5.p01[g]) ++narrower;
  double frac = static_cast<double>(narrower) / static_cast<double>(b5.points.size());
  check(frac >= 0.95, "fully observed arm band pointwise narrower than m=5 arm at " +
                          num(100.0 * frac) + "% of grid points (>= 95%)");

  for (const ArmReport& arm : report.arms)
    check(arm.failures == 0,
          "arm " + arm.label + ": " + std::to_string(arm.failures) + " failed replicates");
}

// --- Criterion 5: Brownian-motion study at desk scale -------------------

void criterion5() {
  ReproduceOptions opts;
  opts.replicates = 50;
  opts.seed = Seed{20240101};
  ReproduceReport report = run_reproduce_sim2(opts);
  const ArmReport& m50 = report.arms[2];
  check(m50.label == "m50", "arm layout: " + m50.label + " at index 2");

  double med = m50.omega_median()[0];
  check(std::abs(med - 0.405) / 0.405 <= 0.10,
        "median leading eigenvalue " + num(med) + " within 10% of 0.405");

  std::vector<std::vector<double>> l2;
  for (const ArmReport& arm : report.arms) l2.push_back(arm.psi_l2_median());
  for (int j = 0; j < 3; ++j) {
    auto ji = static_cast<std::size_t>(j);
    check(l2[0][ji] > l2[1][ji] && l2[1][ji] > l2[2][ji],
          "eigenfunction " + std::to_string(j + 1) + " median L2 error decreases in m: " +
              num(l2[0][ji]) + " > " + num(l2[1][ji]) + " > " + num(l2[2][ji]));
  }

  for (const ArmReport& arm : report.arms)
    check(arm.failures == 0,
          "arm " + arm.label + ": " + std::to_string(arm.failures) + " failed replicates");
}

// --- Criterion 6: rate-regime discrimination -----------------------------

void criterion6() {
  struct Window {
    const char* name;
    double center, half;
  };
  const Window windows[] = {{"sparse-mean", -0.4, 0.12},
                            {"sparse-cov", -1.0 / 3.0, 0.12},
                            {"dense-mean", -0.5, 0.12},
                            {"sparse-eigenvalue", -0.5, 0.15}};
  std::vector<Scenario> all = shipped_scenarios(50);
  for (const Window& win : windows) {
    RateStudyReport rep = run_scenario(find_scenario(all, win.name), Seed{20240101}, 1);
    check(std::abs(rep.slope - win.center) <= win.half,
          std::string(win.name) + " slope " + num(rep.slope) + " within " + num(win.center) +
              " +/- " + num(win.half));
    check(rep.points.back().mean_error < rep.points.front().mean_error,
          std::string(win.name) + " error shrinks with n: " + num(rep.points.front().mean_error) +
              " -> " + num(rep.points.back().mean_error));
  }
}

// --- Criterion 7: byte-identical study outputs via the CLI ---------------

std::map<std::string, std::string> read_dir(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    std::ifstream in(entry.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    out[entry.path().filename().string()] = ss.str();
  }
  return out;
}

void criterion7(const std::string& cli) {
  if (cli.empty()) {
    check(false, "criterion 7 needs --cli PATH pointing at the command-line binary");
    return;
  }
  namespace fs = std::filesystem;
  fs::path base = fs::temp_directory_path() / "llfpca_acceptance_c7";
  std::error_code ec;
  fs::remove_all(base, ec);
  fs::create_directories(base);

  struct Run {
    const char* name;
    int workers;
  };
  for (Run run : {Run{"a", 1}, Run{"b", 1}, Run{"c", 8}}) {
    std::string dir = (base / run.name).string();
    std::string cmd = "\"" + cli + "\" reproduce-sim1 --replicates 50 --seed 4242 --workers " +
                      std::to_string(run.workers) + " --out \"" + dir + "\" > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    check(rc == 0, "reproduce-sim1 (" + std::to_string(run.workers) + " worker" +
                       (run.workers > 1 ? "s" : "") + ", out " + run.name + ") exits 0");
  }

  auto a = read_dir(base / "a"), b = read_dir(base / "b"), c = read_dir(base / "c");
  check(a.size() >= 17, "study wrote " + std::to_string(a.size()) + " files (>= 17)");
  check(a == b, "repeated run is byte-identical");
  check(a == c, "8-worker run is byte-identical to 1-worker run");
  fs::remove_all(base, ec);
}

// --- Criterion 8: invariant suite ----------------------------------------

void criterion8() {
  const KernelSpec kern = make_kernel(KernelFamily::Epanechnikov);
  CounterRng rng(Seed{8808});

  // Symmetry: the raw covariance surface equals its transpose bit for bit.
  auto ds = random_dataset(rng, 10, 3, 5, [&](double t) { return std::sin(t) + rng.normal(); });
  RawCovarianceEstimate raw = estimate_raw_covariance(ds, kern, 0.3, make_grid({0.0, 1.0}, 21));
  Eigen::MatrixXd asym = raw.values - raw.values.transpose();
  check(asym.cwiseAbs().maxCoeff() == 0.0, "covariance surface is exactly symmetric");

  // Weight invariance, 1-D: duplicating every observation within a curve
  // leaves the mean fit unchanged (per-curve weights spread over copies).
  std::vector<Curve> doubled;
  for (const Curve& c : ds.curves()) {
    Curve d;
    d.id = c.id;
    for (const Observation& o : c.observations) {
      d.observations.push_back(o);
      d.observations.push_back(o);
    }
    doubled.push_back(std::move(d));
  }
  FunctionalDataset ds_dup(ds.domain(), std::move(doubled));
  double worst_dup = 0.0;
  for (double t : make_grid({0.0, 1.0}, 21).points())
    worst_dup = std::max(worst_dup, std::abs(local_linear_fit(ds, kern, 0.25, t, ResponseTransform::Identity) -
                                             local_linear_fit(ds_dup, kern, 0.25, t, ResponseTransform::Identity)));
  check(worst_dup <= 1e-10,
        "1-D fit invariant under duplicated observations, diff " + num(worst_dup));

  // Weight invariance, 2-D: replicating whole curves leaves the surface fit
  // unchanged (per-curve weight halves while the pair set doubles).
  std::vector<Curve> twice;
  for (int copy = 0; copy < 2; ++copy)
    for (const Curve& c : ds.curves()) {
      Curve d = c;
      d.id = c.id + (copy ? "_copy" : "");
      twice.push_back(std::move(d));
    }
  FunctionalDataset ds_twice(ds.domain(), std::move(twice));
  double worst_rep = 0.0;
  for (double s = 0.1; s <= 0.9; s += 0.2)
    for (double t = 0.1; t <= 0.9; t += 0.2)
      worst_rep = std::max(worst_rep, std::abs(local_linear_surface_fit(ds, kern, 0.3, s, t) -
                                               local_linear_surface_fit(ds_twice, kern, 0.3, s, t)));
  check(worst_rep <= 1e-10,
        "2-D fit invariant under replicated curves, diff " + num(worst_rep));

  // Localization: observations outside every kernel window cannot move the
  // fit, bit for bit.
  std::vector<std::vector<std::pair<double, double>>> pts = {
      {{0.45, 1.0}, {0.58, 2.0}, {0.95, 7.0}},
      {{0.38, 1.5}, {0.6, 0.5}, {0.05, -3.0}},
      {{0.35, 0.8}, {0.5, 1.2}, {0.62, 0.9}}};
  auto build = [](const std::vector<std::vector<std::pair<double, double>>>& rows) {
    std::vector<Curve> cs;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      Curve c;
      c.id = "c" + std::to_string(i + 1);
      for (auto [t, y] : rows[i]) c.observations.push_back({t, y});
      cs.push_back(std::move(c));
    }
    return FunctionalDataset({0.0, 1.0}, std::move(cs));
  };
  auto near = build(pts);
  auto far_pts = pts;
  far_pts[0][2].second = 1e6;
  far_pts[1][2].second = -1e6;
  auto far = build(far_pts);
  check(local_linear_fit(near, kern, 0.25, 0.5, ResponseTransform::Identity) == local_linear_fit(far, kern, 0.25, 0.5, ResponseTransform::Identity),
        "1-D fit bitwise unchanged by out-of-window observations");
  check(local_linear_surface_fit(near, kern, 0.25, 0.5, 0.5) ==
            local_linear_surface_fit(far, kern, 0.25, 0.5, 0.5),
        "2-D fit bitwise unchanged by out-of-window observations");

  // Normalization and orthogonality of eigenfunctions in quadrature.
  EvaluationGrid grid = make_grid({0.0, 1.0}, 101);
  EigenSystem eig = decompose_matrix(grid, brownian_covariance_matrix(grid), 5);
  Eigen::VectorXd w = grid_weights(grid);
  double worst_norm = 0.0, worst_cross = 0.0;
  for (std::size_t i = 0; i < eig.retained(); ++i)
    for (std::size_t j = i; j < eig.retained(); ++j) {
      double ip = (eig.eigenfunctions[i].array() * eig.eigenfunctions[j].array() * w.array()).sum();
      if (i == j)
        worst_norm = std::max(worst_norm, std::abs(ip - 1.0));
      else
        worst_cross = std::max(worst_cross, std::abs(ip));
    }
  check(worst_norm <= 1e-8, "eigenfunction quadrature norms within 1e-8 of 1");
  check(worst_cross <= 1e-6, "eigenfunction pairs orthogonal within 1e-6");

  // Error-bound ordering and monotonicity: the 2-D bound dominates the 1-D
  // bound, and both shrink as the bandwidth or sampling density grows.
  bool ordered = true, mono_h = true, mono_gamma = true;
  for (int n : {50, 200, 1000})
    for (double g : {1.5, 4.0, 20.0}) {
      RateFormulas f{n, g, g};
      double prev1 = 1e300, prev2 = 1e300;
      for (double h : {0.02, 0.05, 0.1, 0.2, 0.5}) {
        double d1 = delta_n1(f, h), d2 = delta_n2(f, h);
        ordered = ordered && d1 <= d2 + 1e-15;
        mono_h = mono_h && d1 <= prev1 + 1e-15 && d2 <= prev2 + 1e-15;
        prev1 = d1;
        prev2 = d2;
      }
      RateFormulas denser{n, 2.0 * g, 2.0 * g};
      mono_gamma = mono_gamma && delta_n1(denser, 0.1) <= delta_n1(f, 0.1) &&
                   delta_n2(denser, 0.1) <= delta_n2(f, 0.1);
    }
  check(ordered, "1-D error bound never exceeds the 2-D bound");
  check(mono_h, "error bounds decrease in the bandwidth");
  check(mono_gamma, "error bounds decrease in sampling density");
}

struct Criterion {
  const char* title;
  double budget_seconds;
};

const Criterion kCriteria[9] = {
    {"", 0.0},
    {"exact reproduction of affine targets", 10.0},
    {"closed forms match dense normal-equation solves", 30.0},
    {"analytic min(s,t) eigensystem on a 201-point grid", 5.0},
    {"quadratic-mean KL study, 50 replicates", 900.0},
    {"Brownian-motion study, 50 replicates", 900.0},
    {"rate-regime slope discrimination, 50 replicates", 2700.0},
    {"byte-identical study outputs across runs and workers", 1200.0},
    {"invariant suite", 120.0},
};

bool run_criterion(int k, const std::string& cli) {
  std::printf("criterion %d: %s\n", k, kCriteria[k].title);
  g_failures = 0;
  auto start = std::chrono::steady_clock::now();
  try {
    switch (k) {
      case 1: criterion1(); break;
      case 2: criterion2(); break;
      case 3: criterion3(); break;
      case 4: criterion4(); break;
      case 5: criterion5(); break;
      case 6: criterion6(); break;
      case 7: criterion7(cli); break;
      case 8: criterion8(); break;
    }
  } catch (const std::exception& e) {
    check(false, std::string("unexpected exception: ") + e.what());
  }
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  check(secs < kCriteria[k].budget_seconds,
        "runtime " + num(secs) + " s within " + num(kCriteria[k].budget_seconds) + " s");
  bool ok = g_failures == 0;
  std::printf("C%d %s (%.1f s)\n", k, ok ? "PASS" : "FAIL", secs);
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--cli" && i + 1 < argc) {
      cli = argv[++i];
    } else if (arg == "all") {
      selected = {1, 2, 3, 4, 5, 6, 7, 8};
    } else {
      int k = std::atoi(arg.c_str());
      if (k < 1 || k > 8) {
        std::fprintf(stderr, "usage: acceptance <1..8|all> [--cli PATH]\n");
        return 2;
      }
      selected.push_back(k);
    }
  }
  if (selected.empty()) {
    std::fprintf(stderr, "usage: acceptance <1..8|all> [--cli PATH]\n");
    return 2;
  }
  int failed = 0;
  for (int k : selected)
    if (!run_criterion(k, cli)) ++failed;
  return failed == 0 ? 0 : 1;
}
