#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "fpca.hpp"
#include "io.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "simgen.hpp"
#include "smooth1d.hpp"
#include "smooth2d.hpp"

// Monte Carlo reproduction drivers: run the bundled simulation models across
// per-curve sampling arms and emit plot-ready band/box files.

namespace llfpca {

struct ReproduceOptions {
  std::string outdir;  // empty: compute only, write nothing
  int replicates = 50;
  Seed seed{20240101};
  unsigned workers = 1;
  bool include_m1 = false;  // extra mean-only arm with one observation per curve
  int grid_size_1d = 101;
  int grid_size_2d = 51;
  KernelSpec kernel = make_kernel(KernelFamily::Epanechnikov);
};

// Smoothing bandwidths (h_mu, h_R, h_V) tuned per observations-per-curve arm.
inline ScenarioBandwidths preset_bandwidths(int m) {
  if (m <= 5) return {0.153, 0.116, 0.138};
  if (m <= 10) return {0.138, 0.103, 0.107};
  return {0.107, 0.077, 0.084};
}

// Pointwise mean with 1% / 99% percentile envelope across replicates.
struct Band {
  std::vector<double> points;
  std::vector<double> mean, p01, p99;

  double mean_width() const {
    double acc = 0.0;
    for (std::size_t g = 0; g < points.size(); ++g) acc += p99[g] - p01[g];
    return points.empty() ? 0.0 : acc / static_cast<double>(points.size());
  }
};

struct ArmReport {
  std::string label;
  int m = 0;  // 0 denotes the dense-sampling arm
  Band mu_band;
  std::vector<Band> psi_band;                     // per retained component
  std::vector<std::vector<double>> omega;         // component -> replicate values
  std::vector<double> sigma2;                     // replicate values (may be empty)
  std::vector<std::vector<double>> psi_l2_error;  // component -> replicate values
  int failures = 0;

  std::vector<double> omega_median() const {
    std::vector<double> out;
    for (const auto& v : omega) out.push_back(median_of(v));
    return out;
  }
  double sigma2_median() const { return median_of(sigma2); }
  std::vector<double> psi_l2_median() const {
    std::vector<double> out;
    for (const auto& v : psi_l2_error) out.push_back(median_of(v));
    return out;
  }

  static double median_of(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    std::size_t k = v.size();
    return k % 2 ? v[k / 2] : (v[k / 2 - 1] + v[k / 2]) / 2.0;
  }
};

struct ReproduceReport {
  std::vector<ArmReport> arms;
  std::vector<std::string> files;  // relative names, in write order
};

namespace detail {

// Linear-interpolation quantile of sorted values (the R/NumPy default rule).
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (sorted.size() == 1) return sorted[0];
  double pos = q * static_cast<double>(sorted.size() - 1);
  auto lo = static_cast<std::size_t>(pos);
  if (lo >= sorted.size() - 1) return sorted.back();
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

// Column-wise band over the valid replicate rows of `curves` (R x G).
inline Band make_band(const std::vector<double>& points, const Eigen::MatrixXd& curves,
                      const std::vector<char>& valid) {
  Band band;
  band.points = points;
  const auto G = static_cast<std::size_t>(curves.cols());
  band.mean.resize(G);
  band.p01.resize(G);
  band.p99.resize(G);
  std::vector<double> col;
  for (std::size_t g = 0; g < G; ++g) {
    col.clear();
    for (Eigen::Index r = 0; r < curves.rows(); ++r)
      if (valid[static_cast<std::size_t>(r)])
        col.push_back(curves(r, static_cast<Eigen::Index>(g)));
    double sum = 0.0;
    for (double v : col) sum += v;
    band.mean[g] = col.empty() ? std::numeric_limits<double>::quiet_NaN()
                               : sum / static_cast<double>(col.size());
    std::sort(col.begin(), col.end());
    band.p01[g] = quantile_sorted(col, 0.01);
    band.p99[g] = quantile_sorted(col, 0.99);
  }
  return band;
}

struct ArmAccumulator {
  Eigen::MatrixXd mu;                // R x G1
  std::vector<Eigen::MatrixXd> psi;  // J of R x Gpsi
  Eigen::MatrixXd omega;             // R x J
  std::vector<double> sigma2;        // R (NaN where unused)
  Eigen::MatrixXd psi_l2;            // R x J
  std::vector<char> valid;
  bool with_cov = true;

  ArmAccumulator(int R, int G1, int Gpsi, int J, bool cov) : with_cov(cov) {
    mu.resize(R, G1);
    omega.resize(R, J);
    psi_l2.resize(R, J);
    sigma2.assign(static_cast<std::size_t>(R), std::numeric_limits<double>::quiet_NaN());
    valid.assign(static_cast<std::size_t>(R), 0);
    for (int j = 0; j < J; ++j) psi.emplace_back(R, Gpsi);
  }

  ArmReport finish(const std::string& label, int m, const std::vector<double>& mu_points,
                   const std::vector<double>& psi_points) const {
    ArmReport rep;
    rep.label = label;
    rep.m = m;
    rep.mu_band = make_band(mu_points, mu, valid);
    const auto J = static_cast<std::size_t>(omega.cols());
    for (std::size_t j = 0; j < J; ++j) {
      if (with_cov) rep.psi_band.push_back(make_band(psi_points, psi[j], valid));
      std::vector<double> om, l2;
      for (Eigen::Index r = 0; r < omega.rows(); ++r)
        if (valid[static_cast<std::size_t>(r)]) {
          om.push_back(omega(r, static_cast<Eigen::Index>(j)));
          l2.push_back(psi_l2(r, static_cast<Eigen::Index>(j)));
        }
      if (with_cov) {
        rep.omega.push_back(std::move(om));
        rep.psi_l2_error.push_back(std::move(l2));
      }
    }
    if (with_cov)
      for (double s : sigma2)
        if (!std::isnan(s)) rep.sigma2.push_back(s);
    for (char v : valid)
      if (!v) ++rep.failures;
    return rep;
  }
};

inline BoxSummaryRow box_row(const std::string& label, std::vector<double> values) {
  std::sort(values.begin(), values.end());
  BoxSummaryRow row;
  row.label = label;
  row.median = quantile_sorted(values, 0.5);
  row.q1 = quantile_sorted(values, 0.25);
  row.q3 = quantile_sorted(values, 0.75);
  row.p01 = quantile_sorted(values, 0.01);
  row.p99 = quantile_sorted(values, 0.99);
  return row;
}

inline void write_arm_files(const ArmReport& arm, const std::string& outdir,
                            std::vector<std::string>& files) {
  std::string mu_name = "mu_band_" + arm.label + ".csv";
  write_band_csv(outdir + "/" + mu_name, arm.mu_band.points, arm.mu_band.mean, arm.mu_band.p01,
                 arm.mu_band.p99);
  files.push_back(mu_name);
  for (std::size_t j = 0; j < arm.psi_band.size(); ++j) {
    std::string name = "psi" + std::to_string(j + 1) + "_band_" + arm.label + ".csv";
    const Band& b = arm.psi_band[j];
    write_band_csv(outdir + "/" + name, b.points, b.mean, b.p01, b.p99);
    files.push_back(name);
  }
  if (!arm.omega.empty()) {
    std::vector<BoxSummaryRow> rows;
    for (std::size_t j = 0; j < arm.omega.size(); ++j)
      rows.push_back(box_row("omega" + std::to_string(j + 1), arm.omega[j]));
    if (!arm.sigma2.empty()) rows.push_back(box_row("sigma2", arm.sigma2));
    for (std::size_t j = 0; j < arm.psi_l2_error.size(); ++j)
      rows.push_back(box_row("psi" + std::to_string(j + 1) + "_l2_error", arm.psi_l2_error[j]));
    std::string name = "box_" + arm.label + ".csv";
    write_box_summary_csv(outdir + "/" + name, rows);
    files.push_back(name);
  }
}

inline void write_manifest(const std::string& command, const ReproduceOptions& opts,
                           const ReproduceReport& report) {
  ordered_json j;
  j["command"] = command;
  j["seed"] = opts.seed.value;
  j["replicates"] = opts.replicates;
  j["kernel"] = kernel_name(opts.kernel);
  j["grid_size_1d"] = opts.grid_size_1d;
  j["grid_size_2d"] = opts.grid_size_2d;
  ordered_json arms = ordered_json::array();
  for (const ArmReport& arm : report.arms) {
    ordered_json aj;
    aj["label"] = arm.label;
    aj["m"] = arm.m;
    if (arm.m > 0) {
      ScenarioBandwidths hs = preset_bandwidths(arm.m);
      aj["h_mu"] = hs.h_mu;
      if (arm.m >= 2) {
        aj["h_R"] = hs.h_R;
        aj["h_V"] = hs.h_V;
      }
    }
    aj["failures"] = arm.failures;
    arms.push_back(std::move(aj));
  }
  j["arms"] = std::move(arms);
  j["files"] = report.files;
  dump_json(j, opts.outdir + "/manifest.json");
}

}  // namespace detail

// Quadratic-mean KL model study: mean/component recovery across sampling
// arms m in {5, 10, 50} plus a dense-grid arm (label "minf") where sample
// moments replace kernel smoothing; optional mean-only m=1 arm.
inline ReproduceReport run_reproduce_sim1(const ReproduceOptions& opts) {
  if (opts.replicates < 1) throw InvalidDataset("replicates must be >= 1");
  const int n = 200, J = 3;
  KLModelSpec spec = simulation1_spec();
  EvaluationGrid grid1 = make_grid(spec.domain, opts.grid_size_1d);
  EvaluationGrid grid2 = make_grid(spec.domain, opts.grid_size_2d);
  ModelEigenSystem truth2 = true_eigensystem(spec, grid2, J);
  ModelEigenSystem truth1 = true_eigensystem(spec, grid1, J);
  Eigen::VectorXd w2(static_cast<Eigen::Index>(grid2.size()));
  for (std::size_t g = 0; g < grid2.size(); ++g) w2[static_cast<Eigen::Index>(g)] = grid2.weights()[g];
  Eigen::VectorXd w1(static_cast<Eigen::Index>(grid1.size()));
  for (std::size_t g = 0; g < grid1.size(); ++g) w1[static_cast<Eigen::Index>(g)] = grid1.weights()[g];

  ReproduceReport report;

  std::vector<int> arm_ms;
  if (opts.include_m1) arm_ms.push_back(1);
  arm_ms.insert(arm_ms.end(), {5, 10, 50, 0});  // 0: dense arm

  for (int m : arm_ms) {
    bool dense = m == 0;
    bool with_cov = m >= 2 || dense;
    int gpsi = dense ? opts.grid_size_1d : opts.grid_size_2d;
    detail::ArmAccumulator acc(opts.replicates, opts.grid_size_1d, gpsi, J, with_cov);
    const EvaluationGrid& psi_grid = dense ? grid1 : grid2;
    const ModelEigenSystem& psi_truth = dense ? truth1 : truth2;
    const Eigen::VectorXd& wpsi = dense ? w1 : w2;

    parallel_for(static_cast<std::size_t>(opts.replicates), opts.workers, [&](std::size_t rep) {
      // Seed tagged by the arm's m (dense arm: 0) so adding the optional m=1
      // arm does not shift the other arms' streams.
      Seed rs = derive_seed(opts.seed, static_cast<std::uint64_t>(m), rep);
      try {
        auto ri = static_cast<Eigen::Index>(rep);
        if (dense) {
          Eigen::MatrixXd X = generate_kl_dense(spec, n, grid1, rs);
          Eigen::VectorXd mu = X.colwise().mean();
          Eigen::MatrixXd centered = X.rowwise() - mu.transpose();
          Eigen::MatrixXd S = (centered.transpose() * centered) / double(n - 1);
          acc.mu.row(ri) = mu.transpose();
          EigenSystem eig = decompose_matrix(grid1, S, J);
          if (static_cast<int>(eig.retained()) < J)
            throw Error("LostComponent", "fewer components than requested");
          for (int j = 0; j < J; ++j) {
            auto ji = static_cast<std::size_t>(j);
            Eigen::VectorXd aligned =
                align_sign(eig.eigenfunctions[ji], psi_truth.eigenfunctions[ji], wpsi);
            acc.psi[ji].row(ri) = aligned.transpose();
            acc.omega(ri, j) = eig.eigenvalues[ji];
            Eigen::VectorXd diff = aligned - psi_truth.eigenfunctions[ji];
            acc.psi_l2(ri, j) = std::sqrt((wpsi.array() * diff.array().square()).sum());
          }
        } else {
          FunctionalDataset ds = generate_kl(spec, DesignSpec::fixed(n, m), rs);
          ScenarioBandwidths hs = preset_bandwidths(m);
          MeanEstimate mu1 = estimate_mean(ds, opts.kernel, hs.h_mu, grid1);
          for (std::size_t g = 0; g < grid1.size(); ++g)
            acc.mu(ri, static_cast<Eigen::Index>(g)) = mu1.values[g];
          if (with_cov) {
            MeanEstimate mu2 = estimate_mean(ds, opts.kernel, hs.h_mu, grid2);
            CovarianceEstimate cov = estimate_covariance(
                estimate_raw_covariance(ds, opts.kernel, hs.h_R, grid2), std::move(mu2));
            EigenSystem eig = decompose(cov, J);
            if (static_cast<int>(eig.retained()) < J)
              throw Error("LostComponent", "fewer components than requested");
            for (int j = 0; j < J; ++j) {
              auto ji = static_cast<std::size_t>(j);
              Eigen::VectorXd aligned =
                  align_sign(eig.eigenfunctions[ji], psi_truth.eigenfunctions[ji], wpsi);
              acc.psi[ji].row(ri) = aligned.transpose();
              acc.omega(ri, j) = eig.eigenvalues[ji];
              Eigen::VectorXd diff = aligned - psi_truth.eigenfunctions[ji];
              acc.psi_l2(ri, j) = std::sqrt((wpsi.array() * diff.array().square()).sum());
            }
            acc.sigma2[rep] =
                estimate_sigma2(ds, opts.kernel, hs.h_R, hs.h_V, grid1).sigma2;
          }
        }
        acc.valid[rep] = 1;
      } catch (const Error&) {
        acc.valid[rep] = 0;
      }
    });

    std::string label = dense ? "minf" : "m" + std::to_string(m);
    report.arms.push_back(acc.finish(label, m, grid1.points(), psi_grid.points()));
  }

  if (!opts.outdir.empty()) {
    std::filesystem::create_directories(opts.outdir);
    for (const ArmReport& arm : report.arms) detail::write_arm_files(arm, opts.outdir, report.files);
    detail::write_manifest("reproduce-sim1", opts, report);
    report.files.push_back("manifest.json");
  }
  return report;
}

// Brownian-motion study: eigenvalue/eigenfunction recovery across sampling
// arms m in {5, 10, 50} with noise variance 0.01.
inline ReproduceReport run_reproduce_sim2(const ReproduceOptions& opts) {
  if (opts.replicates < 1) throw InvalidDataset("replicates must be >= 1");
  const int n = 200, J = 3;
  BrownianModel model;
  EvaluationGrid grid1 = make_grid({0.0, 1.0}, opts.grid_size_1d);
  EvaluationGrid grid2 = make_grid({0.0, 1.0}, opts.grid_size_2d);
  ModelEigenSystem truth2 = true_eigensystem(model, grid2, J);
  Eigen::VectorXd w2(static_cast<Eigen::Index>(grid2.size()));
  for (std::size_t g = 0; g < grid2.size(); ++g) w2[static_cast<Eigen::Index>(g)] = grid2.weights()[g];

  ReproduceReport report;
  for (int m : {5, 10, 50}) {
    detail::ArmAccumulator acc(opts.replicates, opts.grid_size_1d, opts.grid_size_2d, J, true);
    parallel_for(static_cast<std::size_t>(opts.replicates), opts.workers, [&](std::size_t rep) {
      // Arm tag offset keeps these streams disjoint from the other study's
      // arms under a shared user seed.
      Seed rs = derive_seed(opts.seed, 10000 + static_cast<std::uint64_t>(m), rep);
      try {
        auto ri = static_cast<Eigen::Index>(rep);
        FunctionalDataset ds = generate_brownian(DesignSpec::fixed(n, m), model.sigma2, rs);
        ScenarioBandwidths hs = preset_bandwidths(m);
        MeanEstimate mu1 = estimate_mean(ds, opts.kernel, hs.h_mu, grid1);
        for (std::size_t g = 0; g < grid1.size(); ++g)
          acc.mu(ri, static_cast<Eigen::Index>(g)) = mu1.values[g];
        MeanEstimate mu2 = estimate_mean(ds, opts.kernel, hs.h_mu, grid2);
        CovarianceEstimate cov = estimate_covariance(
            estimate_raw_covariance(ds, opts.kernel, hs.h_R, grid2), std::move(mu2));
        EigenSystem eig = decompose(cov, J);
        if (static_cast<int>(eig.retained()) < J)
          throw Error("LostComponent", "fewer components than requested");
        for (int j = 0; j < J; ++j) {
          auto ji = static_cast<std::size_t>(j);
          Eigen::VectorXd aligned =
              align_sign(eig.eigenfunctions[ji], truth2.eigenfunctions[ji], w2);
          acc.psi[ji].row(ri) = aligned.transpose();
          acc.omega(ri, j) = eig.eigenvalues[ji];
          Eigen::VectorXd diff = aligned - truth2.eigenfunctions[ji];
          acc.psi_l2(ri, j) = std::sqrt((w2.array() * diff.array().square()).sum());
        }
        acc.valid[rep] = 1;
      } catch (const Error&) {
        acc.valid[rep] = 0;
      }
    });
    report.arms.push_back(
        acc.finish("m" + std::to_string(m), m, grid1.points(), grid2.points()));
  }

  if (!opts.outdir.empty()) {
    std::filesystem::create_directories(opts.outdir);
    for (const ArmReport& arm : report.arms) detail::write_arm_files(arm, opts.outdir, report.files);
    detail::write_manifest("reproduce-sim2", opts, report);
    report.files.push_back("manifest.json");
  }
  return report;
}

}  // namespace llfpca
