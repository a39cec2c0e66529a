// Command-line front end: estimation, FPCA, simulation, rate studies, and
// the bundled Monte Carlo reproduction studies.

#include <CLI11.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "llfpca/llfpca.hpp"

namespace {

using llfpca::ordered_json;

// Invalid or incomplete invocation; maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& msg) {
  if (!cond) throw UsageError(msg);
}

nlohmann::json load_config_file(const std::string& path) {
  return llfpca::detail::load_json(path);
}

// Config-file merge: a key fills its option only when the flag was not given
// on the command line (flags win).
template <class T>
void merge(const CLI::App& sub, const nlohmann::json& cfg, const std::string& opt,
           const std::string& key, T& var) {
  if (!cfg.is_object() || !cfg.contains(key)) return;
  if (sub.count(opt) > 0) return;
  try {
    var = cfg.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config key '" + key + "': " + e.what());
  }
}

std::string ensure_outdir(const std::string& out) {
  require(!out.empty(), "--out is required");
  std::filesystem::create_directories(out);
  return out;
}

llfpca::FunctionalDataset load_input(const std::string& input, double dom_min, double dom_max) {
  require(!input.empty(), "--input is required");
  bool has_min = !std::isnan(dom_min), has_max = !std::isnan(dom_max);
  require(has_min == has_max, "--domain-min and --domain-max must be given together");
  std::optional<llfpca::Interval> domain;
  if (has_min) domain = llfpca::Interval{dom_min, dom_max};
  return llfpca::load_csv(input, domain);
}

struct CommonOpts {
  std::string config;
  std::string input;
  std::string out;
  std::string kernel = "epanechnikov";
  double h_mu = 0.0, h_r = 0.0, h_v = 0.0;
  int grid = 101;
  int grid2 = 51;
  int components = 3;
  double dom_min = std::numeric_limits<double>::quiet_NaN();
  double dom_max = std::numeric_limits<double>::quiet_NaN();
};

void add_common_estimation_flags(CLI::App* sub, CommonOpts& o, bool with_grid1,
                                 bool with_grid2) {
  sub->add_option("--config", o.config, "JSON config file; command-line flags win");
  sub->add_option("--input", o.input, "input CSV (curve_id,t,y)");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--kernel", o.kernel, "epanechnikov | triangular | uniform");
  if (with_grid1) sub->add_option("--grid", o.grid, "evaluation grid size");
  if (with_grid2) sub->add_option("--grid2", o.grid2, "surface grid size per axis");
  sub->add_option("--domain-min", o.dom_min, "explicit domain lower endpoint");
  sub->add_option("--domain-max", o.dom_max, "explicit domain upper endpoint");
}

void merge_common(const CLI::App& sub, const nlohmann::json& cfg, CommonOpts& o) {
  merge(sub, cfg, "--input", "input", o.input);
  merge(sub, cfg, "--out", "out", o.out);
  merge(sub, cfg, "--kernel", "kernel", o.kernel);
  merge(sub, cfg, "--h-mu", "h_mu", o.h_mu);
  merge(sub, cfg, "--h-r", "h_r", o.h_r);
  merge(sub, cfg, "--h-v", "h_v", o.h_v);
  merge(sub, cfg, "--grid", "grid", o.grid);
  merge(sub, cfg, "--grid2", "grid2", o.grid2);
  merge(sub, cfg, "--components", "components", o.components);
  merge(sub, cfg, "--domain-min", "domain_min", o.dom_min);
  merge(sub, cfg, "--domain-max", "domain_max", o.dom_max);
}

int run_estimate_mean(const CLI::App& sub, CommonOpts& o) {
  nlohmann::json cfg;
  if (!o.config.empty()) cfg = load_config_file(o.config);
  merge_common(sub, cfg, o);
  require(o.h_mu > 0.0, "--h-mu must be positive");
  auto ds = load_input(o.input, o.dom_min, o.dom_max);
  auto kernel = llfpca::kernel_by_name(o.kernel);
  auto grid = llfpca::make_grid(ds.domain(), o.grid);
  llfpca::MeanEstimate est = llfpca::estimate_mean(ds, kernel, o.h_mu, grid);
  std::string out = ensure_outdir(o.out);
  llfpca::write_curve_csv(out + "/mean.csv", "mu_hat", grid.points(), est.values);
  llfpca::write_mean_json(out + "/mean.json", est);
  return 0;
}

int run_estimate_cov(const CLI::App& sub, CommonOpts& o) {
  nlohmann::json cfg;
  if (!o.config.empty()) cfg = load_config_file(o.config);
  merge_common(sub, cfg, o);
  require(o.h_r > 0.0, "--h-r must be positive");
  require(o.h_mu > 0.0, "--h-mu must be positive");
  auto ds = load_input(o.input, o.dom_min, o.dom_max);
  auto kernel = llfpca::kernel_by_name(o.kernel);
  auto grid = llfpca::make_grid(ds.domain(), o.grid2);
  auto mean = llfpca::estimate_mean(ds, kernel, o.h_mu, grid);
  auto raw = llfpca::estimate_raw_covariance(ds, kernel, o.h_r, grid);
  auto cov = llfpca::estimate_covariance(std::move(raw), std::move(mean));
  std::string out = ensure_outdir(o.out);
  llfpca::write_curve_csv(out + "/mu.csv", "mu_hat", grid.points(), cov.mean.values);
  llfpca::write_surface_csv(out + "/c_hat.csv", grid, cov.raw.values);
  llfpca::write_surface_csv(out + "/r_hat.csv", grid, cov.values);
  ordered_json j;
  j["grid"] = grid.points();
  j["h_r"] = o.h_r;
  j["h_mu"] = o.h_mu;
  j["mu"] = cov.mean.values;
  j["c_hat"] = llfpca::surface_to_json(grid, cov.raw.values)["values"];
  j["r_hat"] = llfpca::surface_to_json(grid, cov.values)["values"];
  llfpca::detail::dump_json(j, out + "/cov.json");
  return 0;
}

int run_fpca(const CLI::App& sub, CommonOpts& o) {
  nlohmann::json cfg;
  if (!o.config.empty()) cfg = load_config_file(o.config);
  merge_common(sub, cfg, o);
  require(o.h_r > 0.0, "--h-r must be positive");
  require(o.h_mu > 0.0, "--h-mu must be positive");
  require(o.components >= 1, "--components must be >= 1");
  auto ds = load_input(o.input, o.dom_min, o.dom_max);
  auto kernel = llfpca::kernel_by_name(o.kernel);
  auto grid = llfpca::make_grid(ds.domain(), o.grid2);
  auto mean = llfpca::estimate_mean(ds, kernel, o.h_mu, grid);
  auto raw = llfpca::estimate_raw_covariance(ds, kernel, o.h_r, grid);
  auto cov = llfpca::estimate_covariance(std::move(raw), std::move(mean));
  auto eig = llfpca::decompose(cov, o.components);
  std::string out = ensure_outdir(o.out);
  llfpca::write_eigensystem_json(out + "/eigen.json", eig);
  llfpca::write_eigensystem_csv(out + "/eigen.csv", eig);
  return 0;
}

int run_sigma2(const CLI::App& sub, CommonOpts& o) {
  nlohmann::json cfg;
  if (!o.config.empty()) cfg = load_config_file(o.config);
  merge_common(sub, cfg, o);
  require(o.h_r > 0.0, "--h-r must be positive");
  require(o.h_v > 0.0, "--h-v must be positive");
  auto ds = load_input(o.input, o.dom_min, o.dom_max);
  auto kernel = llfpca::kernel_by_name(o.kernel);
  auto grid = llfpca::make_grid(ds.domain(), o.grid);
  llfpca::ErrorVarianceEstimate est = llfpca::estimate_sigma2(ds, kernel, o.h_r, o.h_v, grid);
  std::string out = ensure_outdir(o.out);
  ordered_json j;
  j["sigma2"] = est.sigma2;
  j["integral_variance_fn"] = est.integral_variance_fn;
  j["integral_cov_diagonal"] = est.integral_cov_diagonal;
  j["negative"] = est.negative;
  llfpca::detail::dump_json(j, out + "/sigma2.json");
  return 0;
}

struct SimulateOpts {
  std::string config, model = "sim1", out;
  int n = 200, m = 5;
  double sigma2 = 0.01;  // brownian only
  std::uint64_t seed = 0;
};

int run_simulate(const CLI::App& sub, SimulateOpts& o) {
  nlohmann::json cfg;
  if (!o.config.empty()) cfg = load_config_file(o.config);
  merge(sub, cfg, "--model", "model", o.model);
  merge(sub, cfg, "--out", "out", o.out);
  merge(sub, cfg, "--n", "n", o.n);
  merge(sub, cfg, "--m", "m", o.m);
  merge(sub, cfg, "--sigma2", "sigma2", o.sigma2);
  merge(sub, cfg, "--seed", "seed", o.seed);
  require(o.n >= 1, "--n must be >= 1");
  require(o.m >= 1, "--m must be >= 1");
  auto design = llfpca::DesignSpec::fixed(o.n, o.m);
  std::optional<llfpca::FunctionalDataset> ds;
  if (o.model == "sim1")
    ds = llfpca::generate_kl(llfpca::simulation1_spec(), design, llfpca::Seed{o.seed});
  else if (o.model == "brownian")
    ds = llfpca::generate_brownian(design, o.sigma2, llfpca::Seed{o.seed});
  else
    throw UsageError("--model must be sim1 or brownian");
  std::string out = ensure_outdir(o.out);
  llfpca::save_csv(*ds, out + "/dataset.csv");
  return 0;
}

struct RateStudyOpts {
  std::string config, scenario = "all", scenario_file, out;
  int replicates = 50;
  std::uint64_t seed = 0;
  unsigned workers = llfpca::worker_count_from_env();
};

llfpca::Scenario scenario_from_json(const nlohmann::json& j) {
  auto power_rule = [](const nlohmann::json& p) {
    double coef = p.at("coef").get<double>();
    double expo = p.value("exponent", 0.0);
    return std::pair<double, double>(coef, expo);
  };
  llfpca::Scenario sc;
  sc.name = j.at("name").get<std::string>();
  std::string regime = j.at("regime").get<std::string>();
  sc.regime = regime == "dense"   ? llfpca::Regime::Dense
              : regime == "mixed" ? llfpca::Regime::Mixed
                                  : llfpca::Regime::Sparse;
  std::string target = j.at("target").get<std::string>();
  if (target == "mean-sup") sc.target = llfpca::RateTarget::MeanSup;
  else if (target == "cov-sup") sc.target = llfpca::RateTarget::CovSup;
  else if (target == "sigma2") sc.target = llfpca::RateTarget::Sigma2;
  else if (target == "eigenvalue") sc.target = llfpca::RateTarget::EigvalJ;
  else if (target == "eigenfunction-sup") sc.target = llfpca::RateTarget::EigfunSupJ;
  else if (target == "eigenfunction-l2") sc.target = llfpca::RateTarget::EigfunL2J;
  else throw UsageError("unknown scenario target '" + target + "'");
  sc.n_list = j.at("n_list").get<std::vector<int>>();
  auto [mc, me] = power_rule(j.at("m_rule"));
  sc.m_rule = [mc, me](int n) {
    return std::max(1, static_cast<int>(std::ceil(mc * std::pow(n, me))));
  };
  const auto& bw = j.at("bandwidths");
  auto [muc, mue] = power_rule(bw.at("h_mu"));
  std::pair<double, double> rc{0.0, 0.0}, vc{0.0, 0.0};
  if (bw.contains("h_r")) rc = power_rule(bw.at("h_r"));
  if (bw.contains("h_v")) vc = power_rule(bw.at("h_v"));
  sc.bandwidths = [muc, mue, rc, vc](int n) {
    auto h = [n](std::pair<double, double> p) {
      return p.first == 0.0 ? 0.0 : p.first * std::pow(n, p.second);
    };
    return llfpca::ScenarioBandwidths{h({muc, mue}), h(rc), h(vc)};
  };
  bool needs_2d = sc.target != llfpca::RateTarget::MeanSup;
  sc.bandwidth_exponent = needs_2d && rc.first != 0.0 ? rc.second : mue;
  sc.replicates = j.value("replicates", 50);
  std::string model = j.value("model", std::string("sim1"));
  if (model == "sim1") sc.model = llfpca::ModelKind::Sim1;
  else if (model == "brownian") sc.model = llfpca::ModelKind::Brownian;
  else throw UsageError("unknown scenario model '" + model + "'");
  sc.component = j.value("component", 1);
  sc.grid_size_1d = j.value("grid", 101);
  sc.grid_size_2d = j.value("grid2", 51);
  sc.trim_boundary = j.value("trim_boundary", false);
  return sc;
}

int run_rate_study(const CLI::App& sub, RateStudyOpts& o) {
  nlohmann::json cfg;
  if (!o.config.empty()) cfg = load_config_file(o.config);
  merge(sub, cfg, "--scenario", "scenario", o.scenario);
  merge(sub, cfg, "--scenario-file", "scenario_file", o.scenario_file);
  merge(sub, cfg, "--out", "out", o.out);
  merge(sub, cfg, "--replicates", "replicates", o.replicates);
  merge(sub, cfg, "--seed", "seed", o.seed);
  merge(sub, cfg, "--workers", "workers", o.workers);
  require(o.replicates >= 1, "--replicates must be >= 1");

  std::vector<llfpca::Scenario> to_run;
  if (!o.scenario_file.empty()) {
    to_run.push_back(scenario_from_json(llfpca::detail::load_json(o.scenario_file)));
  } else {
    auto bundled = llfpca::shipped_scenarios(o.replicates);
    if (o.scenario == "all") {
      to_run = bundled;
    } else {
      to_run.push_back(llfpca::find_scenario(bundled, o.scenario));
    }
  }
  std::string out = ensure_outdir(o.out);
  for (llfpca::Scenario& sc : to_run) {
    if (!o.scenario_file.empty()) sc.replicates = o.replicates;
    llfpca::RateStudyReport report = llfpca::run_scenario(sc, llfpca::Seed{o.seed}, o.workers);
    llfpca::detail::dump_json(llfpca::rate_report_to_json(report),
                              out + "/rate_" + sc.name + ".json");
    llfpca::write_rate_report_csv(out + "/rate_" + sc.name + ".csv", report);
  }
  return 0;
}

struct ReproduceCliOpts {
  std::string config, out;
  int replicates = 50;
  bool full = false;
  bool include_m1 = false;
  std::uint64_t seed = 20240101;
  unsigned workers = llfpca::worker_count_from_env();
  int grid = 101, grid2 = 51;
  std::string kernel = "epanechnikov";
};

int run_reproduce(const CLI::App& sub, ReproduceCliOpts& o, bool second_study) {
  nlohmann::json cfg;
  if (!o.config.empty()) cfg = load_config_file(o.config);
  merge(sub, cfg, "--out", "out", o.out);
  merge(sub, cfg, "--replicates", "replicates", o.replicates);
  merge(sub, cfg, "--full", "full", o.full);
  if (!second_study) merge(sub, cfg, "--include-m1", "include_m1", o.include_m1);
  merge(sub, cfg, "--seed", "seed", o.seed);
  merge(sub, cfg, "--workers", "workers", o.workers);
  merge(sub, cfg, "--grid", "grid", o.grid);
  merge(sub, cfg, "--grid2", "grid2", o.grid2);
  merge(sub, cfg, "--kernel", "kernel", o.kernel);
  require(o.replicates >= 1, "--replicates must be >= 1");

  llfpca::ReproduceOptions opts;
  opts.outdir = ensure_outdir(o.out);
  opts.replicates = o.full ? 200 : o.replicates;
  opts.seed = llfpca::Seed{o.seed};
  opts.workers = o.workers;
  opts.include_m1 = o.include_m1;
  opts.grid_size_1d = o.grid;
  opts.grid_size_2d = o.grid2;
  opts.kernel = llfpca::kernel_by_name(o.kernel);
  if (second_study)
    llfpca::run_reproduce_sim2(opts);
  else
    llfpca::run_reproduce_sim1(opts);
  return 0;
}

ordered_json error_record(const llfpca::Error& e) {
  ordered_json j;
  j["error"] = e.kind();
  j["message"] = e.what();
  if (const auto* dw = dynamic_cast<const llfpca::DegenerateWindow*>(&e)) {
    j["location"] = {{"t", dw->t}};
  } else if (const auto* dsw = dynamic_cast<const llfpca::DegenerateSurfaceWindow*>(&e)) {
    j["location"] = {{"s", dsw->s}, {"t", dsw->t}};
  }
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"llfpca: local-linear mean/covariance smoothing and functional PCA"};
  app.require_subcommand(1);

  CommonOpts mean_o, cov_o, fpca_o, sig_o;
  SimulateOpts sim_o;
  RateStudyOpts rate_o;
  ReproduceCliOpts rep1_o, rep2_o;

  CLI::App* c_mean = app.add_subcommand("estimate-mean", "local-linear mean function estimate");
  add_common_estimation_flags(c_mean, mean_o, true, false);
  c_mean->add_option("--h-mu", mean_o.h_mu, "mean bandwidth");

  CLI::App* c_cov = app.add_subcommand("estimate-cov", "covariance surface estimate");
  add_common_estimation_flags(c_cov, cov_o, false, true);
  c_cov->add_option("--h-r", cov_o.h_r, "surface bandwidth");
  c_cov->add_option("--h-mu", cov_o.h_mu, "mean bandwidth");

  CLI::App* c_fpca = app.add_subcommand("fpca", "functional principal component analysis");
  add_common_estimation_flags(c_fpca, fpca_o, false, true);
  c_fpca->add_option("--h-r", fpca_o.h_r, "surface bandwidth");
  c_fpca->add_option("--h-mu", fpca_o.h_mu, "mean bandwidth");
  c_fpca->add_option("--components", fpca_o.components, "components to retain");

  CLI::App* c_sig = app.add_subcommand("sigma2", "error variance estimate");
  add_common_estimation_flags(c_sig, sig_o, true, false);
  c_sig->add_option("--h-r", sig_o.h_r, "surface bandwidth");
  c_sig->add_option("--h-v", sig_o.h_v, "squared-response bandwidth");

  CLI::App* c_sim = app.add_subcommand("simulate", "generate a synthetic dataset CSV");
  c_sim->add_option("--config", sim_o.config, "JSON config file; command-line flags win");
  c_sim->add_option("--model", sim_o.model, "sim1 | brownian");
  c_sim->add_option("--n", sim_o.n, "number of curves");
  c_sim->add_option("--m", sim_o.m, "observations per curve");
  c_sim->add_option("--sigma2", sim_o.sigma2, "noise variance (brownian model)");
  c_sim->add_option("--seed", sim_o.seed, "random seed");
  c_sim->add_option("--out", sim_o.out, "output directory");

  CLI::App* c_rate = app.add_subcommand("rate-study", "Monte Carlo convergence-rate study");
  c_rate->add_option("--config", rate_o.config, "JSON config file; command-line flags win");
  c_rate->add_option("--scenario", rate_o.scenario,
                     "bundled scenario name or 'all' (see --list-scenarios)");
  c_rate->add_option("--scenario-file", rate_o.scenario_file, "custom scenario JSON");
  c_rate->add_option("--replicates", rate_o.replicates, "replicates per sample size");
  c_rate->add_option("--seed", rate_o.seed, "random seed");
  c_rate->add_option("--workers", rate_o.workers, "worker threads");
  c_rate->add_option("--out", rate_o.out, "output directory");
  bool list_scenarios = false;
  c_rate->add_flag("--list-scenarios", list_scenarios, "print bundled scenario names and exit");

  CLI::App* c_rep1 = app.add_subcommand("reproduce-sim1", "quadratic-mean KL model study");
  c_rep1->add_option("--config", rep1_o.config, "JSON config file; command-line flags win");
  c_rep1->add_option("--out", rep1_o.out, "output directory");
  c_rep1->add_option("--replicates", rep1_o.replicates, "Monte Carlo replicates");
  c_rep1->add_flag("--full", rep1_o.full, "run 200 replicates");
  c_rep1->add_flag("--include-m1", rep1_o.include_m1, "add the mean-only m=1 arm");
  c_rep1->add_option("--seed", rep1_o.seed, "random seed");
  c_rep1->add_option("--workers", rep1_o.workers, "worker threads");
  c_rep1->add_option("--grid", rep1_o.grid, "curve grid size");
  c_rep1->add_option("--grid2", rep1_o.grid2, "surface grid size per axis");
  c_rep1->add_option("--kernel", rep1_o.kernel, "kernel family");

  CLI::App* c_rep2 = app.add_subcommand("reproduce-sim2", "Brownian-motion study");
  c_rep2->add_option("--config", rep2_o.config, "JSON config file; command-line flags win");
  c_rep2->add_option("--out", rep2_o.out, "output directory");
  c_rep2->add_option("--replicates", rep2_o.replicates, "Monte Carlo replicates");
  c_rep2->add_flag("--full", rep2_o.full, "run 200 replicates");
  c_rep2->add_option("--seed", rep2_o.seed, "random seed");
  c_rep2->add_option("--workers", rep2_o.workers, "worker threads");
  c_rep2->add_option("--grid", rep2_o.grid, "curve grid size");
  c_rep2->add_option("--grid2", rep2_o.grid2, "surface grid size per axis");
  c_rep2->add_option("--kernel", rep2_o.kernel, "kernel family");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (c_mean->parsed()) return run_estimate_mean(*c_mean, mean_o);
    if (c_cov->parsed()) return run_estimate_cov(*c_cov, cov_o);
    if (c_fpca->parsed()) return run_fpca(*c_fpca, fpca_o);
    if (c_sig->parsed()) return run_sigma2(*c_sig, sig_o);
    if (c_sim->parsed()) return run_simulate(*c_sim, sim_o);
    if (c_rate->parsed()) {
      if (list_scenarios) {
        for (const auto& sc : llfpca::shipped_scenarios()) std::cout << sc.name << '\n';
        return 0;
      }
      return run_rate_study(*c_rate, rate_o);
    }
    if (c_rep1->parsed()) return run_reproduce(*c_rep1, rep1_o, false);
    if (c_rep2->parsed()) return run_reproduce(*c_rep2, rep2_o, true);
    throw UsageError("no subcommand given");
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const llfpca::Error& e) {
    std::cout << error_record(e).dump(2) << std::endl;
    return 1;
  } catch (const std::exception& e) {
    ordered_json j;
    j["error"] = "Internal";
    j["message"] = e.what();
    std::cout << j.dump(2) << std::endl;
    return 1;
  }
}
