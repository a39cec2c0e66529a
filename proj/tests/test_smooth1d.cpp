#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"

using namespace llfpca;

namespace {
const KernelSpec kEpan = kernel_by_name("epanechnikov");
}

TEST_CASE("constant responses are reproduced exactly", "[smooth1d]") {
  auto ds = testutil::make_ds({{{0.1, 3.0}, {0.4, 3.0}, {0.9, 3.0}}, {{0.3, 3.0}, {0.6, 3.0}}});
  for (double t : {0.0, 0.25, 0.5, 1.0})
    CHECK(local_linear_fit(ds, kEpan, 0.8, t, ResponseTransform::Identity) ==
          Catch::Approx(3.0).margin(1e-12));
}

TEST_CASE("affine responses are reproduced exactly, including at boundaries", "[smooth1d]") {
  CounterRng rng(Seed{11});
  auto ds = testutil::random_design(rng, 30, 2, 6, [](double t) { return 2.0 * t + 1.0; });
  for (double t : {0.0, 0.1, 0.5, 0.93, 1.0}) {
    double fit = local_linear_fit(ds, kEpan, 0.25, t, ResponseTransform::Identity);
    CHECK(fit == Catch::Approx(2.0 * t + 1.0).margin(1e-10));
  }
}

TEST_CASE("three-observation fit matches the dense normal-equation solve", "[smooth1d]") {
  auto ds = testutil::make_ds({{{0.4, 1.0}, {0.6, 2.0}}, {{0.5, 1.5}}});
  double fit = local_linear_fit(ds, kEpan, 0.3, 0.5, ResponseTransform::Identity);
  // Symmetric design around t: the fit reduces to the weighted average 1.5.
  CHECK(fit == Catch::Approx(1.5).margin(1e-14));
  CHECK(fit == Catch::Approx(testutil::oracle_fit_1d(ds, kEpan, 0.3, 0.5)).margin(1e-12));
}

TEST_CASE("closed form agrees with dense solve on random designs", "[smooth1d][property]") {
  CounterRng rng(Seed{2024});
  for (int rep = 0; rep < 20; ++rep) {
    CounterRng sub = rng.split(static_cast<unsigned long long>(rep));
    auto noise = [&sub](double t) { return std::sin(6.0 * t) + sub.normal(0.0, 0.3); };
    auto ds = testutil::random_design(sub, 12, 1, 5, noise);
    double h = 0.15 + 0.1 * sub.uniform01();
    for (double t : {0.2, 0.5, 0.8}) {
      double fit;
      try {
        fit = local_linear_fit(ds, kEpan, h, t, ResponseTransform::Identity);
      } catch (const DegenerateWindow&) {
        continue;
      }
      CHECK(fit == Catch::Approx(testutil::oracle_fit_1d(ds, kEpan, h, t)).margin(1e-10));
    }
  }
}

TEST_CASE("squared-response smoothing matches dense solve on squares", "[smooth1d]") {
  CounterRng rng(Seed{7});
  auto ds = testutil::random_design(rng, 15, 2, 4,
                                    [&rng](double t) { return t + rng.normal(0.0, 0.5); });
  for (double t : {0.3, 0.6}) {
    double fit = local_linear_fit(ds, kEpan, 0.3, t, ResponseTransform::Square);
    CHECK(fit == Catch::Approx(testutil::oracle_fit_1d(ds, kEpan, 0.3, t, true)).margin(1e-10));
  }
  auto flat = testutil::make_ds({{{0.2, 2.0}, {0.5, 2.0}}, {{0.4, 2.0}, {0.8, 2.0}}});
  CHECK(local_linear_fit(flat, kEpan, 0.9, 0.5, ResponseTransform::Square) ==
        Catch::Approx(4.0).margin(1e-12));
}

TEST_CASE("duplicating an observation within a curve leaves the fit unchanged",
          "[smooth1d][property]") {
  // Each curve's weight 1/(n m_i) spreads over duplicates, so a curve that
  // repeats every point keeps the same total contribution.
  std::vector<std::vector<std::pair<double, double>>> base = {
      {{0.2, 1.0}, {0.45, 0.5}}, {{0.5, 2.0}, {0.7, 1.2}, {0.35, 0.9}}};
  auto ds = testutil::make_ds(base);
  auto doubled_pts = base;
  for (auto& c : doubled_pts) {
    auto copy = c;
    c.insert(c.end(), copy.begin(), copy.end());
  }
  auto doubled = testutil::make_ds(doubled_pts);
  for (double t : {0.3, 0.5}) {
    double a = local_linear_fit(ds, kEpan, 0.4, t, ResponseTransform::Identity);
    double b = local_linear_fit(doubled, kEpan, 0.4, t, ResponseTransform::Identity);
    CHECK(a == Catch::Approx(b).margin(1e-12));
  }
}

TEST_CASE("replicating every curve leaves the fit unchanged", "[smooth1d][property]") {
  CounterRng rng(Seed{31});
  auto ds = testutil::random_design(rng, 8, 2, 4, [](double t) { return std::cos(3.0 * t); });
  std::vector<Curve> twice;
  for (const Curve& c : ds.curves()) twice.push_back(c);
  for (const Curve& c : ds.curves()) {
    Curve d = c;
    d.id += "_copy";
    twice.push_back(std::move(d));
  }
  FunctionalDataset ds2(ds.domain(), std::move(twice));
  for (double t : {0.25, 0.6, 0.9}) {
    double a = local_linear_fit(ds, kEpan, 0.35, t, ResponseTransform::Identity);
    double b = local_linear_fit(ds2, kEpan, 0.35, t, ResponseTransform::Identity);
    CHECK(a == Catch::Approx(b).margin(1e-12));
  }
}

TEST_CASE("observations outside the window cannot affect the fit", "[smooth1d][property]") {
  std::vector<std::vector<std::pair<double, double>>> pts = {
      {{0.45, 1.0}, {0.55, 2.0}, {0.95, 7.0}}, {{0.5, 1.5}, {0.05, -3.0}}};
  auto ds = testutil::make_ds(pts);
  double before = local_linear_fit(ds, kEpan, 0.2, 0.5, ResponseTransform::Identity);
  auto perturbed = pts;
  perturbed[0][2].second = 1e6;
  perturbed[1][1].second = -1e6;
  double after = local_linear_fit(testutil::make_ds(perturbed), kEpan, 0.2, 0.5,
                                  ResponseTransform::Identity);
  CHECK(before == after);  // bitwise: off-window points are skipped entirely
}

TEST_CASE("degenerate windows are reported", "[smooth1d]") {
  auto one_time = testutil::make_ds({{{0.5, 1.0}}, {{0.5, 2.0}}});
  CHECK_THROWS_AS(local_linear_fit(one_time, kEpan, 0.1, 0.5, ResponseTransform::Identity),
                  DegenerateWindow);
  auto far = testutil::make_ds({{{0.9, 1.0}, {0.95, 2.0}}});
  CHECK_THROWS_AS(local_linear_fit(far, kEpan, 0.05, 0.1, ResponseTransform::Identity),
                  DegenerateWindow);
  try {
    local_linear_fit(far, kEpan, 0.05, 0.1, ResponseTransform::Identity);
    FAIL("expected DegenerateWindow");
  } catch (const DegenerateWindow& e) {
    CHECK(e.t == 0.1);
  }
}

TEST_CASE("nonpositive bandwidths are rejected", "[smooth1d]") {
  auto ds = testutil::make_ds({{{0.4, 1.0}, {0.6, 2.0}}});
  CHECK_THROWS_AS(local_linear_fit(ds, kEpan, 0.0, 0.5, ResponseTransform::Identity),
                  NonpositiveBandwidth);
  CHECK_THROWS_AS(estimate_mean(ds, kEpan, -0.3, make_grid({0.0, 1.0}, 5)),
                  NonpositiveBandwidth);
}

TEST_CASE("grid estimators evaluate the pointwise fit", "[smooth1d]") {
  CounterRng rng(Seed{99});
  auto ds = testutil::random_design(rng, 25, 3, 6, [](double t) { return 4.0 * t - 1.0; });
  EvaluationGrid grid = make_grid({0.0, 1.0}, 21);
  MeanEstimate mu = estimate_mean(ds, kEpan, 0.3, grid);
  VarianceFunctionEstimate vf = estimate_variance_function(ds, kEpan, 0.3, grid);
  REQUIRE(mu.values.size() == grid.size());
  REQUIRE(vf.values.size() == grid.size());
  CHECK(mu.bandwidth == 0.3);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double t = grid.points()[g];
    CHECK(mu.values[g] ==
          local_linear_fit(ds, kEpan, 0.3, t, ResponseTransform::Identity));
    CHECK(vf.values[g] == local_linear_fit(ds, kEpan, 0.3, t, ResponseTransform::Square));
    CHECK(mu.values[g] == Catch::Approx(4.0 * t - 1.0).margin(1e-9));
  }
}
