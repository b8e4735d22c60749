#include <doctest.h>

#include <cmath>
#include <random>

#include "spotvol/errors.hpp"
#include "spotvol/plugin.hpp"
#include "spotvol/simulator.hpp"
#include "support.hpp"

using namespace spotvol;
using namespace spotvol::plugin;

namespace {

sim::ModelParams constant_model(double v) {
  sim::ModelParams mp;
  mp.model = sim::Model::Constant;
  mp.constant.variance = v;
  return mp;
}

}  // namespace

TEST_CASE("noise variance") {
  PricePath p = testsupport::constant_path(100, 1.0, 0.0);
  for (std::size_t i = 0; i < p.logprices.size(); ++i) p.logprices[i] = 0.003 * double(i);
  CHECK(noise_variance(p) == doctest::Approx(0.003 * 0.003 / 2).epsilon(1e-12));

  // Pure noise: E[delta^2] = 2 xi, so the estimator is centred on xi.
  const double xi = 1e-8;
  std::vector<double> v;
  for (std::uint64_t r = 0; r < 300; ++r) {
    std::mt19937_64 rng(sim::derive_seed(9, r));
    std::normal_distribution<double> z(0.0, std::sqrt(xi));
    PricePath q = testsupport::constant_path(23400, 23400.0, 0.0);
    for (double& x : q.logprices) x = z(rng);
    v.push_back(noise_variance(q));
  }
  const double se = testsupport::sample_sd(v) / std::sqrt(double(v.size()));
  CHECK(std::abs(testsupport::mean(v) - xi) < 3 * se);
}

TEST_CASE("noise variance of a clean path decays like 1/n") {
  const auto mp = constant_model(1e-4);
  std::vector<double> x, y;
  for (int e = 8; e <= 14; ++e) {
    const std::size_t n = std::size_t(1) << e;
    double s = 0.0;
    for (std::uint64_t r = 0; r < 20; ++r) s += noise_variance(sim::simulate(mp, n, 23400.0, r).prices);
    x.push_back(std::log(double(n)));
    y.push_back(std::log(s / 20));
  }
  // slope of log value on log n
  double mx = testsupport::mean(x), my = testsupport::mean(y), sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  CHECK(sxy / sxx == doctest::Approx(-1.0).epsilon(0.05));
}

TEST_CASE("noise variance ignores a slow linear trend") {
  sim::ModelParams mp = constant_model(1e-4);
  auto s = sim::add_noise(sim::simulate(mp, 23400, 23400.0, 3), 2.0, 3);
  PricePath q = s.noisy_prices;
  const double slope = 1e-3 / std::sqrt(23400.0) / 23400.0;  // o(1/sqrt(n)) per step
  for (std::size_t i = 0; i < q.logprices.size(); ++i) q.logprices[i] += slope * double(i);
  CHECK(noise_variance(q) == doctest::Approx(noise_variance(s.noisy_prices)).epsilon(1e-3));
}

TEST_CASE("integrated variance") {
  const PricePath p = testsupport::random_path(512, 1.0, 0.01, 3);
  CHECK(std::abs(integrated_variance(p, 256) - testsupport::nyquist_c0_oracle(p)) < 1e-14);
  CHECK(integrated_variance(testsupport::constant_path(64, 1.0), 8) == 0.0);
  CHECK_THROWS_AS(integrated_variance(p, 0), ValidationError);
  CHECK_THROWS_AS(integrated_variance(p, 512), ValidationError);
}

TEST_CASE("integrated variance on noisy Heston paths is nearly unbiased") {
  sim::ModelParams mp;
  mp.model = sim::Model::Heston;
  std::vector<double> rel;
  for (std::uint64_t r = 0; r < 200; ++r) {
    auto s = sim::add_noise(sim::simulate(mp, 23400, 23400.0, sim::derive_seed(5, r)), 2.0,
                            sim::derive_seed(5, r));
    double truth = 0.0;
    const auto& v = s.true_var.values;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) truth += v[i] / 23400.0;
    rel.push_back(integrated_variance(s.noisy_prices, 152) / truth - 1.0);
  }
  CHECK(std::abs(testsupport::mean(rel)) < 0.05);
}

TEST_CASE("integrated quarticity") {
  const auto mp = constant_model(1e-4);
  std::vector<double> v;
  for (std::uint64_t r = 0; r < 50; ++r) {
    const auto s = sim::simulate(mp, 23400, 23400.0, r);
    v.push_back(integrated_quarticity(s.prices, 11700, 12));
    const double iv = integrated_variance(s.prices, 11700);
    CHECK(v.back() >= iv * iv * 0.999);
  }
  CHECK(testsupport::mean(v) == doctest::Approx(1e-8).epsilon(0.05));
  CHECK(integrated_quarticity(testsupport::constant_path(64, 1.0), 8, 2) == 0.0);
  const PricePath p = testsupport::random_path(64, 1.0, 0.01, 1);
  CHECK_THROWS_AS(integrated_quarticity(p, 8, 9), ValidationError);
}

TEST_CASE("integrated vol-of-vol") {
  SUBCASE("constant volatility: decays with n") {
    const auto mp = constant_model(1e-4);
    auto avg = [&](std::size_t n) {
      double s = 0.0;
      for (std::uint64_t r = 0; r < 20; ++r) {
        const auto p = sim::simulate(mp, n, 23400.0, r).prices;
        const int niv = static_cast<int>(n / 2);
        s += integrated_volvol(p, niv, 8);
      }
      return s / 20;
    };
    CHECK(avg(23400) < avg(2340));
  }
  SUBCASE("Heston: positive and tracks the true vol-of-vol across paths") {
    sim::ModelParams mp;
    mp.model = sim::Model::Heston;
    std::vector<double> est, truth;
    for (std::uint64_t r = 0; r < 30; ++r) {
      const auto s = sim::simulate(mp, 23400, 23400.0, r);
      est.push_back(std::log(integrated_volvol(s.prices, 152, 12)));
      double t = 0.0;
      for (std::size_t i = 0; i + 1 < s.true_volvol.size(); ++i) t += s.true_volvol[i] / 23400.0;
      truth.push_back(std::log(t));
      CHECK(std::isfinite(est.back()));
    }
    const double me = testsupport::mean(est), mt = testsupport::mean(truth);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < est.size(); ++i) {
      sxy += (est[i] - me) * (truth[i] - mt);
      sxx += (est[i] - me) * (est[i] - me);
      syy += (truth[i] - mt) * (truth[i] - mt);
    }
    CHECK(sxy / std::sqrt(sxx * syy) > 0.5);
  }
  SUBCASE("summands are symmetric in k") {
    const PricePath p = testsupport::random_path(300, 1.0, 0.01, 6);
    const FourierCoeffs vc = vol_coeffs(price_coeffs(rescale_time(p), 60), 50, 10);
    for (int k = 1; k <= 10; ++k) {
      CHECK(double(k) * k * (vc[k] * vc[-k]).real() ==
            doctest::Approx(double(-k) * -k * (vc[-k] * vc[k]).real()).epsilon(1e-14));
    }
  }
  SUBCASE("bias correction lowers the estimate") {
    const PricePath p = sim::simulate(constant_model(1e-4), 23400, 23400.0, 1).prices;
    CHECK(integrated_volvol(p, 152, 12, true) < integrated_volvol(p, 152, 12, false));
  }
}

TEST_CASE("plug-ins scale with the log-price") {
  const PricePath p = sim::add_noise(sim::simulate(constant_model(1e-4), 4000, 23400.0, 2), 1.0, 2).noisy_prices;
  PricePath q = p;
  const double lam = 3.0;
  for (double& x : q.logprices) x *= lam;
  const AmiseInputs a = build_amise_inputs(p).inputs;
  const AmiseInputs b = build_amise_inputs(q).inputs;
  CHECK(b.iv == doctest::Approx(lam * lam * a.iv).epsilon(1e-10));
  CHECK(b.xi == doctest::Approx(lam * lam * a.xi).epsilon(1e-10));
  CHECK(b.iq == doctest::Approx(std::pow(lam, 4) * a.iq).epsilon(1e-10));
  CHECK(b.ivv == doctest::Approx(std::pow(lam, 4) * a.ivv).epsilon(1e-10));
}

TEST_CASE("build_amise_inputs") {
  SUBCASE("noisy SV1F path: every field positive") {
    sim::ModelParams mp;
    const auto s = sim::add_noise(sim::simulate(mp, 23400, 23400.0, 4), 1.0, 4);
    const PluginReport r = build_amise_inputs(s.noisy_prices);
    CHECK(r.inputs.iv > 0);
    CHECK(r.inputs.iq > 0);
    CHECK(r.inputs.ivv > 0);
    CHECK(r.inputs.xi > 0);
    CHECK(r.inputs.n == 23400);
    CHECK(r.inputs.iq >= r.inputs.iv * r.inputs.iv * 0.5);
  }
  SUBCASE("clean constant-volatility path: small vol-of-vol and noise") {
    const auto s = sim::simulate(constant_model(1e-4), 23400, 23400.0, 4);
    const AmiseInputs in = build_amise_inputs(s.prices).inputs;
    CHECK(in.xi < 1e-4 * in.iv);
    CHECK(in.ivv < in.iv);
  }
  SUBCASE("overrides and clamping") {
    const PricePath flat = testsupport::constant_path(400, 23400.0);
    const PluginReport r = build_amise_inputs(flat);
    CHECK(r.clamped);
    CHECK(r.inputs.ivv == 1e-12);
    CHECK(r.clamped_fields.find("ivv") != std::string::npos);
    PluginOptions o;
    o.iv_override = 2e-4;
    o.xi_override = 3e-9;
    const PluginReport r2 = build_amise_inputs(flat, o);
    CHECK(r2.inputs.iv == 2e-4);
    CHECK(r2.inputs.xi == 3e-9);
  }
  SUBCASE("a negative raw vol-of-vol is floored") {
    const PricePath p = sim::simulate(constant_model(1e-4), 2000, 23400.0, 8).prices;
    PluginOptions o;
    o.volvol_bias_correction = true;
    o.n_iv = 20;
    o.m_v = 4;
    // Force the clamp through an override below the floor.
    o.ivv_override = -1.0;
    const PluginReport r = build_amise_inputs(p, o);
    CHECK(r.inputs.ivv == 1e-12);
    CHECK(r.clamped);
  }
}
