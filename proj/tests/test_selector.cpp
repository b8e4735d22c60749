#include <doctest.h>

#include <cmath>
#include <random>

#include "spotvol/errors.hpp"
#include "spotvol/selector.hpp"
#include "support.hpp"

using namespace spotvol;
using namespace spotvol::select;
using plugin::AmiseInputs;

namespace {

// Objective written out term by term.
double psi(const AmiseInputs& in, double N, double M) {
  const double n = double(in.n), T = in.T;
  return M / N * 2.0 / 3.0 * in.iq + 1.0 / M * T / 3.0 * in.ivv + M * N / n * T / 9.0 * in.xi * in.iv +
         N * N * N * M / (n * n) * T * T * T / 15.0 * in.xi * in.xi;
}

}  // namespace

TEST_CASE("objective") {
  const AmiseInputs a{0.0, 1.0, 0.0, 0.0, 23400, 1.0};
  CHECK(c_amise(a, 100, 10) == doctest::Approx(1.0 / 15.0));
  for (double N = 80; N < 1500; N += 97) CHECK(c_amise(a, N + 1, 10) < c_amise(a, N, 10));

  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    const AmiseInputs in = testsupport::random_amise_inputs(rng);
    CHECK(c_amise(in, 300, 7) == doctest::Approx(psi(in, 300, 7)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(c_amise(a, 0, 1), ValidationError);
  CHECK_THROWS_AS(c_amise(a, 10, -1), ValidationError);
}

TEST_CASE("stationary M without noise") {
  const AmiseInputs in{0.0, 1.0, 1.0, 0.0, 23400, 1.0};
  const double N = 100;
  // d/dM [(M/N)(2/3) + 1/(3M)] = 0  =>  M = sqrt(N/2)
  const double m_star = std::sqrt(N / 2.0);
  double best = 0, best_v = 1e300;
  for (double M = 0.5; M < 50; M += 0.001) {
    if (c_amise(in, N, M) < best_v) {
      best_v = c_amise(in, N, M);
      best = M;
    }
  }
  CHECK(std::abs(best - m_star) < 0.5);
  CHECK(std::abs(c_amise_gradient(in, N, m_star).dM) < 1e-10);
}

TEST_CASE("gradient matches central differences") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Box box = default_box(23400);
  for (int i = 0; i < 100; ++i) {
    const AmiseInputs in = testsupport::random_amise_inputs(rng);
    const double N = box.n_lo + u(rng) * (box.n_hi - box.n_lo);
    const double M = box.m_lo + u(rng) * (box.m_hi - box.m_lo);
    const Gradient g = c_amise_gradient(in, N, M);
    const double hN = 1e-4 * N, hM = 1e-4 * M;
    const double fN = (psi(in, N + hN, M) - psi(in, N - hN, M)) / (2 * hN);
    const double fM = (psi(in, N, M + hM) - psi(in, N, M - hM)) / (2 * hM);
    CHECK(std::abs(g.dN - fN) <= 1e-6 * std::max(std::abs(fN), 1e-300) + 1e-300);
    CHECK(std::abs(g.dM - fM) <= 1e-6 * std::max(std::abs(fM), 1e-300) + 1e-300);
  }
  const AmiseInputs flat{0.0, 1.0, 0.0, 0.0, 23400, 1.0};
  CHECK(c_amise_gradient(flat, 200, 10).dN < 0.0);
}

TEST_CASE("default box") {
  const Box b = default_box(23400);
  CHECK(b.n_lo == 76);
  CHECK(b.n_hi == 1529);
  CHECK(b.m_lo == 1);
  CHECK(b.m_hi == 24);
  const Box big = default_box(std::size_t(1) << 24);
  CHECK(big.m_lo == std::floor(0.1 * std::pow(double(1 << 24), 0.25)));
  Box bad{10, 5, 1, 2};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("boundary solution without noise or vol-of-vol") {
  const AmiseInputs in{1e-4, 1e-8, 0.0, 0.0, 23400, 1.0};
  const SelectorResult r = select_params(in);
  CHECK(r.N_star == 1529);
  CHECK(r.M_star == 1);
}

TEST_CASE("selection stays admissible and the trace never increases") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 20; ++i) {
    const AmiseInputs in = testsupport::random_amise_inputs(rng);
    const SelectorResult r = select_params(in);
    const Box b = default_box(in.n);
    CHECK(r.M_star < r.N_star);
    CHECK(std::size_t(r.N_star) < in.n);
    CHECK(b.contains(r.N_cont, r.M_cont));
    for (std::size_t k = 1; k < r.objective_trace.size(); ++k) {
      CHECK(r.objective_trace[k] <= r.objective_trace[k - 1]);
    }
    if (r.converged && r.objective_trace.size() > 1) {
      const double a = r.objective_trace[r.objective_trace.size() - 2], z = r.objective_trace.back();
      CHECK(std::abs(z - a) / a < 1e-3);
    }
  }
}

TEST_CASE("tight stopping rule reaches the grid optimum") {
  std::mt19937_64 rng(20240601);
  for (int i = 0; i < 20; ++i) {
    const AmiseInputs in = testsupport::random_amise_inputs(rng);
    const GridOptimum g = grid_search(in, default_box(in.n));
    SelectorOptions o;
    o.threshold = 1e-12;
    o.max_iters = 10000000;
    const SelectorResult r = select_params(in, o);
    CHECK(c_amise(in, r.N_star, r.M_star) <= 1.01 * g.objective);
    CHECK(std::abs(r.N_star - g.N) <= 1);
    CHECK(std::abs(r.M_star - g.M) <= 1);
  }
}

TEST_CASE("default stopping rule against the grid optimum" * doctest::may_fail()) {
  // The relative-change rule with threshold 1e-3 stops well before the
  // optimum for realistic inputs; reported, not enforced.
  std::mt19937_64 rng(20240601);
  for (int i = 0; i < 20; ++i) {
    const AmiseInputs in = testsupport::random_amise_inputs(rng);
    const GridOptimum g = grid_search(in, default_box(in.n));
    const SelectorResult r = select_params(in);
    CHECK(c_amise(in, r.N_star, r.M_star) <= 1.01 * g.objective);
  }
}

TEST_CASE("learning rate stays usable across noise scales") {
  for (double xi : {1e-10, 1e-8, 1e-6, 1e-4}) {
    const AmiseInputs in{1e-4, 1.5e-8, 1e-8, xi, 23400, 1.0};
    const SelectorResult r = select_params(in);
    CHECK(std::isfinite(r.N_cont));
    CHECK(std::isfinite(r.M_cont));
    CHECK(r.learning_rate == doctest::Approx(500.0 / xi));
  }
}

TEST_CASE("explicit options") {
  const AmiseInputs in{1e-4, 1.5e-8, 1e-8, 1e-9, 23400, 1.0};
  SelectorOptions o;
  o.box = Box{100, 400, 4, 12};
  const SelectorResult r = select_params(in, o);
  CHECK(r.N_star >= 100);
  CHECK(r.N_star <= 400);
  CHECK(r.M_star >= 4);
  CHECK(r.M_star <= 12);
  SelectorOptions bad;
  bad.threshold = -1.0;
  CHECK_THROWS_AS(select_params(in, bad), ValidationError);
  SelectorOptions lr;
  lr.learning_rate = 0.0;
  CHECK_THROWS_AS(select_params(in, lr), ValidationError);
}
