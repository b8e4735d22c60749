#include <doctest.h>

#include <cmath>
#include <random>

#include "spotvol/errors.hpp"
#include "spotvol/kernels.hpp"
#include "support.hpp"

using namespace spotvol::kernels;
using testsupport::kPi;

namespace {

template <class F>
double trapezoid(F&& f, double a, double b, int points) {
  const double h = (b - a) / points;
  double s = 0.5 * (f(a) + f(b));
  for (int i = 1; i < points; ++i) s += f(a + i * h);
  return s * h;
}

}  // namespace

TEST_CASE("dirichlet values") {
  CHECK(dirichlet(KernelOrder(5), 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(dirichlet(KernelOrder(1), kPi) == doctest::Approx((1.0 + 2.0 * std::cos(kPi)) / 3.0));
  CHECK(dirichlet(KernelOrder(3), 2.0 * kPi) == doctest::Approx(1.0).epsilon(1e-14));
  for (double x : {0.3, 1.7, -2.2, 5.9, 1e-10}) {
    CHECK(dirichlet(KernelOrder(9), x) == doctest::Approx(testsupport::dirichlet_sum(9, x)).epsilon(1e-12));
  }
}

TEST_CASE("fejer values") {
  CHECK(fejer(KernelOrder(7), 0.0) == doctest::Approx(8.0));
  CHECK(std::abs(fejer(KernelOrder(1), kPi)) < 1e-14);
  CHECK(std::abs(fejer(KernelOrder(2), 2.0 * kPi / 3.0)) < 1e-14);
  for (double x : {0.3, 1.7, -2.2, 5.9, 4e-9}) {
    CHECK(fejer(KernelOrder(11), x) == doctest::Approx(testsupport::fejer_sum(11, x)).epsilon(1e-12));
  }
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 200; ++i) CHECK(fejer(KernelOrder(13), u(rng)) >= -1e-12);
}

TEST_CASE("negative order rejected") {
  CHECK_THROWS_AS(KernelOrder(-1), spotvol::ValidationError);
}

TEST_CASE("fejer derivatives") {
  const int M = 4;
  double s = 0.0;
  for (int k = 1; k <= M; ++k) s += k * k * (1.0 - k / (M + 1.0));
  const auto d0 = fejer_derivatives(KernelOrder(M), 0.0);
  CHECK(std::abs(d0.first) < 1e-14);
  CHECK(d0.second == doctest::Approx(-2.0 * s));

  const double x = 0.7, h = 1e-5;
  const auto d = fejer_derivatives(KernelOrder(3), x);
  const double fd1 = (fejer(KernelOrder(3), x + h) - fejer(KernelOrder(3), x - h)) / (2 * h);
  const double h2 = 1e-4;
  const double fd2 = (fejer(KernelOrder(3), x + h2) - 2 * fejer(KernelOrder(3), x) +
                      fejer(KernelOrder(3), x - h2)) / (h2 * h2);
  CHECK(std::abs(d.first - fd1) < 1e-6);
  CHECK(std::abs(d.second - fd2) < 1e-5);
}

TEST_CASE("dirichlet derivatives") {
  const int N = 4;
  double s = 0.0;
  for (int k = 1; k <= N; ++k) s += k * k;
  const auto d0 = dirichlet_derivatives(KernelOrder(N), 0.0);
  CHECK(std::abs(d0.first) < 1e-14);
  CHECK(d0.second == doctest::Approx(-2.0 / (2 * N + 1) * s));

  const double x = 1.1, h = 1e-5, h2 = 1e-4;
  const auto d = dirichlet_derivatives(KernelOrder(2), x);
  const auto D = [](double y) { return dirichlet(KernelOrder(2), y); };
  CHECK(std::abs(d.first - (D(x + h) - D(x - h)) / (2 * h)) < 1e-6);
  CHECK(std::abs(d.second - (D(x + h2) - 2 * D(x) + D(x - h2)) / (h2 * h2)) < 1e-5);
}

TEST_CASE("k_constant") {
  CHECK(k_constant(1.0) == 0.0);
  CHECK(k_constant(2.0) == 0.0);
  CHECK(k_constant(0.75) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(k_constant(0.3) == doctest::Approx(0.3 * 0.7 / (2 * 0.09)));
  CHECK_THROWS_AS(k_constant(0.0), spotvol::ValidationError);
  CHECK_THROWS_AS(k_constant(-1.0), spotvol::ValidationError);
}

TEST_CASE("squared dirichlet is a scaled fejer kernel") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-7.0, 7.0);
  for (int N = 0; N <= 64; N += 4) {
    for (int i = 0; i < 60; ++i) {
      const double x = u(rng);
      const double d = dirichlet(KernelOrder(N), x);
      const double f = fejer(KernelOrder(2 * N), x);
      CHECK(d * d * (2 * N + 1) == doctest::Approx(f).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("fejer mass equals 2 pi") {
  for (int M : {1, 4, 16, 64}) {
    const double v = trapezoid([M](double x) { return fejer(KernelOrder(M), x); }, -kPi, kPi, 1 << 14);
    CHECK(std::abs(v - 2 * kPi) < 1e-8);
  }
}

TEST_CASE("normalised fejer square approaches 4 pi / 3") {
  double prev = 1e9;
  for (int M : {64, 128, 256}) {
    const double v = trapezoid([M](double x) { const double f = fejer(KernelOrder(M), x); return f * f; },
                               -kPi, kPi, 1 << 16) / M;
    const double err = std::abs(v - 4 * kPi / 3);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("fejer tail beyond 2 pi/(M+1) tends to a constant") {
  // Substituting u = (M+1)x/2 gives the limit 2 int_pi^inf sin^2(u)/u^2 du, so M times
  // the tail grows linearly rather than settling.
  std::vector<double> v;
  for (int M : {16, 32, 64, 128, 256, 512}) {
    v.push_back(trapezoid([M](double x) { return fejer(KernelOrder(M), x); }, 2 * kPi / (M + 1),
                          kPi, 1 << 16));
  }
  for (std::size_t i = 1; i < v.size(); ++i) {
    CHECK(std::abs(v[i] / v[i - 1] - 1.0) < 0.05);
    CHECK(std::abs(v[i] - v[i - 1]) <= std::abs(v[1] - v[0]) * 1.01);
  }
  CHECK(v.back() > 0.2);
  CHECK(v.back() < 0.5);
}

TEST_CASE("wrap_angle maps into (-pi, pi]") {
  for (double x : {-20.0, -3.2, 0.0, 3.2, 7.0, 100.0}) {
    const double w = wrap_angle(x);
    CHECK(w > -kPi);
    CHECK(w <= kPi);
    CHECK(std::abs(std::sin(w) - std::sin(x)) < 1e-12);
  }
}
