#include "spotvol/kernels.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "spotvol/errors.hpp"

namespace spotvol::kernels {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSingularSin = 1e-8;

// Accumulates sum_{k=1}^{order} w(k) * {k^p cos(kx), k^p sin(kx)} using a
// rotation recurrence that is re-seeded every 64 steps to bound drift.
template <class Weight>
std::complex<double> weighted_phase_sum(int order, double x, Weight w) {
  std::complex<double> acc{0.0, 0.0};
  const std::complex<double> step = std::polar(1.0, x);
  std::complex<double> z = step;
  for (int k = 1; k <= order; ++k) {
    if ((k & 63) == 0) z = std::polar(1.0, k * x);
    acc += w(k) * z;
    z *= step;
  }
  return acc;
}

}  // namespace

KernelOrder::KernelOrder(int v) : value(v) {
  require(v >= 0, "kernel order must be nonnegative, got " + std::to_string(v));
}

double wrap_angle(double x) {
  double r = std::remainder(x, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

double dirichlet(KernelOrder n, double x) {
  const int N = n.value;
  const double y = wrap_angle(x);
  const double s = std::sin(0.5 * y);
  const double width = 2.0 * N + 1.0;
  if (std::abs(s) > kSingularSin) return std::sin(0.5 * width * y) / (width * s);
  const auto sum = weighted_phase_sum(N, y, [](int) { return 1.0; });
  return (1.0 + 2.0 * sum.real()) / width;
}

double fejer(KernelOrder m, double x) {
  const int M = m.value;
  const double y = wrap_angle(x);
  const double s = std::sin(0.5 * y);
  const double m1 = M + 1.0;
  if (std::abs(s) > kSingularSin) {
    const double r = std::sin(0.5 * m1 * y) / s;
    return r * r / m1;
  }
  const auto sum = weighted_phase_sum(M, y, [m1](int k) { return 1.0 - k / m1; });
  return 1.0 + 2.0 * sum.real();
}

// d/dx e^{ikx} = ik e^{ikx}; pairing k with -k leaves -2 k sin(kx) and
// -2 k^2 cos(kx) for the first and second derivatives.
Derivatives dirichlet_derivatives(KernelOrder n, double x) {
  const int N = n.value;
  const double y = wrap_angle(x);
  const double width = 2.0 * N + 1.0;
  const auto d1 = weighted_phase_sum(N, y, [](int k) { return double(k); });
  const auto d2 = weighted_phase_sum(N, y, [](int k) { return double(k) * k; });
  return {-2.0 * d1.imag() / width, -2.0 * d2.real() / width};
}

Derivatives fejer_derivatives(KernelOrder m, double x) {
  const int M = m.value;
  const double y = wrap_angle(x);
  const double m1 = M + 1.0;
  const auto d1 = weighted_phase_sum(M, y, [m1](int k) { return k * (1.0 - k / m1); });
  const auto d2 = weighted_phase_sum(M, y, [m1](int k) { return double(k) * k * (1.0 - k / m1); });
  return {-2.0 * d1.imag(), -2.0 * d2.real()};
}

double k_constant(double c) {
  require(c > 0.0 && std::isfinite(c), "K(c) requires c > 0");
  const double r = c - std::floor(c);
  return r * (1.0 - r) / (2.0 * c * c);
}

}  // namespace spotvol::kernels
