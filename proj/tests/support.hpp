#pragma once

// Shared helpers for the unit tests: seeded random paths and brute-force
// reference formulas written independently of the library.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "spotvol/fourier.hpp"
#include "spotvol/plugin.hpp"

namespace testsupport {

inline constexpr double kPi = std::numbers::pi;

// Equispaced path on [0, T] with Gaussian increments of standard deviation sd.
inline spotvol::PricePath random_path(std::size_t n, double T, double sd, std::uint64_t seed,
                                      double p0 = 4.6) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, sd);
  spotvol::PricePath p;
  p.horizon = T;
  double x = p0;
  for (std::size_t i = 0; i <= n; ++i) {
    p.timestamps.push_back(T * static_cast<double>(i) / static_cast<double>(n));
    p.logprices.push_back(x);
    x += z(rng);
  }
  p.timestamps.back() = T;
  return p;
}

inline spotvol::PricePath constant_path(std::size_t n, double T, double value = 4.6) {
  spotvol::PricePath p;
  p.horizon = T;
  for (std::size_t i = 0; i <= n; ++i) {
    p.timestamps.push_back(T * static_cast<double>(i) / static_cast<double>(n));
    p.logprices.push_back(value);
  }
  return p;
}

// (1/(2N+1)) sum_{|k|<=N} e^{ikx}
inline double dirichlet_sum(int N, double x) {
  double s = 1.0;
  for (int k = 1; k <= N; ++k) s += 2.0 * std::cos(k * x);
  return s / (2.0 * N + 1.0);
}

inline double fejer_sum(int M, double x) {
  double s = 1.0;
  for (int k = 1; k <= M; ++k) s += 2.0 * (1.0 - k / (M + 1.0)) * std::cos(k * x);
  return s;
}

// c_k(dp) by direct summation over angles t_j = 2 pi t_j / T.
inline std::complex<double> coeff_direct(const spotvol::PricePath& p, int k) {
  std::complex<double> s = 0.0;
  for (std::size_t j = 0; j + 1 < p.logprices.size(); ++j) {
    const double t = 2.0 * kPi * p.timestamps[j] / p.horizon;
    s += std::polar(1.0, -k * t) * (p.logprices[j + 1] - p.logprices[j]);
  }
  return s / (2.0 * kPi);
}

inline double realized_variance(const spotvol::PricePath& p) {
  double s = 0.0;
  for (std::size_t j = 0; j + 1 < p.logprices.size(); ++j) {
    const double d = p.logprices[j + 1] - p.logprices[j];
    s += d * d;
  }
  return s;
}

// 2 pi c_0 of the volatility at N = n/2 on an equispaced grid: realized variance
// plus the aliased alternating term ((sum_j (-1)^j d_j)^2 - RV)/(n+1).
inline double nyquist_c0_oracle(const spotvol::PricePath& p) {
  const double rv = realized_variance(p);
  double alt = 0.0;
  for (std::size_t j = 0; j + 1 < p.logprices.size(); ++j) {
    const double d = p.logprices[j + 1] - p.logprices[j];
    alt += j % 2 == 0 ? d : -d;
  }
  return rv + (alt * alt - rv) / static_cast<double>(p.logprices.size());
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sample_sd(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// Realistic c-AMISE inputs for a one-day sample of size n: variance per day
// log-uniform in [1e-4, 1e-2], quarticity above iv^2, vol-of-vol spread over
// four decades, and noise with noise-to-signal ratio in [0.5, 3].
inline spotvol::plugin::AmiseInputs random_amise_inputs(std::mt19937_64& rng, std::size_t n = 23400) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double s = std::pow(10.0, -4.0 + 2.0 * u(rng));
  spotvol::plugin::AmiseInputs in;
  in.iv = s;
  in.iq = s * s * (1.0 + u(rng));
  in.ivv = s * s * std::pow(10.0, -2.0 + 4.0 * u(rng));
  const double zeta = 0.5 + 2.5 * u(rng);
  in.xi = zeta * zeta * s / static_cast<double>(n);
  in.n = n;
  in.T = 1.0;
  return in;
}

}  // namespace testsupport
