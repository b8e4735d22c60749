#pragma once

// Fourier spot-volatility estimator.
//
// Prices observed at t_0 = 0 < t_1 < ... < t_n = T are mapped onto [0, 2*pi].
// Price-increment coefficients
//     c_k(dp) = 1/(2 pi) sum_j e^{-i k t_j} (p(t_{j+1}) - p(t_j))
// feed the convolution
//     c_k(sigma^2) = 2 pi/(2N+1) sum_{|h|<=N} c_h(dp) c_{k-h}(dp),
// and the spot variance is the Fejer-weighted inversion
//     sigma^2(t) = sum_{|k|<=M} (1 - |k|/(M+1)) e^{i t k} c_k(sigma^2).
//
// Variances returned by estimate_path are per day, with one day equal to the
// path horizon T.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace spotvol {

struct PricePath {
  std::vector<double> timestamps;  // seconds, strictly increasing, first = 0
  std::vector<double> logprices;
  double horizon = 0.0;            // T in seconds

  std::size_t increments() const { return logprices.empty() ? 0 : logprices.size() - 1; }
  void validate() const;
};

// A price path with time mapped onto [0, 2*pi].
struct CirclePath {
  std::vector<double> angles;
  std::vector<double> logprices;
  double horizon = 0.0;            // original T in seconds
  bool equispaced = false;

  std::size_t increments() const { return logprices.size() - 1; }
};

class FourierCoeffs {
public:
  FourierCoeffs() = default;
  explicit FourierCoeffs(int order);

  int order() const { return order_; }
  std::complex<double>& operator[](int k) { return values_[static_cast<std::size_t>(k + order_)]; }
  const std::complex<double>& operator[](int k) const {
    return values_[static_cast<std::size_t>(k + order_)];
  }
  std::complex<double> at(int k) const;
  std::span<const std::complex<double>> values() const { return values_; }

  // Largest |c_{-k} - conj(c_k)| over the sequence.
  double symmetry_defect() const;

private:
  int order_ = 0;
  std::vector<std::complex<double>> values_;
};

struct EstimatorConfig {
  int N = 0;  // convolution cut-off
  int M = 0;  // Fejer inversion cut-off

  // Enforces 0 < M < N < n.
  void validate(std::size_t n) const;
};

struct SpotVolPath {
  std::vector<double> grid;    // seconds
  std::vector<double> values;  // variance per day
  double horizon = 0.0;        // T in seconds

  std::size_t negative_count() const;
};

CirclePath rescale_time(const PricePath& path);

// Dispatches to the FFT route on equispaced grids and to direct summation
// otherwise. Both agree to 1e-10.
FourierCoeffs price_coeffs(const CirclePath& path, int H);
FourierCoeffs price_coeffs_direct(const CirclePath& path, int H);
FourierCoeffs price_coeffs_fft(const CirclePath& path, int H);

// Volatility coefficients for |k| <= M; requires pc.order() >= N + M.
FourierCoeffs vol_coeffs(const FourierCoeffs& pc, int N, int M);

// Fejer inversion at t in (0, 2*pi), in rescaled units (variance per radian).
double invert(const FourierCoeffs& vc, double t);

SpotVolPath estimate_path(const PricePath& path, const EstimatorConfig& cfg,
                          std::span<const double> grid_seconds);

// Same as estimate_path but starting from already computed price coefficients
// (order >= N + M), so several (N, M) pairs can share one transform.
SpotVolPath estimate_from_coeffs(const FourierCoeffs& pc, double horizon,
                                 const EstimatorConfig& cfg,
                                 std::span<const double> grid_seconds);

// Default evaluation grid: every `step` seconds strictly inside (0, T).
std::vector<double> interior_grid(double horizon, double step);

SpotVolPath clip_nonnegative(SpotVolPath path);

}  // namespace spotvol
