#include "spotvol/fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "spotvol/errors.hpp"

namespace spotvol {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// fftw planning is not thread-safe; execution on distinct arrays is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

void check_interior(double t, double upper, const char* what) {
  if (!(t > 0.0 && t < upper)) {
    throw ValidationError(std::string(what) + " must lie strictly inside (0, T); got " +
                          std::to_string(t));
  }
}

}  // namespace

void PricePath::validate() const {
  require(horizon > 0.0 && std::isfinite(horizon), "price path horizon must be positive");
  require(timestamps.size() == logprices.size(), "timestamps and log-prices differ in length");
  require(timestamps.size() >= 2, "price path needs at least two observations");
  require(timestamps.front() == 0.0, "first timestamp must be 0");
  for (std::size_t j = 1; j < timestamps.size(); ++j) {
    if (!(timestamps[j] > timestamps[j - 1])) {
      throw ValidationError("timestamps not strictly increasing at index " + std::to_string(j));
    }
  }
  require(timestamps.back() <= horizon * (1.0 + 1e-12), "timestamps exceed the horizon");
  for (double p : logprices) require(std::isfinite(p), "non-finite log-price");
}

FourierCoeffs::FourierCoeffs(int order)
    : order_(order), values_(static_cast<std::size_t>(2 * order + 1)) {
  require(order >= 0, "coefficient order must be nonnegative");
}

std::complex<double> FourierCoeffs::at(int k) const {
  require(std::abs(k) <= order_, "coefficient index out of range");
  return (*this)[k];
}

double FourierCoeffs::symmetry_defect() const {
  double worst = 0.0;
  for (int k = 0; k <= order_; ++k) {
    worst = std::max(worst, std::abs((*this)[-k] - std::conj((*this)[k])));
  }
  return worst;
}

void EstimatorConfig::validate(std::size_t n) const {
  require(M > 0, "M must be positive");
  require(M < N, "require M < N (got M=" + std::to_string(M) + ", N=" + std::to_string(N) + ")");
  require(static_cast<std::size_t>(N) < n,
          "require N < n (got N=" + std::to_string(N) + ", n=" + std::to_string(n) + ")");
}

std::size_t SpotVolPath::negative_count() const {
  return static_cast<std::size_t>(std::count_if(values.begin(), values.end(),
                                                [](double v) { return v < 0.0; }));
}

CirclePath rescale_time(const PricePath& path) {
  path.validate();
  CirclePath out;
  out.horizon = path.horizon;
  out.logprices = path.logprices;
  out.angles.resize(path.timestamps.size());
  const double scale = kTwoPi / path.horizon;
  for (std::size_t j = 0; j < path.timestamps.size(); ++j) {
    out.angles[j] = path.timestamps[j] * scale;
  }
  const std::size_t n = out.increments();
  out.equispaced = true;
  for (std::size_t j = 0; j <= n && out.equispaced; ++j) {
    const double expected = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
    if (std::abs(out.angles[j] - expected) > 1e-12 * kTwoPi) out.equispaced = false;
  }
  return out;
}

FourierCoeffs price_coeffs_direct(const CirclePath& path, int H) {
  require(H >= 0, "coefficient order must be nonnegative");
  const std::size_t n = path.increments();
  std::vector<double> re(static_cast<std::size_t>(H) + 1, 0.0);
  std::vector<double> im(static_cast<std::size_t>(H) + 1, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double d = path.logprices[j + 1] - path.logprices[j];
    if (d == 0.0) continue;
    const double t = path.angles[j];
    const double sr = std::cos(t), si = -std::sin(t);
    double zr = d, zi = 0.0;
    for (int k = 0; k <= H; ++k) {
      if (k > 0 && (k & 63) == 0) {
        zr = d * std::cos(k * t);
        zi = -d * std::sin(k * t);
      }
      re[static_cast<std::size_t>(k)] += zr;
      im[static_cast<std::size_t>(k)] += zi;
      const double nr = zr * sr - zi * si;
      zi = zr * si + zi * sr;
      zr = nr;
    }
  }
  FourierCoeffs out(H);
  for (int k = 0; k <= H; ++k) {
    const std::complex<double> c{re[static_cast<std::size_t>(k)] / kTwoPi,
                                 im[static_cast<std::size_t>(k)] / kTwoPi};
    out[k] = c;
    out[-k] = std::conj(c);
  }
  return out;
}

FourierCoeffs price_coeffs_fft(const CirclePath& path, int H) {
  require(H >= 0, "coefficient order must be nonnegative");
  require(path.equispaced, "FFT route requires an equispaced grid");
  const std::size_t n = path.increments();
  const std::size_t bins = n / 2 + 1;
  std::unique_ptr<double, FftwFree> in(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
  std::unique_ptr<fftw_complex, FftwFree> spec(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * bins)));
  if (!in || !spec) throw NumericalError("fftw_malloc failed");
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), spec.get(), FFTW_ESTIMATE);
  }
  for (std::size_t j = 0; j < n; ++j) in.get()[j] = path.logprices[j + 1] - path.logprices[j];
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  FourierCoeffs out(H);
  for (int k = 0; k <= H; ++k) {
    const std::size_t m = static_cast<std::size_t>(k) % n;
    std::complex<double> c;
    if (m < bins) {
      c = {spec.get()[m][0], spec.get()[m][1]};
    } else {
      c = {spec.get()[n - m][0], -spec.get()[n - m][1]};
    }
    c /= kTwoPi;
    out[k] = c;
    out[-k] = std::conj(c);
  }
  return out;
}

FourierCoeffs price_coeffs(const CirclePath& path, int H) {
  // Below a few thousand multiply-adds the direct sum is cheaper than planning.
  const double direct_cost = static_cast<double>(path.increments()) * (H + 1.0);
  if (path.equispaced && direct_cost > 4096.0) return price_coeffs_fft(path, H);
  return price_coeffs_direct(path, H);
}

FourierCoeffs vol_coeffs(const FourierCoeffs& pc, int N, int M) {
  require(N >= 0 && M >= 0, "cut-off frequencies must be nonnegative");
  require(pc.order() >= N + M, "price coefficients of order " + std::to_string(pc.order()) +
                                   " cannot support N + M = " + std::to_string(N + M));
  const int H = pc.order();
  const auto vals = pc.values();
  std::vector<double> re(vals.size()), im(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) {
    re[i] = vals[i].real();
    im[i] = vals[i].imag();
  }
  const double scale = kTwoPi / (2.0 * N + 1.0);
  const bool symmetric = pc.symmetry_defect() <= 1e-12 * (1.0 + std::abs(pc[0]));
  FourierCoeffs out(M);
  const int k_lo = symmetric ? 0 : -M;
  for (int k = k_lo; k <= M; ++k) {
    // sum_{h=-N}^{N} c_h c_{k-h}; a walks up from -N, b walks down from k+N.
    const double* ar = re.data() + (H - N);
    const double* ai = im.data() + (H - N);
    const double* br = re.data() + (H + k + N);
    const double* bi = im.data() + (H + k + N);
    double sr = 0.0, si = 0.0;
    for (int h = 0; h <= 2 * N; ++h) {
      const double xr = ar[h], xi = ai[h], yr = *(br - h), yi = *(bi - h);
      sr += xr * yr - xi * yi;
      si += xr * yi + xi * yr;
    }
    out[k] = {scale * sr, scale * si};
    if (symmetric) out[-k] = std::conj(out[k]);
  }
  return out;
}

double invert(const FourierCoeffs& vc, double t) {
  if (!(t > 0.0 && t < kTwoPi)) {
    throw ValidationError("inversion point must lie strictly inside (0, 2*pi); got " +
                          std::to_string(t));
  }
  const int M = vc.order();
  const double m1 = M + 1.0;
  std::complex<double> acc = vc[0];
  const std::complex<double> step = std::polar(1.0, t);
  std::complex<double> z = step;
  for (int k = 1; k <= M; ++k) {
    if ((k & 63) == 0) z = std::polar(1.0, k * t);
    const double w = 1.0 - k / m1;
    acc += w * (z * vc[k] + std::conj(z) * vc[-k]);
    z *= step;
  }
  if (!std::isfinite(acc.real()) || !std::isfinite(acc.imag())) {
    throw NumericalError("non-finite spot variance estimate");
  }
  if (std::abs(acc.imag()) > 1e-10 * (1.0 + std::abs(acc.real()))) {
    throw NumericalError("inversion left an imaginary residue of " + std::to_string(acc.imag()));
  }
  return acc.real();
}

SpotVolPath estimate_from_coeffs(const FourierCoeffs& pc, double horizon,
                                 const EstimatorConfig& cfg,
                                 std::span<const double> grid_seconds) {
  require(horizon > 0.0, "horizon must be positive");
  for (double g : grid_seconds) check_interior(g, horizon, "evaluation time");
  const FourierCoeffs vc = vol_coeffs(pc, cfg.N, cfg.M);
  SpotVolPath out;
  out.horizon = horizon;
  out.grid.assign(grid_seconds.begin(), grid_seconds.end());
  out.values.reserve(grid_seconds.size());
  // Rescaled variance is per radian; one day spans 2*pi radians.
  for (double g : grid_seconds) out.values.push_back(kTwoPi * invert(vc, kTwoPi * g / horizon));
  return out;
}

SpotVolPath estimate_path(const PricePath& path, const EstimatorConfig& cfg,
                          std::span<const double> grid_seconds) {
  const CirclePath circle = rescale_time(path);
  cfg.validate(circle.increments());
  for (double g : grid_seconds) check_interior(g, path.horizon, "evaluation time");
  const FourierCoeffs pc = price_coeffs(circle, cfg.N + cfg.M);
  return estimate_from_coeffs(pc, path.horizon, cfg, grid_seconds);
}

std::vector<double> interior_grid(double horizon, double step) {
  require(horizon > 0.0 && step > 0.0, "grid needs positive horizon and step");
  std::vector<double> grid;
  for (long i = 1;; ++i) {
    const double g = static_cast<double>(i) * step;
    if (g >= horizon * (1.0 - 1e-12)) break;
    grid.push_back(g);
  }
  return grid;
}

SpotVolPath clip_nonnegative(SpotVolPath path) {
  for (double& v : path.values) v = std::max(v, 0.0);
  return path;
}

}  // namespace spotvol
