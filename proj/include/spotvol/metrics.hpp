#pragma once

// Path-error metrics, distribution diagnostics, and Monte Carlo checks of the
// estimator's central limit behaviour.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spotvol/fourier.hpp"
#include "spotvol/simulator.hpp"

namespace spotvol::metrics {

struct PathError {
  double ise = 0.0;  // int (est - truth)^2 dt, t in days
  double iae = 0.0;  // int |est - truth| dt
};

// Left-Riemann weights over the grid in days: point i covers [g_i, g_{i+1}),
// the last point runs to T and the first also absorbs [0, g_0).
std::vector<double> riemann_weights(std::span<const double> grid_seconds, double horizon);

PathError path_error(const SpotVolPath& est, const SpotVolPath& truth);

// Samples a full-resolution path at the given grid (exact timestamp match, or
// linear interpolation between neighbours).
SpotVolPath sample_at(const SpotVolPath& full, std::span<const double> grid_seconds);

enum class Regime { NoNoiseSubopt, NoNoiseOpt, NoiseSubopt, NoiseOpt };

Regime parse_regime(const std::string& s);  // notef | ef | notefm | efm
std::string regime_name(Regime r);
bool regime_has_noise(Regime r);

struct CltSpec {
  Regime regime = Regime::NoNoiseSubopt;
  double c = 0.5;
  double a = 1.0;
  double tau = 1.5;                // exponent in the sub-optimal regimes, 1 < tau < 2
  std::optional<double> t_eval;    // seconds; horizon/2 when unset

  void validate() const;
};

// Cutting frequencies implied by the regime:
//   notef  N = cn,       M = a n^{1/tau}
//   ef     N = cn,       M = a n^{1/2}
//   notefm N = c n^{1/2}, M = a N^{1/tau}
//   efm    N = c n^{1/2}, M = a N^{1/2}
// (all floored).
EstimatorConfig regime_config(const CltSpec& spec, std::size_t n);

// n^{1/2} M^{-1/2} without noise, n^{1/4} M^{-1/2} with noise.
double clt_rate(Regime r, std::size_t n, int M);

// Limiting variance in the estimator's native units (time on [0, 2 pi]).
double asymptotic_variance(const CltSpec& spec, double sigma2, double gamma2, double xi);

// Unit changes from per-day quantities to the [0, 2 pi] time scale.
double variance_to_circle(double sigma2_per_day);
double volvol_to_circle(double gamma2_per_day);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double skewness = 0.0;
  double kurtosis = 0.0;  // non-excess
};
Moments moments(std::span<const double> x);

struct JarqueBera {
  double statistic = 0.0;
  double p_value = 1.0;
};
JarqueBera jarque_bera(std::span<const double> x);

// sup_x |F_emp(x) - Phi(x)|
double ks_distance(std::span<const double> x);

double normal_cdf(double x);

// Midpoints of consecutive h-second intervals covering [0, T].
std::vector<double> midpoint_grid(double horizon, double h_seconds);

// Interval starts h, 2h, ... strictly inside (0, T); the first interval is
// left out because the estimator is not evaluated at t = 0.
std::vector<double> start_grid(double horizon, double h_seconds);

// For each grid point g, z = (p(t0 + h) - p(t0)) / sqrt(vol(g) h) with h in days
// and [t0, t0 + h] the h-cell containing g.
std::vector<double> standardized_returns(const PricePath& path, const SpotVolPath& vol,
                                         double h_seconds);

struct CltResult {
  std::size_t n = 0;
  int N = 0;
  int M = 0;
  double t_eval = 0.0;
  std::vector<double> z;
  double ks = 0.0;
  JarqueBera jb;
  double coverage = 0.0;
  double z_mean = 0.0;
  double z_var = 0.0;
};

struct CltOptions {
  std::size_t n = 23400;
  double horizon = 23400.0;
  std::size_t n_paths = 1000;
  std::uint64_t seed = 1;
  double zeta = 0.0;                  // noise-to-signal ratio (noise regimes)
  std::optional<double> fixed_xi;     // absolute noise variance instead of zeta
  double avar_scale = 1.0;            // 0.5 gives the halved-variance control
  int jobs = 1;
};

CltResult clt_check(const sim::ModelParams& model, const CltSpec& spec, const CltOptions& opts);

struct RateResult {
  std::vector<std::size_t> ns;
  std::vector<double> rmse;  // per day
  double slope = 0.0;        // OLS slope of log rmse on log n
};

// RMSE of the estimate at t_eval across paths, for each n, with the regime's
// (N, M). Noise, if any, has fixed variance xi across n.
RateResult rate_check(const sim::ModelParams& model, const CltSpec& spec,
                      std::span<const std::size_t> ns, std::size_t n_paths, std::uint64_t seed,
                      double xi, int jobs = 1);

double ols_slope(std::span<const double> x, std::span<const double> y);

}  // namespace spotvol::metrics
