#include "spotvol/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "spotvol/errors.hpp"
#include "spotvol/kernels.hpp"
#include "spotvol/parallel.hpp"

namespace spotvol::metrics {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kZ975 = 1.959963984540054;

// Index of `t` in an ascending vector, or npos when it is not (nearly) present.
std::size_t find_time(const std::vector<double>& ts, double t, double tol) {
  const auto it = std::lower_bound(ts.begin(), ts.end(), t - tol);
  if (it != ts.end() && std::abs(*it - t) <= tol) return static_cast<std::size_t>(it - ts.begin());
  return static_cast<std::size_t>(-1);
}

// Value of a step path (last observation at or before t).
double value_at(const PricePath& path, double t) {
  const double tol = 1e-9 * path.horizon;
  const auto it = std::upper_bound(path.timestamps.begin(), path.timestamps.end(), t + tol);
  require(it != path.timestamps.begin(), "time precedes the first observation");
  return path.logprices[static_cast<std::size_t>(it - path.timestamps.begin()) - 1];
}

}  // namespace

std::vector<double> riemann_weights(std::span<const double> grid, double horizon) {
  require(!grid.empty(), "empty evaluation grid");
  require(horizon > 0.0, "horizon must be positive");
  std::vector<double> w(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double next = i + 1 < grid.size() ? grid[i + 1] : horizon;
    require(next >= grid[i], "evaluation grid must be ascending and inside [0, T]");
    w[i] = (next - grid[i]) / horizon;
  }
  w[0] += grid[0] / horizon;
  return w;
}

PathError path_error(const SpotVolPath& est, const SpotVolPath& truth) {
  require(est.grid.size() == truth.grid.size() && est.values.size() == truth.values.size() &&
              est.values.size() == est.grid.size(),
          "estimate and truth grids differ in size");
  require(est.horizon == truth.horizon, "estimate and truth horizons differ");
  const double tol = 1e-9 * est.horizon;
  for (std::size_t i = 0; i < est.grid.size(); ++i) {
    require(std::abs(est.grid[i] - truth.grid[i]) <= tol, "estimate and truth grids differ");
  }
  const std::vector<double> w = riemann_weights(est.grid, est.horizon);
  PathError e;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double d = est.values[i] - truth.values[i];
    e.ise += w[i] * d * d;
    e.iae += w[i] * std::abs(d);
  }
  return e;
}

SpotVolPath sample_at(const SpotVolPath& full, std::span<const double> grid) {
  require(full.grid.size() == full.values.size() && full.grid.size() >= 2,
          "full-resolution path is malformed");
  SpotVolPath out;
  out.horizon = full.horizon;
  out.grid.assign(grid.begin(), grid.end());
  out.values.reserve(grid.size());
  const double tol = 1e-9 * full.horizon;
  for (double t : grid) {
    require(t >= full.grid.front() - tol && t <= full.grid.back() + tol,
            "grid point outside the path");
    const std::size_t idx = find_time(full.grid, t, tol);
    if (idx != static_cast<std::size_t>(-1)) {
      out.values.push_back(full.values[idx]);
      continue;
    }
    const auto it = std::upper_bound(full.grid.begin(), full.grid.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - full.grid.begin());
    const std::size_t lo = hi - 1;
    const double u = (t - full.grid[lo]) / (full.grid[hi] - full.grid[lo]);
    out.values.push_back((1.0 - u) * full.values[lo] + u * full.values[hi]);
  }
  return out;
}

Regime parse_regime(const std::string& s) {
  if (s == "notef") return Regime::NoNoiseSubopt;
  if (s == "ef") return Regime::NoNoiseOpt;
  if (s == "notefm") return Regime::NoiseSubopt;
  if (s == "efm") return Regime::NoiseOpt;
  throw ValidationError("unknown regime '" + s + "' (expected notef, ef, notefm or efm)");
}

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::NoNoiseSubopt: return "notef";
    case Regime::NoNoiseOpt: return "ef";
    case Regime::NoiseSubopt: return "notefm";
    case Regime::NoiseOpt: return "efm";
  }
  return "?";
}

bool regime_has_noise(Regime r) { return r == Regime::NoiseSubopt || r == Regime::NoiseOpt; }

void CltSpec::validate() const {
  require(c > 0.0 && a > 0.0, "regime constants c and a must be positive");
  require(tau > 1.0 && tau < 2.0, "tau must lie in (1, 2)");
}

EstimatorConfig regime_config(const CltSpec& spec, std::size_t n) {
  spec.validate();
  const double nd = static_cast<double>(n);
  EstimatorConfig cfg;
  switch (spec.regime) {
    case Regime::NoNoiseSubopt:
      cfg.N = static_cast<int>(std::floor(spec.c * nd));
      cfg.M = static_cast<int>(std::floor(spec.a * std::pow(nd, 1.0 / spec.tau)));
      break;
    case Regime::NoNoiseOpt:
      cfg.N = static_cast<int>(std::floor(spec.c * nd));
      cfg.M = static_cast<int>(std::floor(spec.a * std::sqrt(nd)));
      break;
    case Regime::NoiseSubopt:
      cfg.N = static_cast<int>(std::floor(spec.c * std::sqrt(nd)));
      cfg.M = static_cast<int>(std::floor(spec.a * std::pow(double(cfg.N), 1.0 / spec.tau)));
      break;
    case Regime::NoiseOpt:
      cfg.N = static_cast<int>(std::floor(spec.c * std::sqrt(nd)));
      cfg.M = static_cast<int>(std::floor(spec.a * std::sqrt(double(cfg.N))));
      break;
  }
  cfg.validate(n);
  return cfg;
}

double clt_rate(Regime r, std::size_t n, int M) {
  require(M > 0, "rate needs M > 0");
  const double nd = static_cast<double>(n);
  return regime_has_noise(r) ? std::pow(nd, 0.25) / std::sqrt(double(M))
                             : std::sqrt(nd / double(M));
}

double asymptotic_variance(const CltSpec& spec, double sigma2, double gamma2, double xi) {
  spec.validate();
  const double s4 = sigma2 * sigma2;
  const double c = spec.c, a = spec.a;
  const double no_noise = (4.0 / 3.0) * (1.0 + 2.0 * kernels::k_constant(2.0 * c)) * s4;
  const double noise = (2.0 / (3.0 * c)) * s4 + c * (2.0 * kPi / 9.0) * sigma2 * xi +
                       c * c * c * (4.0 * kPi * kPi / 15.0) * xi * xi;
  switch (spec.regime) {
    case Regime::NoNoiseSubopt: return no_noise;
    case Regime::NoNoiseOpt: return no_noise + (2.0 * kPi / (3.0 * a * a)) * gamma2;
    case Regime::NoiseSubopt: return noise;
    case Regime::NoiseOpt: return noise + (2.0 * kPi / (3.0 * a * a * c)) * gamma2;
  }
  return 0.0;
}

double variance_to_circle(double sigma2_per_day) { return sigma2_per_day / (2.0 * kPi); }

double volvol_to_circle(double gamma2_per_day) {
  return gamma2_per_day / (8.0 * kPi * kPi * kPi);
}

Moments moments(std::span<const double> x) {
  require(x.size() >= 2, "moments need at least two observations");
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  Moments m;
  m.mean = mean;
  m.variance = m2 * n / (n - 1.0);
  if (m2 > 0.0) {
    m.skewness = m3 / std::pow(m2, 1.5);
    m.kurtosis = m4 / (m2 * m2);
  }
  return m;
}

JarqueBera jarque_bera(std::span<const double> x) {
  require(x.size() >= 8, "Jarque-Bera needs at least 8 observations");
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  require(*hi > *lo, "Jarque-Bera is undefined for a constant sample");
  const Moments m = moments(x);
  const double n = static_cast<double>(x.size());
  const double k = m.kurtosis - 3.0;
  JarqueBera jb;
  jb.statistic = n / 6.0 * (m.skewness * m.skewness + 0.25 * k * k);
  jb.p_value = std::exp(-0.5 * jb.statistic);  // chi-squared(2) upper tail
  return jb;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double ks_distance(std::span<const double> x) {
  require(!x.empty(), "KS distance needs a sample");
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = normal_cdf(s[i]);
    d = std::max({d, (double(i) + 1.0) / n - f, f - double(i) / n});
  }
  return d;
}

std::vector<double> midpoint_grid(double horizon, double h) {
  require(horizon > 0.0 && h > 0.0 && h <= horizon, "need 0 < h <= T");
  const long count = std::lround(std::floor(horizon / h + 1e-9));
  std::vector<double> g(static_cast<std::size_t>(count));
  for (long j = 0; j < count; ++j) g[static_cast<std::size_t>(j)] = (double(j) + 0.5) * h;
  return g;
}

std::vector<double> start_grid(double horizon, double h) {
  require(horizon > 0.0 && h > 0.0 && h < horizon, "need 0 < h < T");
  const long count = std::lround(std::floor(horizon / h + 1e-9));
  std::vector<double> g;
  for (long j = 1; j < count; ++j) g.push_back(double(j) * h);
  return g;
}

std::vector<double> standardized_returns(const PricePath& path, const SpotVolPath& vol,
                                         double h) {
  path.validate();
  require(h > 0.0 && h <= path.horizon, "return horizon must lie in (0, T]");
  require(vol.grid.size() == vol.values.size(), "malformed volatility path");
  const double hd = h / path.horizon;
  const double tol = 1e-9 * path.horizon;
  std::vector<double> z;
  z.reserve(vol.grid.size());
  for (std::size_t j = 0; j < vol.grid.size(); ++j) {
    // The return interval is the h-cell [t0, t0 + h] containing the grid point.
    const double t0 = std::floor(vol.grid[j] / h + 1e-9) * h;
    const double t1 = t0 + h;
    require(vol.grid[j] >= 0.0 && t1 <= path.horizon + tol,
            "volatility grid point has no complete return interval");
    const double v = vol.values[j];
    if (!(v > 0.0)) throw NumericalError("nonpositive variance estimate at t=" +
                                         std::to_string(vol.grid[j]) + "s");
    z.push_back((value_at(path, t1) - value_at(path, t0)) / std::sqrt(v * hd));
  }
  return z;
}

CltResult clt_check(const sim::ModelParams& model, const CltSpec& spec, const CltOptions& opts) {
  spec.validate();
  require(opts.n_paths >= 2, "CLT check needs at least two paths");
  require(opts.avar_scale > 0.0, "avar scale must be positive");
  const EstimatorConfig cfg = regime_config(spec, opts.n);
  require(cfg.M >= 4, "regime parameters give M < 4");
  const bool noisy = regime_has_noise(spec.regime);
  const double t_eval = spec.t_eval.value_or(0.5 * opts.horizon);
  const double rate = clt_rate(spec.regime, opts.n, cfg.M);
  const std::vector<double> grid{t_eval};

  CltResult res;
  res.n = opts.n;
  res.N = cfg.N;
  res.M = cfg.M;
  res.t_eval = t_eval;
  res.z.resize(opts.n_paths);
  parallel_for(opts.n_paths, opts.jobs, [&](std::size_t i) {
    const std::uint64_t seed = sim::derive_seed(opts.seed, i);
    sim::SimulatedPath p = sim::simulate(model, opts.n, opts.horizon, seed);
    if (noisy) {
      p = opts.fixed_xi ? sim::add_noise_variance(std::move(p), *opts.fixed_xi, seed)
                        : sim::add_noise(std::move(p), opts.zeta, seed);
    }
    const PricePath& obs = noisy ? p.noisy_prices : p.prices;
    const SpotVolPath est = estimate_path(obs, cfg, grid);
    const SpotVolPath truth = sample_at(p.true_var, grid);
    SpotVolPath vv;
    vv.grid = p.true_var.grid;
    vv.values = p.true_volvol;
    vv.horizon = p.true_var.horizon;
    const double g2 = sample_at(vv, grid).values[0];
    const double s2 = truth.values[0];
    const double avar = asymptotic_variance(spec, variance_to_circle(s2), volvol_to_circle(g2),
                                            noisy ? p.xi : 0.0);
    const double err = variance_to_circle(est.values[0] - s2);
    res.z[i] = rate * err / std::sqrt(avar * opts.avar_scale);
  });

  for (double z : res.z) {
    if (!std::isfinite(z)) throw NumericalError("non-finite standardized CLT statistic");
  }
  std::size_t inside = 0;
  for (double z : res.z) inside += std::abs(z) <= kZ975 ? 1 : 0;
  res.coverage = double(inside) / double(res.z.size());
  res.ks = ks_distance(res.z);
  res.jb = jarque_bera(res.z);
  const Moments m = moments(res.z);
  res.z_mean = m.mean;
  res.z_var = m.variance;
  return res;
}

double ols_slope(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, "regression needs matched samples");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  require(sxx > 0.0, "regression needs distinct abscissae");
  return sxy / sxx;
}

RateResult rate_check(const sim::ModelParams& model, const CltSpec& spec,
                      std::span<const std::size_t> ns, std::size_t n_paths, std::uint64_t seed,
                      double xi, int jobs) {
  spec.validate();
  require(ns.size() >= 2, "rate check needs at least two sample sizes");
  require(n_paths >= 2, "rate check needs at least two paths");
  require(xi >= 0.0, "noise variance must be nonnegative");
  const double horizon = 23400.0;
  const double t_eval = spec.t_eval.value_or(0.5 * horizon);
  const std::vector<double> grid{t_eval};
  RateResult res;
  std::vector<double> lx, ly;
  for (std::size_t idx = 0; idx < ns.size(); ++idx) {
    const std::size_t n = ns[idx];
    const EstimatorConfig cfg = regime_config(spec, n);
    std::vector<double> sq(n_paths);
    parallel_for(n_paths, jobs, [&](std::size_t i) {
      const std::uint64_t s = sim::derive_seed(seed + idx * 0x100000001ULL, i);
      sim::SimulatedPath p = sim::simulate(model, n, horizon, s);
      if (xi > 0.0) p = sim::add_noise_variance(std::move(p), xi, s);
      const SpotVolPath est = estimate_path(xi > 0.0 ? p.noisy_prices : p.prices, cfg, grid);
      const double d = est.values[0] - sample_at(p.true_var, grid).values[0];
      sq[i] = d * d;
    });
    const double mse = std::accumulate(sq.begin(), sq.end(), 0.0) / double(n_paths);
    res.ns.push_back(n);
    res.rmse.push_back(std::sqrt(mse));
    lx.push_back(std::log(double(n)));
    ly.push_back(std::log(std::sqrt(mse)));
  }
  res.slope = ols_slope(lx, ly);
  return res;
}

}  // namespace spotvol::metrics
