#include "spotvol/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "spotvol/errors.hpp"

namespace spotvol::baseline {

namespace {

// Constants of the tent weight g(x) = min(x, 1-x) in the pre-averaging
// asymptotic variance: psi_2 = int g^2, Phi_11, Phi_12, Phi_22.
constexpr double kPsi2 = 1.0 / 12.0;
constexpr double kPhi11 = 1.0 / 6.0;
constexpr double kPhi12 = 1.0 / 96.0;
constexpr double kPhi22 = 151.0 / 80640.0;

// Seconds of slack when deciding whether an observation sits on a window edge.
double edge_slack(double horizon) { return 1e-9 * horizon; }

struct Window {
  std::size_t first;  // first index with t_i >= start
  std::size_t last;   // one past the last index with t_i <= end
};

Window locate(const std::vector<double>& ts, double start, double end, double slack) {
  const auto lo = std::lower_bound(ts.begin(), ts.end(), start - slack);
  const auto hi = std::upper_bound(ts.begin(), ts.end(), end + slack);
  return {static_cast<std::size_t>(lo - ts.begin()), static_cast<std::size_t>(hi - ts.begin())};
}

// Resolves the window start (seconds) according to the edge policy.
double window_start(double t, double h_seconds, double horizon, WindowEdge edge) {
  require(t >= 0.0 && t < horizon, "evaluation time must lie in [0, T)");
  if (t + h_seconds <= horizon + edge_slack(horizon)) return t;
  switch (edge) {
    case WindowEdge::Reject:
      throw ValidationError("two-scale window [t, t+h] extends beyond the sample (t=" +
                            std::to_string(t) + "s)");
    case WindowEdge::Truncate: return t;
    case WindowEdge::Shift: return horizon - h_seconds;
  }
  return t;
}

double ts_combine(double s_lag, double s_unit, std::size_t n, int k, double h) {
  const double nd = static_cast<double>(n);
  const double nbar = (nd * h - k + 1.0) / (k * h);
  return s_lag / h - (nbar / nd) * s_unit / h;
}

}  // namespace

double exp_kernel(double x) { return 0.5 * std::exp(-std::abs(x)); }

double tent_weight(double x) { return std::min(x, 1.0 - x); }

double phi_k(int k) {
  require(k >= 1, "pre-averaging window must be positive");
  double s = 0.0;
  for (int j = 1; j <= k; ++j) {
    const double g = tent_weight(double(j) / k);
    s += g * g;
  }
  return s;
}

int TwoScaleConfig::lag(std::size_t n) const {
  return static_cast<int>(std::floor(c_k * std::pow(double(n), 2.0 / 3.0)));
}

double TwoScaleConfig::window(std::size_t n) const { return c_h * std::pow(double(n), -1.0 / 6.0); }

void TwoScaleConfig::validate(std::size_t n) const {
  require(c_k > 0.0 && c_h > 0.0, "two-scale constants must be positive");
  require(lag(n) >= 2, "two-scale lag k = floor(c_k n^{2/3}) must be >= 2");
  const double h = window(n);
  require(h > 0.0 && h < 1.0, "two-scale window h must lie in (0, T)");
}

int PreAvgConfig::window(std::size_t n) const {
  const double delta = 1.0 / double(n);
  return static_cast<int>(std::floor(1.0 / (c_k * std::sqrt(delta))));
}

double PreAvgConfig::m(std::size_t n) const {
  const double delta = 1.0 / double(n);
  return c_m * std::pow(delta, -0.75);
}

void PreAvgConfig::validate(std::size_t n) const {
  require(c_k > 0.0 && c_m > 0.0, "pre-averaging constants must be positive");
  const int k = window(n);
  require(k >= 2, "pre-averaging window k must be >= 2");
  require(static_cast<std::size_t>(k) <= n, "pre-averaging window k exceeds n");
  require(m(n) > 0.0 && std::isfinite(m(n)), "pre-averaging bandwidth m must be positive");
}

double two_scale(const PricePath& path, double t, const TwoScaleConfig& cfg) {
  path.validate();
  const std::size_t n = path.increments();
  cfg.validate(n);
  const int k = cfg.lag(n);
  const double h = cfg.window(n);
  const double h_seconds = h * path.horizon;
  const double start = window_start(t, h_seconds, path.horizon, cfg.edge);
  const auto& ts = path.timestamps;
  const auto& p = path.logprices;
  const Window w = locate(ts, start, start + h_seconds, edge_slack(path.horizon));

  // Both endpoints of every squared increment lie in the window; the lag-k
  // pairs then number n h - k + 1, matching n-bar.
  const std::size_t ku = static_cast<std::size_t>(k);
  require(w.last > w.first + ku, "two-scale window contains no usable observations");
  double s_lag = 0.0, s_unit = 0.0;
  for (std::size_t i = w.first; i + ku < w.last; ++i) {
    const double d = p[i + ku] - p[i];
    s_lag += d * d / k;
  }
  for (std::size_t i = w.first; i + 1 < w.last; ++i) {
    const double d = p[i + 1] - p[i];
    s_unit += d * d;
  }
  return ts_combine(s_lag, s_unit, n, k, h);
}

SpotVolPath two_scale_path(const PricePath& path, std::span<const double> grid,
                           const TwoScaleConfig& cfg) {
  path.validate();
  const std::size_t n = path.increments();
  cfg.validate(n);
  const int k = cfg.lag(n);
  const double h = cfg.window(n);
  const double h_seconds = h * path.horizon;
  const auto& p = path.logprices;

  // prefix_lag[i] = sum_{j<i, j+k<=n} (p_{j+k}-p_j)^2/k; prefix_unit[i] = sum_{j<i, j<n} delta_j^2
  std::vector<double> prefix_lag(n + 2, 0.0), prefix_unit(n + 2, 0.0);
  for (std::size_t i = 0; i <= n; ++i) {
    double a = 0.0, b = 0.0;
    if (i + static_cast<std::size_t>(k) <= n) {
      const double d = p[i + static_cast<std::size_t>(k)] - p[i];
      a = d * d / k;
    }
    if (i < n) {
      const double d = p[i + 1] - p[i];
      b = d * d;
    }
    prefix_lag[i + 1] = prefix_lag[i] + a;
    prefix_unit[i + 1] = prefix_unit[i] + b;
  }

  SpotVolPath out;
  out.horizon = path.horizon;
  out.grid.assign(grid.begin(), grid.end());
  out.values.reserve(grid.size());
  for (double t : grid) {
    const double start = window_start(t, h_seconds, path.horizon, cfg.edge);
    const Window w =
        locate(path.timestamps, start, start + h_seconds, edge_slack(path.horizon));
    const std::size_t ku = static_cast<std::size_t>(k);
    require(w.last > w.first + ku, "two-scale window contains no usable observations");
    const double s_lag = prefix_lag[w.last - ku] - prefix_lag[w.first];
    const double s_unit = prefix_unit[w.last - 1] - prefix_unit[w.first];
    out.values.push_back(ts_combine(s_lag, s_unit, n, k, h));
  }
  return out;
}

PreAveraged preaverage(const PricePath& path, int k) {
  const std::size_t n = path.increments();
  require(k >= 2 && static_cast<std::size_t>(k) <= n, "pre-averaging window must satisfy 2 <= k <= n");
  const auto& p = path.logprices;
  std::vector<double> dg(static_cast<std::size_t>(k));
  for (int j = 1; j <= k; ++j) {
    dg[static_cast<std::size_t>(j - 1)] = tent_weight(double(j) / k) - tent_weight(double(j - 1) / k);
  }
  const std::size_t count = n - static_cast<std::size_t>(k) + 1;
  PreAveraged out;
  out.bar.resize(count);
  out.hat.resize(count);
  for (std::size_t i = 1; i <= count; ++i) {
    // The weights sum to zero, so prices are taken relative to p_{i-1}.
    const double ref = p[i - 1];
    double bar = 0.0, hat = 0.0;
    for (int j = 1; j <= k; ++j) {
      const std::size_t idx = i + static_cast<std::size_t>(j) - 2;
      const double w = dg[static_cast<std::size_t>(j - 1)];
      bar -= w * (p[idx] - ref);
      const double d = p[idx + 1] - p[idx];
      hat += w * w * d * d;
    }
    out.bar[i - 1] = bar;
    out.hat[i - 1] = hat;
  }
  return out;
}

double preaveraging(const PricePath& path, double t, const PreAvgConfig& cfg) {
  path.validate();
  const std::size_t n = path.increments();
  cfg.validate(n);
  require(t > 0.0 && t < path.horizon, "evaluation time must lie strictly inside (0, T)");
  const int k = cfg.window(n);
  const double delta = 1.0 / double(n);
  const double bw = cfg.m(n) * delta;
  const double td = t / path.horizon;
  const PreAveraged pa = preaverage(path, k);
  double acc = 0.0, mass = 0.0;
  for (std::size_t i = 1; i <= pa.bar.size(); ++i) {
    const double w = exp_kernel((path.timestamps[i] / path.horizon - td) / bw) / bw;
    acc += w * (pa.bar[i - 1] * pa.bar[i - 1] - 0.5 * pa.hat[i - 1]);
    mass += w * delta;
  }
  double est = acc / phi_k(k);
  if (cfg.edge_correction) est /= mass;
  return est;
}

SpotVolPath preaveraging_path(const PricePath& path, std::span<const double> grid,
                              const PreAvgConfig& cfg) {
  path.validate();
  const std::size_t n = path.increments();
  cfg.validate(n);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    require(grid[g] > 0.0 && grid[g] < path.horizon, "evaluation time must lie strictly inside (0, T)");
    if (g > 0) require(grid[g] > grid[g - 1], "evaluation grid must be ascending");
  }
  const int k = cfg.window(n);
  const double delta = 1.0 / double(n);
  const double bw = cfg.m(n) * delta;
  const PreAveraged pa = preaverage(path, k);
  const std::size_t count = pa.bar.size();
  std::vector<double> x(count), tau(count);
  for (std::size_t i = 1; i <= count; ++i) {
    x[i - 1] = pa.bar[i - 1] * pa.bar[i - 1] - 0.5 * pa.hat[i - 1];
    tau[i - 1] = path.timestamps[i] / path.horizon;
  }

  // Two-sided exponential kernel sums by forward and backward recursion:
  // left(g) = sum_{tau_i <= g} e^{-(g - tau_i)/bw} x_i, right(g) = sum_{tau_i > g} ...
  const std::size_t G = grid.size();
  std::vector<double> left(G), right(G), left_mass(G), right_mass(G);
  {
    double acc = 0.0, m = 0.0, cur = 0.0;
    std::size_t i = 0;
    for (std::size_t g = 0; g < G; ++g) {
      const double tg = grid[g] / path.horizon;
      while (i < count && tau[i] <= tg) {
        const double decay = std::exp(-(tau[i] - cur) / bw);
        acc = acc * decay + x[i];
        m = m * decay + 1.0;
        cur = tau[i];
        ++i;
      }
      const double decay = std::exp(-(tg - cur) / bw);
      left[g] = acc * decay;
      left_mass[g] = m * decay;
    }
  }
  {
    double acc = 0.0, m = 0.0, cur = 1.0;
    std::size_t i = count;
    for (std::size_t g = G; g-- > 0;) {
      const double tg = grid[g] / path.horizon;
      while (i > 0 && tau[i - 1] > tg) {
        const double decay = std::exp(-(cur - tau[i - 1]) / bw);
        acc = acc * decay + x[i - 1];
        m = m * decay + 1.0;
        cur = tau[i - 1];
        --i;
      }
      const double decay = std::exp(-(cur - tg) / bw);
      right[g] = acc * decay;
      right_mass[g] = m * decay;
    }
  }

  const double norm = 0.5 / (bw * phi_k(k));
  SpotVolPath out;
  out.horizon = path.horizon;
  out.grid.assign(grid.begin(), grid.end());
  out.values.resize(G);
  for (std::size_t g = 0; g < G; ++g) {
    double est = norm * (left[g] + right[g]);
    if (cfg.edge_correction) est /= 0.5 * delta / bw * (left_mass[g] + right_mass[g]);
    out.values[g] = est;
  }
  return out;
}

// Two-scale: the subsample count minimises the local error variance
//   V(k) = 8 xi^2 n / k^2 + (4/3) k sigma^4 / n   (per unit window),
// giving k = (12 xi^2 n^2 / sigma^4)^{1/3}; the window h then balances V/h
// against the drift of sigma^2 over a forward window, gamma^2 h / 3.
//
// Pre-averaging: theta = k sqrt(Delta) minimises the local asymptotic variance
//   (4/psi_2^2)(Phi_22 theta sigma^4 + 2 Phi_12 sigma^2 xi / theta + Phi_11 xi^2 / theta^3),
// and the bandwidth b = m Delta balances sqrt(Delta) Gamma int K^2 / b against
// gamma^2 b / 4 for the two-sided exponential kernel.
BaselineTuning tune_baselines(const plugin::AmiseInputs& in) {
  in.validate();
  require(in.iv > 0.0 && in.iq > 0.0 && in.ivv > 0.0 && in.xi > 0.0,
          "baseline tuning needs positive plug-in estimates");
  const double n = static_cast<double>(in.n);
  const double s2 = in.iv / in.T;
  const double s4 = in.iq / in.T;
  const double g2 = in.ivv / in.T;
  const double xi = in.xi;

  BaselineTuning out;
  out.two_scale.edge = WindowEdge::Truncate;
  {
    const double k_opt = std::cbrt(12.0 * xi * xi * n * n / s4);
    const double k = std::max(2.0, std::floor(k_opt));
    const double n23 = std::pow(n, 2.0 / 3.0);
    out.two_scale.c_k = (k + 0.5) / n23;
    const double a = 8.0 * xi * xi * n / (k * k) + (4.0 / 3.0) * k * s4 / n;
    double h = std::sqrt(3.0 * a / g2);
    h = std::clamp(h, 10.0 * k / n, 0.5);
    out.two_scale.c_h = h * std::pow(n, 1.0 / 6.0);
  }
  {
    const double delta = 1.0 / n;
    const double qa = 3.0 * kPhi11 * xi * xi;
    const double qb = 2.0 * kPhi12 * s2 * xi;
    const double qc = -kPhi22 * s4;
    const double u = (-qb + std::sqrt(qb * qb - 4.0 * qa * qc)) / (2.0 * qa);  // u = 1/theta^2
    const double theta = 1.0 / std::sqrt(u);
    const double k = std::max(2.0, std::floor(theta / std::sqrt(delta)));
    out.preavg.c_k = 1.0 / ((k + 0.5) * std::sqrt(delta));
    const double th = k * std::sqrt(delta);
    const double gamma_loc = 4.0 / (kPsi2 * kPsi2) *
                             (kPhi22 * th * s4 + 2.0 * kPhi12 * s2 * xi / th +
                              kPhi11 * xi * xi / (th * th * th));
    double b = std::sqrt(std::sqrt(delta) * gamma_loc / g2);
    b = std::clamp(b, 2.0 * k * delta, 0.5);
    out.preavg.c_m = b * std::pow(delta, -0.25);
  }
  return out;
}

}  // namespace spotvol::baseline
