#include "spotvol/simulator.hpp"

#include <cmath>
#include <random>

#include "spotvol/errors.hpp"

namespace spotvol::sim {

namespace {

enum Stream : std::uint32_t { kPriceStream = 1, kNoiseStream = 2 };

std::mt19937_64 make_engine(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

SimulatedPath allocate(std::size_t n, double horizon, std::uint64_t seed) {
  require(n >= 2, "simulation needs n >= 2 steps");
  require(horizon > 0.0, "horizon must be positive");
  SimulatedPath out;
  out.seed = seed;
  out.prices.horizon = horizon;
  out.prices.timestamps.resize(n + 1);
  out.prices.logprices.resize(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    out.prices.timestamps[j] = horizon * static_cast<double>(j) / static_cast<double>(n);
  }
  out.prices.timestamps.back() = horizon;
  out.true_var.horizon = horizon;
  out.true_var.grid = out.prices.timestamps;
  out.true_var.values.resize(n + 1);
  out.true_volvol.resize(n + 1);
  return out;
}

void finish(SimulatedPath& out) { out.noisy_prices = out.prices; }

void check_rho(double rho) { require(std::abs(rho) <= 1.0, "correlation must satisfy |rho| <= 1"); }

}  // namespace

void Sv1fParams::validate() const {
  require(alpha < 0.0, "SV1F requires alpha < 0");
  check_rho(rho);
}

void HestonParams::validate() const {
  require(theta > 0.0, "Heston requires theta > 0");
  require(alpha > 0.0, "Heston requires alpha > 0");
  require(gamma >= 0.0, "Heston requires gamma >= 0");
  if (v0) require(*v0 >= 0.0, "Heston initial variance must be nonnegative");
  check_rho(rho);
}

void ConstantVolParams::validate() const {
  require(variance >= 0.0, "constant variance must be nonnegative");
}

Model parse_model(const std::string& name) {
  if (name == "sv1f") return Model::Sv1f;
  if (name == "heston") return Model::Heston;
  if (name == "constant") return Model::Constant;
  throw ValidationError("unknown model '" + name + "' (expected sv1f, heston or constant)");
}

std::string model_name(Model m) {
  switch (m) {
    case Model::Sv1f: return "sv1f";
    case Model::Heston: return "heston";
    case Model::Constant: return "constant";
  }
  return "unknown";
}

SimulatedPath simulate_sv1f(const Sv1fParams& params, std::size_t n, double horizon,
                            std::uint64_t seed) {
  params.validate();
  SimulatedPath out = allocate(n, horizon, seed);
  auto rng = make_engine(seed, kPriceStream);
  std::normal_distribution<double> normal(0.0, 1.0);

  const double dt = 1.0 / static_cast<double>(n);
  const double sdt = std::sqrt(dt);
  const double rho_perp = std::sqrt(1.0 - params.rho * params.rho);
  double tau = params.tau0 ? *params.tau0 : normal(rng) * std::sqrt(-0.5 / params.alpha);
  double p = std::log(100.0);
  const double g = 2.0 * params.beta1;
  for (std::size_t j = 0;; ++j) {
    const double sigma = std::exp(params.beta0 + params.beta1 * tau);
    out.prices.logprices[j] = p;
    out.true_var.values[j] = sigma * sigma;
    out.true_volvol[j] = g * g * sigma * sigma * sigma * sigma;
    if (j == n) break;
    const double e1 = normal(rng);
    const double e2 = params.rho * e1 + rho_perp * normal(rng);
    p += params.mu * dt + sigma * sdt * e1;
    tau += params.alpha * tau * dt + sdt * e2;
  }
  finish(out);
  return out;
}

SimulatedPath simulate_heston(const HestonParams& params, std::size_t n, double horizon,
                              std::uint64_t seed) {
  params.validate();
  SimulatedPath out = allocate(n, horizon, seed);
  auto rng = make_engine(seed, kPriceStream);
  std::normal_distribution<double> normal(0.0, 1.0);

  double v;
  if (params.v0) {
    v = *params.v0;
  } else if (params.gamma == 0.0) {
    v = params.alpha;
  } else {
    std::gamma_distribution<double> gamma(params.stationary_shape(), params.stationary_scale());
    v = gamma(rng);
  }
  const double dt = 1.0 / static_cast<double>(n);
  const double sdt = std::sqrt(dt);
  const double rho_perp = std::sqrt(1.0 - params.rho * params.rho);
  double p = std::log(100.0);
  for (std::size_t j = 0;; ++j) {
    if (v < 0.0) ++out.truncations;
    const double vp = std::max(v, 0.0);
    out.prices.logprices[j] = p;
    out.true_var.values[j] = vp;
    out.true_volvol[j] = params.gamma * params.gamma * vp;
    if (j == n) break;
    const double e1 = normal(rng);
    const double e2 = params.rho * e1 + rho_perp * normal(rng);
    const double s = std::sqrt(vp);
    p += (params.mu - 0.5 * vp) * dt + s * sdt * e1;
    v += params.theta * (params.alpha - vp) * dt + params.gamma * s * sdt * e2;
  }
  finish(out);
  return out;
}

SimulatedPath simulate_constant(const ConstantVolParams& params, std::size_t n, double horizon,
                                std::uint64_t seed) {
  params.validate();
  SimulatedPath out = allocate(n, horizon, seed);
  auto rng = make_engine(seed, kPriceStream);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double dt = 1.0 / static_cast<double>(n);
  const double step_sd = std::sqrt(params.variance * dt);
  double p = std::log(100.0);
  for (std::size_t j = 0;; ++j) {
    out.prices.logprices[j] = p;
    out.true_var.values[j] = params.variance;
    out.true_volvol[j] = 0.0;
    if (j == n) break;
    p += params.mu * dt + step_sd * normal(rng);
  }
  finish(out);
  return out;
}

SimulatedPath simulate(const ModelParams& params, std::size_t n, double horizon,
                       std::uint64_t seed) {
  switch (params.model) {
    case Model::Sv1f: return simulate_sv1f(params.sv1f, n, horizon, seed);
    case Model::Heston: return simulate_heston(params.heston, n, horizon, seed);
    case Model::Constant: return simulate_constant(params.constant, n, horizon, seed);
  }
  throw ValidationError("unknown model");
}

double return_std(const PricePath& path) {
  const std::size_t n = path.increments();
  require(n >= 2, "return_std needs at least two returns");
  double mean = 0.0;
  for (std::size_t j = 0; j < n; ++j) mean += path.logprices[j + 1] - path.logprices[j];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double d = path.logprices[j + 1] - path.logprices[j] - mean;
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(n - 1));
}

SimulatedPath add_noise_variance(SimulatedPath path, double xi, std::uint64_t seed) {
  require(xi >= 0.0 && std::isfinite(xi), "noise variance must be nonnegative");
  path.xi = xi;
  path.noisy_prices = path.prices;
  if (xi == 0.0) return path;
  auto rng = make_engine(seed, kNoiseStream);
  std::normal_distribution<double> normal(0.0, std::sqrt(xi));
  for (double& p : path.noisy_prices.logprices) p += normal(rng);
  return path;
}

SimulatedPath add_noise(SimulatedPath path, double zeta, std::uint64_t seed,
                        std::optional<double> fixed_return_std) {
  require(zeta >= 0.0 && std::isfinite(zeta), "noise-to-signal ratio must be nonnegative");
  const double sd = fixed_return_std ? *fixed_return_std : return_std(path.prices);
  const double root_xi = zeta * sd;
  path = add_noise_variance(std::move(path), root_xi * root_xi, seed);
  path.zeta = zeta;
  return path;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(base) ^ index);
}

}  // namespace spotvol::sim
