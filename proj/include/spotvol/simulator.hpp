#pragma once

// Euler-Maruyama simulation of stochastic-volatility log-prices at the
// observation frequency, plus i.i.d. Gaussian microstructure noise.
//
// Time is measured in days, one day being the simulated horizon. A path with
// n steps therefore uses dt = 1/n.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spotvol/fourier.hpp"

namespace spotvol::sim {

// sigma(t) = exp(beta0 + beta1 tau(t)),  d tau = dZ + alpha tau dt,
// dp = sigma dW + mu dt,  d<W, Z> = rho dt.
struct Sv1fParams {
  double mu = 0.03;
  double beta1 = 0.125;
  double alpha = -0.025;
  double beta0 = 0.125 / (2.0 * -0.025);
  double rho = -0.3;
  std::optional<double> tau0;  // drawn from N(0, -1/(2 alpha)) when unset

  void validate() const;
};

// dp = sigma dW + (mu - sigma^2/2) dt,  d sigma^2 = gamma sigma dZ + theta (alpha - sigma^2) dt.
struct HestonParams {
  double mu = 0.001;
  double theta = 0.3;
  double alpha = 0.002;
  double gamma = 0.03;
  double rho = -0.5;
  std::optional<double> v0;  // drawn from Gamma(2 theta alpha/gamma^2, gamma^2/(2 theta)) when unset

  void validate() const;
  double stationary_shape() const { return 2.0 * theta * alpha / (gamma * gamma); }
  double stationary_scale() const { return gamma * gamma / (2.0 * theta); }
};

// dp = sigma dW + mu dt with sigma^2 constant (per day).
struct ConstantVolParams {
  double variance = 1e-4;
  double mu = 0.0;

  void validate() const;
};

enum class Model { Sv1f, Heston, Constant };

Model parse_model(const std::string& name);
std::string model_name(Model m);

struct ModelParams {
  Model model = Model::Sv1f;
  Sv1fParams sv1f;
  HestonParams heston;
  ConstantVolParams constant;
};

struct SimulatedPath {
  PricePath prices;                 // clean
  PricePath noisy_prices;           // equals prices until noise is added
  SpotVolPath true_var;             // sigma^2 at every timestamp (endpoints included)
  std::vector<double> true_volvol;  // gamma^2(t) = d<sigma^2>/dt at every timestamp
  std::uint64_t seed = 0;
  double zeta = 0.0;
  double xi = 0.0;
  std::size_t truncations = 0;      // Heston: variance evaluations clipped at zero
};

SimulatedPath simulate_sv1f(const Sv1fParams& params, std::size_t n, double horizon_seconds,
                            std::uint64_t seed);
SimulatedPath simulate_heston(const HestonParams& params, std::size_t n, double horizon_seconds,
                              std::uint64_t seed);
SimulatedPath simulate_constant(const ConstantVolParams& params, std::size_t n,
                                double horizon_seconds, std::uint64_t seed);
SimulatedPath simulate(const ModelParams& params, std::size_t n, double horizon_seconds,
                       std::uint64_t seed);

// Noise variance xi = (zeta * std(r))^2, with std(r) taken from this path's clean
// returns unless `fixed_return_std` is given.
SimulatedPath add_noise(SimulatedPath path, double zeta, std::uint64_t seed,
                        std::optional<double> fixed_return_std = std::nullopt);

// Noise with an explicitly chosen variance.
SimulatedPath add_noise_variance(SimulatedPath path, double xi, std::uint64_t seed);

// Seed of the i-th path in a Monte Carlo batch (splitmix64 mixing).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

// Sample standard deviation of the clean log-returns.
double return_std(const PricePath& path);

}  // namespace spotvol::sim
