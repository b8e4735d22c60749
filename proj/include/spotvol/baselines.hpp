#pragma once

// Noise-robust kernel spot-variance estimators used as benchmarks:
// the Two-scale estimator and the Pre-averaging kernel estimator.
// Time inside both is measured in days, one day being the path horizon.

#include <cstddef>
#include <span>

#include "spotvol/fourier.hpp"
#include "spotvol/plugin.hpp"

namespace spotvol::baseline {

// What to do when the forward window [t, t+h] runs past the end of the sample.
enum class WindowEdge {
  Reject,    // throw
  Truncate,  // sum over the observations that exist; normalisation unchanged
  Shift,     // evaluate on [T-h, T] instead
};

struct TwoScaleConfig {
  double c_k = 0.05;  // k = floor(c_k n^{2/3})
  double c_h = 0.5;   // h = c_h n^{-1/6} (days)
  WindowEdge edge = WindowEdge::Reject;

  int lag(std::size_t n) const;
  double window(std::size_t n) const;
  void validate(std::size_t n) const;
};

struct PreAvgConfig {
  double c_k = 0.1;  // k = floor(1/(c_k sqrt(Delta_n)))
  double c_m = 0.1;  // m = c_m Delta_n^{-3/4}
  // Divide by the kernel mass falling inside the sample; off reproduces the
  // plain kernel sum.
  bool edge_correction = false;

  int window(std::size_t n) const;
  double m(std::size_t n) const;
  void validate(std::size_t n) const;
};

// K(x) = exp(-|x|)/2
double exp_kernel(double x);
// g(x) = min(x, 1-x)
double tent_weight(double x);
// phi_k(g) = sum_{j=1}^k g(j/k)^2
double phi_k(int k);

double two_scale(const PricePath& path, double t_seconds, const TwoScaleConfig& cfg);
double preaveraging(const PricePath& path, double t_seconds, const PreAvgConfig& cfg);

// Pre-averaged quantities for i = 1..n-k+1 (stored at index i-1).
struct PreAveraged {
  std::vector<double> bar;  // P-bar_i
  std::vector<double> hat;  // P-hat_i
};
PreAveraged preaverage(const PricePath& path, int k);

// Whole-path evaluation on an ascending grid. Mathematically identical to
// calling the pointwise estimators at each grid point, in O(n + grid) time.
SpotVolPath two_scale_path(const PricePath& path, std::span<const double> grid_seconds,
                           const TwoScaleConfig& cfg);
SpotVolPath preaveraging_path(const PricePath& path, std::span<const double> grid_seconds,
                              const PreAvgConfig& cfg);

struct BaselineTuning {
  TwoScaleConfig two_scale;
  PreAvgConfig preavg;
};

// Tuning constants from plug-in estimates of IV, IQ, IVV and xi. See
// baselines.cpp for the objective each choice minimises.
BaselineTuning tune_baselines(const plugin::AmiseInputs& in);

}  // namespace spotvol::baseline
