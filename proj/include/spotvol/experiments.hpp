#pragma once

// Monte Carlo experiments: the (c, a) sweep, the adaptive-vs-baseline
// comparison, and the standardized-return pipeline over a set of days.

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "spotvol/metrics.hpp"
#include "spotvol/plugin.hpp"
#include "spotvol/selector.hpp"
#include "spotvol/simulator.hpp"

namespace spotvol::exp {

struct MonteCarloSetup {
  std::vector<sim::Model> models{sim::Model::Sv1f, sim::Model::Heston};
  sim::ModelParams params;  // parameter values for each model; `model` is ignored
  std::vector<double> zetas{1.0, 2.0, 3.0};
  std::size_t n = 23400;
  double horizon = 23400.0;
  std::size_t n_paths = 200;
  std::uint64_t seed = 1;
  double grid_step = 60.0;  // seconds between evaluation points
  int jobs = 1;

  void validate() const;
};

// Path i of a batch uses the same clean trajectory for every zeta, so cells
// differ only through the noise level.
sim::SimulatedPath simulate_cell_path(const MonteCarloSetup& setup, sim::Model model, double zeta,
                                      std::size_t index);

struct SweepOptions {
  MonteCarloSetup setup;
  std::vector<double> cs{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<double> as{0.1, 0.2, 0.3, 0.4, 0.5};
};

struct SweepRow {
  std::string model;
  double zeta = 0.0;
  double c = 0.0;
  double a = 0.0;
  int N = 0;  // floor(c sqrt(n))
  int M = 0;  // floor(a sqrt(N))
  double mise = 0.0;
  double miae = 0.0;
  double mise_se = 0.0;
  std::size_t paths = 0;
};

std::vector<SweepRow> run_sweep(const SweepOptions& opts);

// Row of `rows` with the smallest MISE among those matching model and zeta.
const SweepRow& sweep_argmin(const std::vector<SweepRow>& rows, const std::string& model,
                             double zeta);

struct ComparisonOptions {
  MonteCarloSetup setup;
  plugin::PluginOptions plugin;
  select::SelectorOptions selector;
};

struct ComparisonRow {
  std::string model;
  double zeta = 0.0;
  std::string method;  // fourier-adaptive | preavg | two-scale
  double mise = 0.0;
  double miae = 0.0;
  double mise_se = 0.0;
  // Mean tuning actually used: (N, M) for Fourier, (k, m) for pre-averaging,
  // (k, h * n) for Two-scale.
  double mean_p1 = 0.0;
  double mean_p2 = 0.0;
  std::size_t paths = 0;
};

std::vector<ComparisonRow> run_comparison(const ComparisonOptions& opts);

struct EmpiricalOptions {
  double h_seconds = 300.0;
  // Evaluate the variance at interval midpoints instead of interval starts.
  bool midpoints = false;
  plugin::PluginOptions plugin;
  select::SelectorOptions selector;
  int jobs = 1;
};

struct DayResult {
  std::string day;
  int N = 0;
  int M = 0;
  std::size_t n_returns = 0;
  metrics::Moments moments;
  metrics::JarqueBera jb;
  bool skipped = false;
  std::string note;
};

struct Summary {
  double mean = 0.0;
  double sd = 0.0;
};

struct EmpiricalReport {
  std::vector<DayResult> days;
  std::size_t used_days = 0;
  Summary mean, variance, skewness, kurtosis, jb_stat, jb_p, N, M;
  double rejection_rate_5 = 0.0;
};

EmpiricalReport run_empirical(const std::vector<std::pair<std::string, PricePath>>& days,
                              const EmpiricalOptions& opts);

// `count` independent simulated sessions, optionally with noise.
std::vector<std::pair<std::string, PricePath>> simulate_days(const sim::ModelParams& params,
                                                             std::size_t count, std::size_t n,
                                                             double horizon, double zeta,
                                                             std::uint64_t seed);

}  // namespace spotvol::exp
