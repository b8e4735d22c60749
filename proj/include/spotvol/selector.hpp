#pragma once

// Adaptive choice of the cutting frequencies (N, M) by projected gradient
// descent on the conditional asymptotic integrated mean squared error
//
//   Psi(N, M) = (M/N)(2/3) IQ + (1/M)(T/3) IVV + (MN/n)(T/9) xi IV
//             + (N^3 M/n^2)(T^3/15) xi^2.

#include <cstddef>
#include <optional>
#include <vector>

#include "spotvol/plugin.hpp"

namespace spotvol::select {

struct Box {
  double n_lo = 0.0, n_hi = 0.0;
  double m_lo = 0.0, m_hi = 0.0;

  void validate() const;
  bool contains(double N, double M) const;
};

// [floor(sqrt(n)/2), floor(10 sqrt(n))] x [floor(n^{1/4}/10), floor(2 n^{1/4})],
// with the lower M bound raised to 1 when the floor gives 0.
Box default_box(std::size_t n);

struct SelectorOptions {
  std::optional<Box> box;               // default_box(n) when unset
  double c_lambda = 500.0;              // lambda = c_lambda / xi
  std::optional<double> learning_rate;  // overrides c_lambda / xi
  double threshold = 1e-3;
  long max_iters = 100000;
  bool backtracking = true;             // halve the step while Psi increases

  void validate() const;
};

struct SelectorResult {
  int N_star = 0;
  int M_star = 0;
  double N_cont = 0.0;  // last iterate before rounding
  double M_cont = 0.0;
  long iterations = 0;
  bool converged = false;
  bool stalled_at_corner = false;  // never moved off a box corner
  double learning_rate = 0.0;
  std::vector<double> objective_trace;
};

double c_amise(const plugin::AmiseInputs& in, double N, double M);

struct Gradient {
  double dN;
  double dM;
};
Gradient c_amise_gradient(const plugin::AmiseInputs& in, double N, double M);

SelectorResult select_params(const plugin::AmiseInputs& in, const SelectorOptions& opts = {});

// Exhaustive search over the integer points of the box with M < N < n.
struct GridOptimum {
  int N = 0;
  int M = 0;
  double objective = 0.0;
};
GridOptimum grid_search(const plugin::AmiseInputs& in, const Box& box);

}  // namespace spotvol::select
