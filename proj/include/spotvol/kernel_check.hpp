#pragma once

// Numerical verification of the limit identities satisfied by the Dirichlet
// and Fejer kernels, with a pass/fail verdict per identity.

#include <string>
#include <vector>

namespace spotvol::kcheck {

struct LemmaRow {
  std::string name;
  std::string description;
  double target = 0.0;
  std::vector<int> orders;
  std::vector<double> observed;
  std::vector<double> errors;      // relative to target (absolute when target is 0)
  std::vector<double> tolerances;  // 10 / order
  double convergence_order = 0.0;  // least-squares slope of -log(error) on log(order)
  bool exact = false;              // identity holds to rounding at every order
  bool counted = true;             // informational rows do not affect the verdict
  bool pass = false;
};

struct SuiteOptions {
  std::vector<int> orders{16, 32, 64, 128, 256, 512};
  int quadrature_points = 1 << 16;
  int jobs = 1;
};

struct SuiteReport {
  std::vector<LemmaRow> rows;
  bool pass = false;
};

SuiteReport run_lemma_suite(const SuiteOptions& opts = {});

// Periodic trapezoid rule for f on [a, a + 2 pi) with `points` nodes.
template <class F>
double periodic_trapezoid(F&& f, double a, int points);

}  // namespace spotvol::kcheck

#include <numbers>

template <class F>
double spotvol::kcheck::periodic_trapezoid(F&& f, double a, int points) {
  const double h = 2.0 * std::numbers::pi / points;
  double s = 0.0;
  for (int i = 0; i < points; ++i) s += f(a + i * h);
  return s * h;
}
