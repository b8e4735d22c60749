#include "spotvol/kernel_check.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>

#include "spotvol/errors.hpp"
#include "spotvol/kernels.hpp"
#include "spotvol/parallel.hpp"

namespace spotvol::kcheck {

namespace {

constexpr double kPi = std::numbers::pi;
using kernels::KernelOrder;

// Composite Simpson rule on [a, b] with an even number of panels.
template <class F>
double simpson(F&& f, double a, double b, int panels) {
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

struct Spec {
  std::string name;
  std::string description;
  double target;
  bool counted = true;
  std::function<double(int order)> observe;
  std::function<int(int order)> effective_order = [](int o) { return o; };
};

// n * int_0^x D_N^2(phi_n(x) - phi_n(y)) dy on the grid t_j = 2 pi j / n, with
// phi_n(y) the grid point at or below y. The last cell is only partly covered.
double discrete_dirichlet(int n, int N, double x, double upper) {
  const double dt = 2.0 * kPi / n;
  const long m = static_cast<long>(std::floor(x / dt));  // phi_n(x) = t_m
  const double tm = m * dt;
  double s = 0.0;
  for (long j = 0; j * dt < upper; ++j) {
    const double lo = j * dt;
    const double len = std::min(lo + dt, upper) - lo;
    const double d = kernels::dirichlet(KernelOrder(N), tm - lo);
    s += len * d * d;
  }
  return n * s;
}

std::vector<Spec> build_specs(int q) {
  std::vector<Spec> specs;
  specs.push_back({"fejer_mass", "int_{-pi}^{pi} F_M", 2.0 * kPi, true, [q](int M) {
                     return periodic_trapezoid([&](double x) { return kernels::fejer(KernelOrder(M), x); },
                                               -kPi, q);
                   }});
  specs.push_back({"fejer_square", "(1/M) int F_M^2", 4.0 * kPi / 3.0, true, [q](int M) {
                     return periodic_trapezoid(
                                [&](double x) {
                                  const double f = kernels::fejer(KernelOrder(M), x);
                                  return f * f;
                                },
                                -kPi, q) /
                            M;
                   }});
  {
    const double delta = 0.5;
    specs.push_back({"fejer_tail_fixed", "(M+1) int_{0.5}^{pi} F_M", 1.0 / std::tan(delta / 2.0), true,
                     [q, delta](int M) {
                       return (M + 1) *
                              simpson([&](double x) { return kernels::fejer(KernelOrder(M), x); },
                                      delta, kPi, q);
                     }});
  }
  // Lower limit 2 pi/(M+1): M times the tail grows linearly, so no C/M bound
  // is observable. Reported, not scored.
  specs.push_back({"fejer_tail_moving", "M int_{2pi/(M+1)}^{pi} F_M (grows ~ M)", 0.0, false,
                   [q](int M) {
                     return M * simpson([&](double x) { return kernels::fejer(KernelOrder(M), x); },
                                        2.0 * kPi / (M + 1), kPi, q);
                   }});
  specs.push_back({"fejer_d1", "(1/M^3) int |F_M'|^2", 2.0 * kPi / 15.0, true, [q](int M) {
                     return periodic_trapezoid(
                                [&](double x) {
                                  const double d = kernels::fejer_derivatives(KernelOrder(M), x).first;
                                  return d * d;
                                },
                                -kPi, q) /
                            std::pow(M, 3);
                   }});
  specs.push_back({"fejer_d2", "(1/M^5) int |F_M''|^2", 4.0 * kPi / 105.0, true, [q](int M) {
                     return periodic_trapezoid(
                                [&](double x) {
                                  const double d = kernels::fejer_derivatives(KernelOrder(M), x).second;
                                  return d * d;
                                },
                                -kPi, q) /
                            std::pow(M, 5);
                   }});
  specs.push_back({"fejer_localization", "(1/M) int F_M^2(1-y)(2+sin y) dy / (2+sin 1)",
                   4.0 * kPi / 3.0, true, [q](int M) {
                     const double x = 1.0;
                     return periodic_trapezoid(
                                [&](double y) {
                                  const double f = kernels::fejer(KernelOrder(M), x - y);
                                  return f * f * (2.0 + std::sin(y));
                                },
                                -kPi, q) /
                            (M * (2.0 + std::sin(x)));
                   }});
  specs.push_back({"dirichlet_d1", "(1/N) int_0^{2pi} |D_N'|^2", kPi / 3.0, true, [q](int N) {
                     return periodic_trapezoid(
                                [&](double x) {
                                  const double d = kernels::dirichlet_derivatives(KernelOrder(N), x).first;
                                  return d * d;
                                },
                                0.0, q) /
                            N;
                   }});
  specs.push_back({"dirichlet_d2", "(1/N^3) int_0^{2pi} |D_N''|^2", kPi / 5.0, true, [q](int N) {
                     return periodic_trapezoid(
                                [&](double x) {
                                  const double d =
                                      kernels::dirichlet_derivatives(KernelOrder(N), x).second;
                                  return d * d;
                                },
                                0.0, q) /
                            std::pow(N, 3);
                   }});
  specs.push_back({"dirichlet_half_mass", "N int_0^1 D_N^2(1-y) dy", kPi / 2.0, true, [q](int N) {
                     return N * simpson(
                                    [&](double y) {
                                      const double d = kernels::dirichlet(KernelOrder(N), 1.0 - y);
                                      return d * d;
                                    },
                                    0.0, 1.0, q);
                   }});
  for (double c : {0.5, 0.75, 1.0}) {
    const double target = kPi * (1.0 + 2.0 * kernels::k_constant(2.0 * c));
    char name[64];
    std::snprintf(name, sizeof name, "dirichlet_discrete_c%.2f", c);
    // x sits mid-cell so the partial cell contributes half its weight.
    specs.push_back({name, "n int_0^x D_N^2(phi(x)-phi(y)) dy, N = cn", target, true,
                     [c](int n) {
                       const int N = static_cast<int>(std::floor(c * n));
                       const double x = 2.0 * kPi * (std::floor(n / 2.0) + 0.5) / n;
                       return discrete_dirichlet(n, N, x, x);
                     },
                     [c](int n) { return static_cast<int>(std::floor(c * n)); }});
  }
  specs.push_back({"dirichlet_far_field", "n int_0^{x-0.5} D_N^2(phi(x)-phi(y)) dy, N = n/2", 0.0,
                   true,
                   [](int n) {
                     const int N = n / 2;
                     const double x = 2.0 * kPi * (std::floor(n / 2.0) + 0.5) / n;
                     return discrete_dirichlet(n, N, x, x - 0.5);
                   },
                   [](int n) { return n / 2; }});
  return specs;
}

}  // namespace

SuiteReport run_lemma_suite(const SuiteOptions& opts) {
  require(!opts.orders.empty(), "lemma suite needs at least one order");
  for (int o : opts.orders) require(o >= 4, "lemma suite orders must be >= 4");
  require(opts.quadrature_points >= 16, "quadrature needs at least 16 points");
  std::vector<int> orders = opts.orders;
  std::sort(orders.begin(), orders.end());

  const std::vector<Spec> specs = build_specs(opts.quadrature_points);
  SuiteReport report;
  report.rows.resize(specs.size());
  parallel_for(specs.size(), opts.jobs, [&](std::size_t s) {
    const Spec& sp = specs[s];
    LemmaRow row;
    row.name = sp.name;
    row.description = sp.description;
    row.target = sp.target;
    row.counted = sp.counted;
    for (int o : orders) {
      const double v = sp.observe(o);
      const double err =
          sp.target != 0.0 ? std::abs(v - sp.target) / std::abs(sp.target) : std::abs(v);
      row.orders.push_back(o);
      row.observed.push_back(v);
      row.errors.push_back(err);
      row.tolerances.push_back(10.0 / sp.effective_order(o));
    }
    row.exact = std::all_of(row.errors.begin(), row.errors.end(), [](double e) { return e < 1e-12; });
    if (row.orders.size() >= 2) {
      double mx = 0.0, my = 0.0;
      const double k = double(row.orders.size());
      std::vector<double> lx, ly;
      for (std::size_t i = 0; i < row.orders.size(); ++i) {
        lx.push_back(std::log(double(row.orders[i])));
        ly.push_back(-std::log(std::max(row.errors[i], 1e-16)));
        mx += lx.back() / k;
        my += ly.back() / k;
      }
      double sxy = 0.0, sxx = 0.0;
      for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
      }
      row.convergence_order = sxx > 0.0 ? sxy / sxx : 0.0;
    }
    const bool within = row.errors.back() <= row.tolerances.back();
    const bool shrinking = row.orders.size() < 2 ||
                           (row.convergence_order > 0.0 && row.errors.back() <= row.errors.front());
    row.pass = row.exact || (within && shrinking);
    report.rows[s] = std::move(row);
  });
  report.pass = std::all_of(report.rows.begin(), report.rows.end(),
                            [](const LemmaRow& r) { return !r.counted || r.pass; });
  return report;
}

}  // namespace spotvol::kcheck
