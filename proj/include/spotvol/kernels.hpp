#pragma once

// Rescaled Dirichlet and Fejer kernels on the circle, with termwise derivatives.
//
//   D_N(x) = 1/(2N+1) * sum_{|k|<=N} e^{ikx}
//   F_M(x) = sum_{|k|<=M} (1 - |k|/(M+1)) e^{ikx}
//
// Closed sine-ratio forms are used away from multiples of 2*pi; near them the
// direct weighted sums are evaluated instead.

#include <utility>

namespace spotvol::kernels {

struct KernelOrder {
  int value;
  explicit KernelOrder(int v);
};

struct Derivatives {
  double first;
  double second;
};

double dirichlet(KernelOrder n, double x);
double fejer(KernelOrder m, double x);

Derivatives dirichlet_derivatives(KernelOrder n, double x);
Derivatives fejer_derivatives(KernelOrder m, double x);

// K(c) = r(c)(1 - r(c)) / (2c^2), r(c) = c - floor(c). Throws for c <= 0.
double k_constant(double c);

// Reduces x into (-pi, pi].
double wrap_angle(double x);

}  // namespace spotvol::kernels
