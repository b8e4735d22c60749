#include "spotvol/selector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spotvol/errors.hpp"

namespace spotvol::select {

void Box::validate() const {
  require(n_lo > 0.0 && m_lo > 0.0, "selector box bounds must be positive");
  require(n_lo < n_hi, "selector box needs N_lo < N_hi");
  require(m_lo < m_hi, "selector box needs M_lo < M_hi");
}

bool Box::contains(double N, double M) const {
  return N >= n_lo && N <= n_hi && M >= m_lo && M <= m_hi;
}

Box default_box(std::size_t n) {
  require(n >= 16, "default selector box needs n >= 16");
  const double rn = std::sqrt(double(n));
  const double qn = std::pow(double(n), 0.25);
  Box b;
  b.n_lo = std::floor(0.5 * rn);
  b.n_hi = std::floor(10.0 * rn);
  b.m_lo = std::max(1.0, std::floor(0.1 * qn));
  b.m_hi = std::floor(2.0 * qn);
  return b;
}

void SelectorOptions::validate() const {
  if (box) box->validate();
  require(c_lambda > 0.0, "c_lambda must be positive");
  if (learning_rate) require(*learning_rate > 0.0, "learning rate must be positive");
  require(threshold > 0.0, "stopping threshold must be positive");
  require(max_iters > 0, "max_iters must be positive");
}

double c_amise(const plugin::AmiseInputs& in, double N, double M) {
  require(N > 0.0 && M > 0.0, "c-AMISE needs N, M > 0");
  const double n = static_cast<double>(in.n);
  const double T = in.T;
  return (M / N) * (2.0 / 3.0) * in.iq + (1.0 / M) * (T / 3.0) * in.ivv +
         (M * N / n) * (T / 9.0) * in.xi * in.iv +
         (N * N * N * M / (n * n)) * (T * T * T / 15.0) * in.xi * in.xi;
}

Gradient c_amise_gradient(const plugin::AmiseInputs& in, double N, double M) {
  require(N > 0.0 && M > 0.0, "c-AMISE needs N, M > 0");
  const double n = static_cast<double>(in.n);
  const double T = in.T;
  const double a = (2.0 / 3.0) * in.iq;
  const double b = (T / 3.0) * in.ivv;
  const double c = (T / 9.0) * in.xi * in.iv / n;
  const double d = (T * T * T / 15.0) * in.xi * in.xi / (n * n);
  return {-(M / (N * N)) * a + M * c + 3.0 * N * N * M * d,
          a / N - b / (M * M) + N * c + N * N * N * d};
}

namespace {

double project(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

}  // namespace

SelectorResult select_params(const plugin::AmiseInputs& in, const SelectorOptions& opts) {
  in.validate();
  opts.validate();
  const Box box = opts.box ? *opts.box : default_box(in.n);
  box.validate();

  SelectorResult res;
  double lambda;
  if (opts.learning_rate) {
    lambda = *opts.learning_rate;
  } else if (in.xi > 0.0) {
    lambda = opts.c_lambda / in.xi;
  } else {
    lambda = std::numeric_limits<double>::infinity();
  }
  res.learning_rate = lambda;

  double N = box.n_lo, M = box.m_lo;
  double psi = c_amise(in, N, M);
  res.objective_trace.push_back(psi);
  bool moved = false;

  for (long k = 1; k <= opts.max_iters; ++k) {
    const Gradient g = c_amise_gradient(in, N, M);
    // An unbounded rate sends every coordinate with a nonzero partial to the
    // box face it points at; use the smallest step that gets there.
    double step = lambda;
    if (!std::isfinite(step)) {
      step = 0.0;
      if (g.dN != 0.0) step = std::max(step, (box.n_hi - box.n_lo) / std::abs(g.dN));
      if (g.dM != 0.0) step = std::max(step, (box.m_hi - box.m_lo) / std::abs(g.dM));
    }
    double Nn = project(N - step * g.dN, box.n_lo, box.n_hi);
    double Mn = project(M - step * g.dM, box.m_lo, box.m_hi);
    double psi_n = c_amise(in, Nn, Mn);
    if (opts.backtracking) {
      for (int h = 0; h < 80 && psi_n > psi; ++h) {
        step *= 0.5;
        Nn = project(N - step * g.dN, box.n_lo, box.n_hi);
        Mn = project(M - step * g.dM, box.m_lo, box.m_hi);
        psi_n = c_amise(in, Nn, Mn);
      }
      if (psi_n > psi) {
        Nn = N;
        Mn = M;
        psi_n = psi;
      }
    }
    if (!std::isfinite(psi_n) || !std::isfinite(Nn) || !std::isfinite(Mn)) {
      throw NumericalError("c-AMISE descent produced a non-finite iterate");
    }
    if (!box.contains(Nn, Mn)) throw NumericalError("selector iterate left the box");
    if (Nn != N || Mn != M) moved = true;
    const double delta = psi > 0.0 ? std::abs(psi_n - psi) / psi : 0.0;
    N = Nn;
    M = Mn;
    psi = psi_n;
    res.objective_trace.push_back(psi);
    res.iterations = k;
    if (delta < opts.threshold) {
      res.converged = true;
      break;
    }
  }

  const bool corner = (N == box.n_lo || N == box.n_hi) && (M == box.m_lo || M == box.m_hi);
  if (!moved && corner) {
    res.converged = false;
    res.stalled_at_corner = true;
  }

  res.N_cont = N;
  res.M_cont = M;
  long Ns = std::lround(N);
  long Ms = std::lround(M);
  const long n = static_cast<long>(in.n);
  Ns = std::min(Ns, n - 1);
  if (Ms >= Ns) Ms = Ns - 1;
  require(Ms >= 1 && Ns >= 2, "selected cutting frequencies are degenerate");
  res.N_star = static_cast<int>(Ns);
  res.M_star = static_cast<int>(Ms);
  return res;
}

GridOptimum grid_search(const plugin::AmiseInputs& in, const Box& box) {
  in.validate();
  box.validate();
  GridOptimum best;
  best.objective = std::numeric_limits<double>::infinity();
  const long n = static_cast<long>(in.n);
  for (long N = static_cast<long>(std::ceil(box.n_lo)); N <= static_cast<long>(std::floor(box.n_hi));
       ++N) {
    if (N >= n) break;
    for (long M = static_cast<long>(std::ceil(box.m_lo));
         M <= static_cast<long>(std::floor(box.m_hi)) && M < N; ++M) {
      const double v = c_amise(in, double(N), double(M));
      if (v < best.objective) best = {static_cast<int>(N), static_cast<int>(M), v};
    }
  }
  require(std::isfinite(best.objective), "selector box contains no admissible integer point");
  return best;
}

}  // namespace spotvol::select
