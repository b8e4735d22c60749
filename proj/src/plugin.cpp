#include "spotvol/plugin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spotvol/errors.hpp"

namespace spotvol::plugin {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_orders(int n_iv, int m, std::size_t n) {
  require(n_iv > 0, "N_iv must be positive");
  require(static_cast<std::size_t>(n_iv) < n, "N_iv must be smaller than n");
  require(m >= 0 && m <= n_iv, "plug-in inversion order must satisfy 0 <= M <= N_iv");
}

FourierCoeffs coeffs_for(const PricePath& path, int order) {
  return price_coeffs(rescale_time(path), order);
}

}  // namespace

void AmiseInputs::validate() const {
  require(iv >= 0.0 && iq >= 0.0 && ivv >= 0.0 && xi >= 0.0,
          "c-AMISE inputs must be nonnegative");
  require(std::isfinite(iv) && std::isfinite(iq) && std::isfinite(ivv) && std::isfinite(xi),
          "c-AMISE inputs must be finite");
  require(n >= 2, "c-AMISE needs n >= 2");
  require(T > 0.0, "c-AMISE needs T > 0");
}

double noise_variance(const PricePath& path) {
  const std::size_t n = path.increments();
  require(n >= 2, "noise variance needs n >= 2");
  double rv = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double d = path.logprices[j + 1] - path.logprices[j];
    rv += d * d;
  }
  return rv / (2.0 * static_cast<double>(n));
}

// 2 pi c_0(sigma^2): integrated variance is invariant under the time change.
double integrated_variance(const FourierCoeffs& pc, int n_iv) {
  const FourierCoeffs vc = vol_coeffs(pc, n_iv, 0);
  return kTwoPi * vc[0].real();
}

// Parseval: int sigma_r^4 ds = 2 pi sum |c_k|^2 on [0, 2 pi]; one day spans
// 2 pi radians, so the per-day quarticity carries another factor 2 pi.
double integrated_quarticity(const FourierCoeffs& pc, int n_iv, int m_q) {
  const FourierCoeffs vc = vol_coeffs(pc, n_iv, m_q);
  double s = 0.0;
  for (int k = -m_q; k <= m_q; ++k) s += (vc[k] * vc[-k]).real();
  return kTwoPi * kTwoPi * s;
}

// c_k(d sigma^2) = i k c_k(sigma^2); the convolution of these gives the
// integrated vol-of-vol on [0, 2 pi], rescaled by (2 pi)^2 to per-day units.
double integrated_volvol(const FourierCoeffs& pc, int n_iv, int m_v,
                         bool bias_correction) {
  const FourierCoeffs vc = vol_coeffs(pc, n_iv, m_v);
  double s = 0.0;
  for (int k = -m_v; k <= m_v; ++k) s += double(k) * k * (vc[k] * vc[-k]).real();
  if (bias_correction && m_v > 0) {
    // Without noise an estimated coefficient has E|c_k - c_k^true|^2 ~ 2 c_0^2 / (2N+1);
    // remove that floor from every k != 0 term.
    const double c0 = vc[0].real();
    const double per_coeff = 2.0 * c0 * c0 / (2.0 * n_iv + 1.0);
    double k2 = 0.0;
    for (int k = 1; k <= m_v; ++k) k2 += 2.0 * double(k) * k;
    s -= per_coeff * k2;
  }
  const double rescaled = kTwoPi * kTwoPi / (2.0 * m_v + 1.0) * s;
  return kTwoPi * kTwoPi * rescaled;
}

double integrated_variance(const PricePath& path, int n_iv) {
  check_orders(n_iv, 0, path.increments());
  return integrated_variance(coeffs_for(path, n_iv), n_iv);
}

double integrated_quarticity(const PricePath& path, int n_iv, int m_q) {
  check_orders(n_iv, m_q, path.increments());
  return integrated_quarticity(coeffs_for(path, n_iv + m_q), n_iv, m_q);
}

double integrated_volvol(const PricePath& path, int n_iv, int m_v, bool bias_correction) {
  check_orders(n_iv, m_v, path.increments());
  return integrated_volvol(coeffs_for(path, n_iv + m_v), n_iv, m_v,
                           bias_correction);
}

PluginReport build_amise_inputs(const PricePath& path, const PluginOptions& opts) {
  path.validate();
  const std::size_t n = path.increments();
  const int n_iv = opts.n_iv.value_or(static_cast<int>(std::floor(std::sqrt(double(n)))));
  const int root = static_cast<int>(std::floor(std::sqrt(double(n_iv))));
  const int m_q = opts.m_q.value_or(root);
  const int m_v = opts.m_v.value_or(root);
  check_orders(n_iv, m_q, n);
  check_orders(n_iv, m_v, n);

  const FourierCoeffs pc = coeffs_for(path, n_iv + std::max(m_q, m_v));
  PluginReport report;
  AmiseInputs& in = report.inputs;
  in.n = n;
  in.T = 1.0;
  in.iv = opts.iv_override.value_or(integrated_variance(pc, n_iv));
  in.iq = opts.iq_override.value_or(integrated_quarticity(pc, n_iv, m_q));
  in.ivv = opts.ivv_override.value_or(
      integrated_volvol(pc, n_iv, m_v, opts.volvol_bias_correction));
  in.xi = opts.xi_override.value_or(noise_variance(path));

  auto clamp = [&](double& v, const char* name) {
    if (!(v >= opts.floor)) {
      v = opts.floor;
      report.clamped = true;
      if (!report.clamped_fields.empty()) report.clamped_fields += ',';
      report.clamped_fields += name;
    }
  };
  clamp(in.iv, "iv");
  clamp(in.iq, "iq");
  clamp(in.ivv, "ivv");
  clamp(in.xi, "xi");
  return report;
}

}  // namespace spotvol::plugin
