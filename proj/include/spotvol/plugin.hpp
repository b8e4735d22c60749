#pragma once

// Plug-in estimates of the quantities entering the c-AMISE objective:
// integrated variance, quarticity, vol-of-vol, and the noise variance.
// All integrated quantities are reported per day, one day being the path horizon.

#include <cstddef>
#include <optional>
#include <string>

#include "spotvol/fourier.hpp"

namespace spotvol::plugin {

struct AmiseInputs {
  double iv = 0.0;   // int sigma^2 dt
  double iq = 0.0;   // int sigma^4 dt
  double ivv = 0.0;  // int gamma^2 dt
  double xi = 0.0;   // noise variance
  std::size_t n = 0;
  double T = 1.0;    // days

  void validate() const;
};

struct PluginOptions {
  std::optional<int> n_iv;  // default floor(sqrt(n))
  std::optional<int> m_q;   // default floor(sqrt(n_iv))
  std::optional<int> m_v;   // default floor(sqrt(n_iv))
  // Subtract the estimated contribution of coefficient noise from the
  // vol-of-vol sum. Off by default.
  bool volvol_bias_correction = false;
  double floor = 1e-12;

  // Externally supplied values replace the corresponding estimates.
  std::optional<double> iv_override, iq_override, ivv_override, xi_override;
};

struct PluginReport {
  AmiseInputs inputs;
  bool clamped = false;  // some raw estimate fell below the floor
  std::string clamped_fields;
};

// (1/(2n)) sum_j delta_j^2
double noise_variance(const PricePath& path);

double integrated_variance(const PricePath& path, int n_iv);
double integrated_quarticity(const PricePath& path, int n_iv, int m_q);
double integrated_volvol(const PricePath& path, int n_iv, int m_v, bool bias_correction = false);

// The same estimators working from a shared coefficient sequence (order >= n_iv + m).
double integrated_variance(const FourierCoeffs& pc, int n_iv);
double integrated_quarticity(const FourierCoeffs& pc, int n_iv, int m_q);
double integrated_volvol(const FourierCoeffs& pc, int n_iv, int m_v,
                         bool bias_correction = false);

PluginReport build_amise_inputs(const PricePath& path, const PluginOptions& opts = {});

}  // namespace spotvol::plugin
