#pragma once

#include <cmath>

#include "dehaze/airlight.hpp"
#include "dehaze/image.hpp"
#include "dehaze/transmission.hpp"
#include "dehaze/wgif.hpp"

namespace dehaze {

struct RecoveryParams {
  double t0 = 0.1;     // floor of the division by t
  double eta = 4.0;    // gate midpoint sits at t = 1 / eta
  double slope = 32.0;
  bool clamp_output = true;

  void validate() const;
};

/// psi(t) = 1 / (1 + exp(slope * (1 - eta * t))), evaluated without overflow.
inline double gate(double t, double eta, double slope = 32.0) {
  const double x = slope * (1.0 - eta * t);
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

/// d psi / d t.
inline double gate_derivative(double t, double eta, double slope = 32.0) {
  const double psi = gate(t, eta, slope);
  return slope * eta * psi * (1.0 - psi);
}

/// Unclamped fused recovery of one sample and its derivative with respect
/// to t. `base` and `detail` are the two layers of the hazy sample.
struct FusedSample {
  double value;
  double d_dt;
};

inline FusedSample fused_sample(double base, double detail, double airlight, double t,
                                const RecoveryParams& p) {
  const double psi = gate(t, p.eta, p.slope);
  const double dpsi = gate_derivative(t, p.eta, p.slope);
  const double denom = std::max(t, p.t0);
  const double numer = base + psi * detail - airlight;
  FusedSample s;
  s.value = numer / denom + (1.0 - psi) * detail + airlight;
  s.d_dt = dpsi * detail / denom - dpsi * detail;
  if (t > p.t0) s.d_dt -= numer / (denom * denom);
  return s;
}

/// I = (Z - A) / max(t, t0) + A per channel.
Image recover_classic(const Image& z, const TransmissionMap& t, const Airlight& airlight,
                      double t0, bool clamp_output = true);

/// Per-pixel gate map psi(t).
Image gate_map(const TransmissionMap& t, double eta, double slope = 32.0);

/// Fused recovery with an explicit gate map:
///   I = (Zb + psi Ze - A) / max(t, t0) + (1 - psi) Ze + A.
Image recover_fused_gated(const LayerPair& layers, const TransmissionMap& t, const Image& psi,
                          const Airlight& airlight, const RecoveryParams& params);

/// Fused recovery with psi = gate(t). Detail is amplified only where the
/// transmission is high enough for the gate to open.
Image recover_fused(const LayerPair& layers, const TransmissionMap& t, const Airlight& airlight,
                    const RecoveryParams& params = {});

/// Noise gain 1 / max(t, t0).
Image noise_gain(const TransmissionMap& t, double t0);

/// Noise gain divided by its maximum 1 / t0, for display.
Image noise_amplification_map(const TransmissionMap& t, double t0);

}  // namespace dehaze
