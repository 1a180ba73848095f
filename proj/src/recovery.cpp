#include "dehaze/recovery.hpp"

#include <algorithm>

#include "dehaze/errors.hpp"

namespace dehaze {
namespace {

void check_t(const Image& z, const TransmissionMap& t, const char* what) {
  if (t.values.channels() != 1) throw ShapeError(std::string(what) + ": transmission must be single-channel");
  require_same_size(z, t.values, what);
}

void check_t0(double t0) {
  if (!(t0 > 0.0 && t0 < 1.0)) throw ArgumentError("recovery: t0 must lie in (0, 1)");
}

}  // namespace

void RecoveryParams::validate() const {
  check_t0(t0);
  if (!(eta > 1.0)) throw ArgumentError("recovery: eta must be > 1");
  if (!(slope > 0.0)) throw ArgumentError("recovery: gate slope must be > 0");
}

Image recover_classic(const Image& z, const TransmissionMap& t, const Airlight& airlight,
                      double t0, bool clamp_output) {
  check_t0(t0);
  check_t(z, t, "recover_classic");
  Image out(z.width(), z.height(), z.channels());
  auto tv = t.values.plane(0);
  for (int c = 0; c < z.channels(); ++c) {
    const double a = airlight[c];
    auto src = z.plane(c);
    auto dst = out.plane(c);
    for (std::size_t i = 0; i < dst.size(); ++i) {
      dst[i] = (src[i] - a) / std::max(tv[i], t0) + a;
    }
  }
  return clamp_output ? clamp01(std::move(out)) : out;
}

Image gate_map(const TransmissionMap& t, double eta, double slope) {
  Image psi(t.width(), t.height(), 1);
  auto src = t.values.plane(0);
  auto dst = psi.plane(0);
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = gate(src[i], eta, slope);
  return psi;
}

Image recover_fused_gated(const LayerPair& layers, const TransmissionMap& t, const Image& psi,
                          const Airlight& airlight, const RecoveryParams& params) {
  params.validate();
  require_same_shape(layers.base, layers.detail, "recover_fused");
  check_t(layers.base, t, "recover_fused");
  if (psi.channels() != 1) throw ShapeError("recover_fused: gate map must be single-channel");
  require_same_size(layers.base, psi, "recover_fused");

  Image out(layers.base.width(), layers.base.height(), layers.base.channels());
  auto tv = t.values.plane(0);
  auto gv = psi.plane(0);
  for (int c = 0; c < out.channels(); ++c) {
    const double a = airlight[c];
    auto zb = layers.base.plane(c);
    auto ze = layers.detail.plane(c);
    auto dst = out.plane(c);
    for (std::size_t i = 0; i < dst.size(); ++i) {
      const double g = gv[i];
      dst[i] = (zb[i] + g * ze[i] - a) / std::max(tv[i], params.t0) + (1.0 - g) * ze[i] + a;
    }
  }
  return params.clamp_output ? clamp01(std::move(out)) : out;
}

Image recover_fused(const LayerPair& layers, const TransmissionMap& t, const Airlight& airlight,
                    const RecoveryParams& params) {
  return recover_fused_gated(layers, t, gate_map(t, params.eta, params.slope), airlight, params);
}

Image noise_gain(const TransmissionMap& t, double t0) {
  check_t0(t0);
  Image gain(t.width(), t.height(), 1);
  auto src = t.values.plane(0);
  auto dst = gain.plane(0);
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = 1.0 / std::max(src[i], t0);
  return gain;
}

Image noise_amplification_map(const TransmissionMap& t, double t0) {
  Image gain = noise_gain(t, t0);
  for (double& g : gain.samples()) g *= t0;
  return gain;
}

}  // namespace dehaze
