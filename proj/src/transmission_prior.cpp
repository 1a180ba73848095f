#include "dehaze/transmission_prior.hpp"

#include <algorithm>

#include "dehaze/errors.hpp"
#include "dehaze/filters.hpp"

namespace dehaze {

void PriorParams::validate() const {
  if (!(omega > 0.0 && omega <= 1.0)) throw ArgumentError("prior: omega must lie in (0, 1]");
  if (patch_radius < 0) throw ArgumentError("prior: patch radius must be >= 0");
  if (!(t_floor > 0.0 && t_floor < 1.0)) throw ArgumentError("prior: t_floor must lie in (0, 1)");
  refine.validate();
}

Image dark_channel(const Image& img, int patch_radius) {
  if (patch_radius < 0) throw ArgumentError("dark_channel: patch radius must be >= 0");
  Image channel_min(img.width(), img.height(), 1);
  auto out = channel_min.plane(0);
  std::ranges::copy(img.plane(0), out.begin());
  for (int c = 1; c < img.channels(); ++c) {
    auto p = img.plane(c);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::min(out[i], p[i]);
  }
  return sliding_min(channel_min, patch_radius);
}

Image raw_prior_transmission(const Image& base, const Airlight& airlight, double omega,
                             int patch_radius) {
  if (base.channels() != 3) throw ShapeError("prior transmission: expected an RGB image");
  for (double a : airlight.rgb) {
    if (!(a > 0.0)) throw ArgumentError("prior transmission: airlight channels must be > 0");
  }
  Image normalized = base;
  for (int c = 0; c < 3; ++c) {
    for (double& s : normalized.plane(c)) s /= airlight[c];
  }
  Image t = dark_channel(normalized, patch_radius);
  for (double& s : t.samples()) s = 1.0 - omega * s;
  return t;
}

TransmissionMap estimate_t_prior(const Image& base, const Airlight& airlight,
                                 const PriorParams& params) {
  params.validate();
  const Image raw = clamp01(raw_prior_transmission(base, airlight, params.omega, params.patch_radius));
  Image refined = wgif_filter(raw, luminance(base), params.refine);
  for (double& s : refined.samples()) s = std::clamp(s, params.t_floor, 1.0);
  return {std::move(refined)};
}

}  // namespace dehaze
