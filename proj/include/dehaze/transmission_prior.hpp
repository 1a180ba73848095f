#pragma once

#include "dehaze/airlight.hpp"
#include "dehaze/image.hpp"
#include "dehaze/transmission.hpp"
#include "dehaze/wgif.hpp"

namespace dehaze {

struct PriorParams {
  double omega = 0.95;
  int patch_radius = 7;
  double t_floor = kDefaultTFloor;
  WgifParams refine{};

  void validate() const;
};

/// min over channels and over the (2r+1)^2 patch around each pixel.
Image dark_channel(const Image& img, int patch_radius);

/// 1 - omega * dark_channel(base / A), before refinement and clamping.
Image raw_prior_transmission(const Image& base, const Airlight& airlight, double omega,
                             int patch_radius);

/// Dark-channel transmission estimate, smoothed by the weighted guided filter
/// (weight from the luminance of `base`) and clamped to [t_floor, 1].
TransmissionMap estimate_t_prior(const Image& base, const Airlight& airlight,
                                 const PriorParams& params = {});

}  // namespace dehaze
