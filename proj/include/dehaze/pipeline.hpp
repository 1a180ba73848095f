#pragma once

#include "dehaze/airlight.hpp"
#include "dehaze/bilateral_grid.hpp"
#include "dehaze/config.hpp"
#include "dehaze/transmission.hpp"
#include "dehaze/wgif.hpp"

namespace dehaze {

struct DehazeResult {
  Image image;
  LayerPair layers;
  Airlight airlight;
  TransmissionMap transmission;
};

/// Full single-image path. Transmission comes from the prior unless a
/// `model` is given; `classic` swaps fused recovery for the plain inverse
/// of the haze model.
DehazeResult dehaze_image(const Image& hazy, const PipelineConfig& cfg,
                          const BilateralGridModel* model = nullptr, bool classic = false);

}  // namespace dehaze
