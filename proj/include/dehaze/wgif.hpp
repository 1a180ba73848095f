#pragma once

#include "dehaze/image.hpp"

namespace dehaze {

/// Weighted guided image filter settings. `radius` is the half-width of the
/// (2r+1)^2 statistics window; `lambda` regularises the per-window linear
/// model and is divided by the edge-aware weight; `epsilon` keeps the weight
/// finite in perfectly flat regions. The defaults keep >= 90% of a noisy
/// unit step while pushing nearly all sigma = 0.02 noise into the detail layer.
struct WgifParams {
  int radius = 8;
  double lambda = 2e-2;
  double epsilon = 1e-6;

  void validate() const;
};

/// Base/detail split. `base + detail` reproduces the input exactly; only the
/// base is clamped to [0, 1], the detail layer is signed.
struct LayerPair {
  Image base;
  Image detail;
};

/// Edge-aware weight from a single-channel luminance map:
///   w(p) = (v(p) + eps) * mean_q 1 / (v(q) + eps)
/// where v is the 3x3 local variance. Flat regions get w < 1, edges w > 1,
/// and a constant image gets w == 1.
Image edge_weight(const Image& luma, double epsilon);

/// Local variance over a (2r+1)^2 window, replicate padding, per channel.
Image local_variance(const Image& img, int radius);

/// Self-guided filtering of every channel of `z`, with the regularisation
/// modulated by the edge weight of `guide` (single channel, same size).
/// Output clamped to [0, 1].
Image wgif_filter(const Image& z, const Image& guide, const WgifParams& params);

/// Same as wgif_filter with an explicit weight map instead of one derived
/// from a guide. A weight of 1 everywhere gives the plain guided filter.
Image wgif_filter_weighted(const Image& z, const Image& weight, const WgifParams& params);

/// Splits `z` into base = wgif_filter(z, luminance(z)) and detail = z - base.
/// Single-channel input is its own guide.
LayerPair decompose(const Image& z, const WgifParams& params);

}  // namespace dehaze
