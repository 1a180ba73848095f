#pragma once

#include <span>

#include "dehaze/image.hpp"

namespace dehaze {

/// Mean over a (2r+1)x(2r+1) window, per channel, with replicate padding.
/// Computed with running sums in O(W*H) independent of r.
Image box_mean(const Image& img, int radius);

/// Minimum over a (2r+1)x(2r+1) window, per channel. Uses the van Herk /
/// Gil-Werman two-pass scheme, so cost is independent of r.
Image sliding_min(const Image& img, int radius);

/// Separable correlation with `taps_x` along rows and `taps_y` along columns,
/// replicate padding. Tap i corresponds to offset i - (size-1)/2; both tap
/// vectors must have odd length.
Image separable_filter(const Image& img, std::span<const double> taps_x,
                       std::span<const double> taps_y);

/// Exact adjoint of separable_filter (including the padding), i.e.
/// <separable_filter(x), y> == <x, separable_filter_adjoint(y)>.
Image separable_filter_adjoint(const Image& img, std::span<const double> taps_x,
                               std::span<const double> taps_y);

}  // namespace dehaze
