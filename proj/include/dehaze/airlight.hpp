#pragma once

#include <array>
#include <vector>

#include "dehaze/image.hpp"

namespace dehaze {

/// Global atmospheric light, one intensity per RGB channel.
struct Airlight {
  std::array<double, 3> rgb{1.0, 1.0, 1.0};

  double operator[](int c) const { return rgb[static_cast<std::size_t>(c)]; }
  friend bool operator==(const Airlight&, const Airlight&) = default;
};

struct Region {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  bool contains(int px, int py) const {
    return px >= x && px < x + width && py >= y && py < y + height;
  }
  friend bool operator==(const Region&, const Region&) = default;
};

/// Stopping rule for the quad-tree descent: a block is not split further once
/// its shorter side is below `min_block` pixels or its area is below
/// `min_area_fraction` of the image.
struct AirlightParams {
  int min_block = 16;
  double min_area_fraction = 0.005;
};

struct AirlightEstimate {
  Airlight airlight;
  std::vector<Region> path;  // whole image first, selected leaf block last
  int pixel_x = 0;
  int pixel_y = 0;
};

/// Hierarchical quad-tree search on the (noise-suppressed) base layer.
///
/// Each level scores the four quadrants by mean - stddev of the luminance and
/// descends into the best one (ties resolved TL, TR, BL, BR). Inside the leaf
/// block the pixel closest to white in RGB Euclidean distance is returned.
AirlightEstimate estimate_airlight(const Image& base, const AirlightParams& params = {});

/// Copy of `img` (converted to RGB) with the outline of every block on the
/// search path drawn in red and the chosen pixel marked in green.
Image draw_airlight_path(const Image& img, const AirlightEstimate& estimate);

}  // namespace dehaze
