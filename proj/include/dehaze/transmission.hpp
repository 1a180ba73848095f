#pragma once

#include "dehaze/image.hpp"

namespace dehaze {

/// Lower bound applied to every transmission estimate so that divisions by t
/// stay finite.
inline constexpr double kDefaultTFloor = 0.05;

/// Single-channel transmission field t(p), clamped to [t_floor, 1] by the
/// operations that produce it.
struct TransmissionMap {
  Image values;

  int width() const noexcept { return values.width(); }
  int height() const noexcept { return values.height(); }
  double operator()(int y, int x) const noexcept { return values.at(0, y, x); }
  double& operator()(int y, int x) noexcept { return values.at(0, y, x); }

  static TransmissionMap constant(int width, int height, double t) {
    return {Image(width, height, 1, t)};
  }
};

}  // namespace dehaze
