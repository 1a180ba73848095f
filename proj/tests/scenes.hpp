#pragma once

// Synthetic hazy scenes with known transmission and airlight.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "dehaze/airlight.hpp"
#include "dehaze/synthesis.hpp"
#include "dehaze/transmission.hpp"

namespace scenes {

using namespace dehaze;

struct Scene {
  Image clean;
  TransmissionMap t;
  Airlight airlight;
  Image hazy;
};

struct SceneSpec {
  int width = 96;
  int height = 96;
  int block = 4;           // side of the constant-colour tiles of the clean image
  double beta = 2.5;       // t = exp(-beta * depth)
  double airlight_lo = 0.7;
  double airlight_hi = 1.0;
  double far_fraction = 0.0;  // top share of rows held at the far depth
};

// Clean image: square tiles of independent U[0, 1] colours, so every patch
// holds near-zero channels (the dark-channel assumption) and the mean colour
// is gray. Depth is 1 over the top `far_fraction` of the rows and ramps
// linearly down to 0 at the bottom, the usual layout of a landscape with a
// distant far field at the top.
inline Scene make_scene(const SceneSpec& spec, std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> air(spec.airlight_lo, spec.airlight_hi);
  Scene s;
  s.clean = Image(spec.width, spec.height, 3);
  const int bx = (spec.width + spec.block - 1) / spec.block;
  const int by = (spec.height + spec.block - 1) / spec.block;
  for (int ty = 0; ty < by; ++ty) {
    for (int tx = 0; tx < bx; ++tx) {
      const double rgb[3] = {unit(gen), unit(gen), unit(gen)};
      for (int y = ty * spec.block; y < std::min(spec.height, (ty + 1) * spec.block); ++y) {
        for (int x = tx * spec.block; x < std::min(spec.width, (tx + 1) * spec.block); ++x) {
          for (int c = 0; c < 3; ++c) s.clean.at(c, y, x) = rgb[c];
        }
      }
    }
  }
  for (double& v : s.airlight.rgb) v = air(gen);
  DepthMap depth{Image(spec.width, spec.height, 1)};
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const double ramp = (spec.height - 1) * (1.0 - spec.far_fraction);
      const double from_bottom = static_cast<double>(spec.height - 1 - y);
      depth.depth.at(0, y, x) = ramp > 0.0 ? std::min(1.0, from_bottom / ramp) : 1.0;
    }
  }
  s.t = t_from_depth(depth, spec.beta, kDefaultTFloor);
  s.hazy = apply_haze(s.clean, s.t, s.airlight);
  return s;
}

inline double mean_abs_difference(const Image& a, const Image& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.samples().size(); ++i) s += std::abs(a.samples()[i] - b.samples()[i]);
  return s / static_cast<double>(a.samples().size());
}

}  // namespace scenes
