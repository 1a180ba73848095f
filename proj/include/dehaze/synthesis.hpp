#pragma once

#include <cstdint>
#include <filesystem>

#include "dehaze/airlight.hpp"
#include "dehaze/image.hpp"
#include "dehaze/transmission.hpp"

namespace dehaze {

/// Single-channel scene depth with finite non-negative values. Values are
/// normalised to [0, 1] when used for haze synthesis.
struct DepthMap {
  Image depth;
};

/// Reads a 16-bit PNG (depth = value / 65535) or a single-channel PFM. PFM
/// depths larger than 1 are rescaled by their maximum.
DepthMap load_depth(const std::filesystem::path& path);

/// Beer-Lambert transmission exp(-beta * depth), clamped to [t_floor, 1].
TransmissionMap t_from_depth(const DepthMap& depth, double beta, double t_floor = kDefaultTFloor);

/// Z = I t + A (1 - t) per channel.
Image apply_haze(const Image& clean, const TransmissionMap& t, const Airlight& airlight);

/// Adds i.i.d. N(0, sigma^2) noise from a seeded generator and clamps to [0, 1].
Image add_noise(const Image& img, double sigma, std::uint64_t seed);

}  // namespace dehaze
