#include "dehaze/synthesis.hpp"

#include <algorithm>
#include <cmath>

#include "dehaze/errors.hpp"
#include "dehaze/image_io.hpp"
#include "dehaze/random.hpp"

namespace dehaze {

DepthMap load_depth(const std::filesystem::path& path) {
  Image img = load_image(path);
  if (img.channels() != 1) img = extract_channel(img, 0);
  double max_depth = 0.0;
  for (double d : img.samples()) {
    if (!std::isfinite(d) || d < 0.0) {
      throw FormatError("'" + path.string() + "': depth values must be finite and non-negative");
    }
    max_depth = std::max(max_depth, d);
  }
  if (max_depth > 1.0) {
    for (double& d : img.samples()) d /= max_depth;
  }
  return {std::move(img)};
}

TransmissionMap t_from_depth(const DepthMap& depth, double beta, double t_floor) {
  if (!(beta > 0.0)) throw ArgumentError("t_from_depth: beta must be > 0");
  if (depth.depth.channels() != 1) throw ShapeError("t_from_depth: depth must be single-channel");
  Image t(depth.depth.width(), depth.depth.height(), 1);
  auto src = depth.depth.plane(0);
  auto dst = t.plane(0);
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = std::clamp(std::exp(-beta * src[i]), t_floor, 1.0);
  }
  return {std::move(t)};
}

Image apply_haze(const Image& clean, const TransmissionMap& t, const Airlight& airlight) {
  require_same_size(clean, t.values, "apply_haze");
  Image out(clean.width(), clean.height(), clean.channels());
  auto tv = t.values.plane(0);
  for (int c = 0; c < clean.channels(); ++c) {
    const double a = airlight[c];
    auto src = clean.plane(c);
    auto dst = out.plane(c);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = src[i] * tv[i] + a * (1.0 - tv[i]);
  }
  return out;
}

Image add_noise(const Image& img, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw ArgumentError("add_noise: sigma must be >= 0");
  if (sigma == 0.0) return img;
  Rng rng(seed);
  Image out = img;
  for (double& s : out.samples()) s = std::clamp(s + sigma * rng.normal(), 0.0, 1.0);
  return out;
}

}  // namespace dehaze
