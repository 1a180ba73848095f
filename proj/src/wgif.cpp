#include "dehaze/wgif.hpp"

#include <algorithm>
#include <string>

#include "dehaze/errors.hpp"
#include "dehaze/filters.hpp"

namespace dehaze {

void WgifParams::validate() const {
  if (radius < 1) throw ArgumentError("wgif: radius must be >= 1, got " + std::to_string(radius));
  if (!(lambda > 0.0)) throw ArgumentError("wgif: lambda must be > 0");
  if (!(epsilon > 0.0)) throw ArgumentError("wgif: epsilon must be > 0");
}

Image local_variance(const Image& img, int radius) {
  // Variance is shift invariant. Subtracting a sample of each channel keeps
  // E[x^2] - E[x]^2 from cancelling catastrophically on flat regions.
  Image shifted = img;
  for (int c = 0; c < img.channels(); ++c) {
    auto p = shifted.plane(c);
    const double ref = p.empty() ? 0.0 : p[0];
    for (double& s : p) s -= ref;
  }
  Image squared = shifted;
  for (double& s : squared.samples()) s *= s;
  const Image mean = box_mean(shifted, radius);
  Image var = box_mean(squared, radius);
  auto v = var.samples();
  auto m = mean.samples();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::max(0.0, v[i] - m[i] * m[i]);
  return var;
}

Image edge_weight(const Image& luma, double epsilon) {
  if (luma.channels() != 1) throw ShapeError("edge_weight: expected a single-channel luminance map");
  if (!(epsilon > 0.0)) throw ArgumentError("edge_weight: epsilon must be > 0");
  // 3x3 variance in two passes: flat windows give exactly zero, which
  // matters because eps is tiny and the weights are ratios of (v + eps).
  const int width = luma.width();
  const int height = luma.height();
  Image weight(width, height, 1);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double win[9];
      int k = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
          win[k++] = luma.at(0, std::clamp(y + dy, 0, height - 1), std::clamp(x + dx, 0, width - 1));
      double mean = 0.0;
      for (double v : win) mean += v;
      mean /= 9.0;
      double var = 0.0;
      for (double v : win) var += (v - mean) * (v - mean);
      weight.at(0, y, x) = var / 9.0;
    }
  }
  auto w = weight.samples();
  double inv_sum = 0.0;
  for (double v : w) inv_sum += 1.0 / (v + epsilon);
  const double inv_mean = inv_sum / static_cast<double>(w.size());
  for (double& v : w) v = (v + epsilon) * inv_mean;
  return weight;
}

Image wgif_filter_weighted(const Image& z, const Image& weight, const WgifParams& params) {
  params.validate();
  if (weight.channels() != 1) throw ShapeError("wgif: weight map must be single-channel");
  require_same_size(z, weight, "wgif");

  const Image mean = box_mean(z, params.radius);
  const Image var = local_variance(z, params.radius);
  Image a(z.width(), z.height(), z.channels());
  Image b(z.width(), z.height(), z.channels());
  auto w = weight.plane(0);
  for (int c = 0; c < z.channels(); ++c) {
    auto mu = mean.plane(c);
    auto s2 = var.plane(c);
    auto ac = a.plane(c);
    auto bc = b.plane(c);
    for (std::size_t i = 0; i < ac.size(); ++i) {
      ac[i] = s2[i] / (s2[i] + params.lambda / w[i]);
      bc[i] = (1.0 - ac[i]) * mu[i];
    }
  }
  const Image a_mean = box_mean(a, params.radius);
  const Image b_mean = box_mean(b, params.radius);
  Image out(z.width(), z.height(), z.channels());
  auto dst = out.samples();
  auto src = z.samples();
  auto am = a_mean.samples();
  auto bm = b_mean.samples();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = std::clamp(am[i] * src[i] + bm[i], 0.0, 1.0);
  return out;
}

Image wgif_filter(const Image& z, const Image& guide, const WgifParams& params) {
  params.validate();
  require_same_size(z, guide, "wgif");
  return wgif_filter_weighted(z, edge_weight(guide, params.epsilon), params);
}

LayerPair decompose(const Image& z, const WgifParams& params) {
  const Image guide = z.channels() == 3 ? luminance(z) : z;
  LayerPair layers;
  layers.base = wgif_filter(z, guide, params);
  layers.detail = z;
  auto d = layers.detail.samples();
  auto b = layers.base.samples();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] -= b[i];
  return layers;
}

}  // namespace dehaze
