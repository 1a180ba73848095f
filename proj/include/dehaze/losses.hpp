#pragma once

#include <vector>

#include "dehaze/image.hpp"

namespace dehaze {

/// G(k, l) = amplitude * exp(-(k - mu_x)^2 / (2 sigma_x) - (l - mu_y)^2 / (2 sigma_y))
/// over offsets |k|, |l| <= radius, with k horizontal and l vertical.
///
/// The exponent divides by 2*sigma rather than 2*sigma^2; with amplitude
/// 0.053 and sigma 3 the kernel then sums to ~0.999. The colour loss only
/// compares directions, so the normalisation does not affect it.
struct GaussianKernel {
  double amplitude = 0.053;
  double mu_x = 0.0;
  double mu_y = 0.0;
  double sigma_x = 3.0;
  double sigma_y = 3.0;
  int radius = 9;

  double value(int k, int l) const;
  /// 1-D factors; the amplitude is folded into the horizontal taps.
  std::vector<double> taps_x() const;
  std::vector<double> taps_y() const;
  double sum() const;
};

/// A scalar loss and its gradient with respect to the prediction.
struct LossValue {
  double value = 0.0;
  Image gradient;
};

/// Sum over pixels and channels of (truth - pred)^2.
LossValue restoration_loss(const Image& pred, const Image& truth);

Image gaussian_blur(const Image& img, const GaussianKernel& kernel = {});
/// Transpose of gaussian_blur (replicate padding included).
Image gaussian_blur_adjoint(const Image& img, const GaussianKernel& kernel = {});

/// Below this norm a blurred colour vector has no defined direction; such
/// pixels contribute zero angle and zero gradient.
inline constexpr double kMinColorNorm = 1e-8;

/// Sum over pixels of the angle between the blurred RGB vectors of `pred`
/// and `truth`.
LossValue color_loss(const Image& pred, const Image& truth, const GaussianKernel& kernel = {});

/// Default colour-loss weight.
inline constexpr double kDefaultColorWeight = 0.01;

struct TotalLoss {
  double restoration = 0.0;
  double color = 0.0;
  double value = 0.0;
  Image gradient;
};

/// restoration + color_weight * color, gradients summed.
TotalLoss total_loss(const Image& pred, const Image& truth, double color_weight = kDefaultColorWeight,
                     const GaussianKernel& kernel = {});

}  // namespace dehaze
