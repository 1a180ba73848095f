#pragma once

#include "dehaze/image.hpp"

namespace dehaze {

double mean_squared_error(const Image& a, const Image& b);

/// 10 log10(1 / MSE) for [0, 1] data; +infinity for identical images.
double psnr(const Image& a, const Image& b);

/// Mean structural similarity on luminance (RGB inputs are converted), using
/// an 11x11 Gaussian window with sigma 1.5, K1 = 0.01, K2 = 0.03 and dynamic
/// range 1. Only windows that fit inside the image are averaged; images
/// smaller than 11 pixels use the largest window that fits.
double ssim(const Image& a, const Image& b);

}  // namespace dehaze
