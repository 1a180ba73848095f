#include "dehaze/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dehaze/errors.hpp"

namespace dehaze {
namespace {

constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;
constexpr int kWindowRadius = 5;
constexpr double kWindowSigma = 1.5;

Image gray_of(const Image& img) { return img.channels() == 3 ? luminance(img) : img; }

}  // namespace

double mean_squared_error(const Image& a, const Image& b) {
  require_same_shape(a, b, "mse");
  auto sa = a.samples();
  auto sb = b.samples();
  double sum = 0.0;
  for (std::size_t i = 0; i < sa.size(); ++i) {
    const double d = sa[i] - sb[i];
    sum += d * d;
  }
  return sum / static_cast<double>(sa.size());
}

double psnr(const Image& a, const Image& b) {
  const double mse = mean_squared_error(a, b);
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

double ssim(const Image& a, const Image& b) {
  require_same_shape(a, b, "ssim");
  const Image x = gray_of(a);
  const Image y = gray_of(b);
  const int w = x.width();
  const int h = x.height();
  const int r = std::min(kWindowRadius, (std::min(w, h) - 1) / 2);

  std::vector<double> window;
  double wsum = 0.0;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * kWindowSigma * kWindowSigma));
      window.push_back(v);
      wsum += v;
    }
  }
  for (double& v : window) v /= wsum;

  double total = 0.0;
  std::size_t count = 0;
  for (int cy = r; cy < h - r; ++cy) {
    for (int cx = r; cx < w - r; ++cx) {
      double mx = 0.0, my = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
      std::size_t k = 0;
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx, ++k) {
          const double wv = window[k];
          const double xv = x.at(0, cy + dy, cx + dx);
          const double yv = y.at(0, cy + dy, cx + dx);
          mx += wv * xv;
          my += wv * yv;
          sxx += wv * xv * xv;
          syy += wv * yv * yv;
          sxy += wv * (xv * yv);  // grouped so ssim(a, b) == ssim(b, a) exactly
        }
      }
      const double vx = sxx - mx * mx;
      const double vy = syy - my * my;
      const double cxy = sxy - mx * my;
      total += ((2.0 * mx * my + kC1) * (2.0 * cxy + kC2)) /
               ((mx * mx + my * my + kC1) * (vx + vy + kC2));
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

}  // namespace dehaze
