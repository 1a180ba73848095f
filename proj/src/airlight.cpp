#include "dehaze/airlight.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dehaze/errors.hpp"

namespace dehaze {
namespace {

// Smallest representable airlight channel; keeps later divisions finite.
constexpr double kMinAirlight = 1e-6;

double region_score(const Image& gray, const Region& r) {
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int y = r.y; y < r.y + r.height; ++y) {
    for (int x = r.x; x < r.x + r.width; ++x) {
      const double v = gray.at(0, y, x);
      sum += v;
      sum_sq += v * v;
    }
  }
  const double n = static_cast<double>(r.width) * r.height;
  const double mean = sum / n;
  const double var = std::max(0.0, sum_sq / n - mean * mean);
  return mean - std::sqrt(var);
}

std::array<Region, 4> quadrants(const Region& r) {
  const int wl = r.width / 2;
  const int ht = r.height / 2;
  return {Region{r.x, r.y, wl, ht}, Region{r.x + wl, r.y, r.width - wl, ht},
          Region{r.x, r.y + ht, wl, r.height - ht},
          Region{r.x + wl, r.y + ht, r.width - wl, r.height - ht}};
}

}  // namespace

AirlightEstimate estimate_airlight(const Image& base, const AirlightParams& params) {
  if (base.channels() != 3) throw ShapeError("estimate_airlight: expected an RGB image");
  if (base.empty()) throw ArgumentError("estimate_airlight: empty image");
  if (params.min_block < 1) throw ArgumentError("estimate_airlight: min_block must be >= 1");

  const Image gray = luminance(base);
  const double min_area = params.min_area_fraction * static_cast<double>(base.plane_size());

  AirlightEstimate est;
  Region current{0, 0, base.width(), base.height()};
  est.path.push_back(current);
  while (std::min(current.width, current.height) >= params.min_block &&
         static_cast<double>(current.width) * current.height >= min_area &&
         current.width >= 2 && current.height >= 2) {
    const auto quads = quadrants(current);
    std::size_t best = 0;
    double best_score = region_score(gray, quads[0]);
    for (std::size_t q = 1; q < quads.size(); ++q) {
      const double s = region_score(gray, quads[q]);
      if (s > best_score) {
        best_score = s;
        best = q;
      }
    }
    current = quads[best];
    est.path.push_back(current);
  }

  double best_dist = std::numeric_limits<double>::infinity();
  for (int y = current.y; y < current.y + current.height; ++y) {
    for (int x = current.x; x < current.x + current.width; ++x) {
      double d = 0.0;
      for (int c = 0; c < 3; ++c) {
        const double diff = 1.0 - base.at(c, y, x);
        d += diff * diff;
      }
      if (d < best_dist) {
        best_dist = d;
        est.pixel_x = x;
        est.pixel_y = y;
      }
    }
  }
  for (int c = 0; c < 3; ++c) {
    est.airlight.rgb[static_cast<std::size_t>(c)] =
        std::clamp(base.at(c, est.pixel_y, est.pixel_x), kMinAirlight, 1.0);
  }
  return est;
}

Image draw_airlight_path(const Image& img, const AirlightEstimate& estimate) {
  Image out(img.width(), img.height(), 3);
  for (int c = 0; c < 3; ++c) {
    const int src = img.channels() == 3 ? c : 0;
    std::ranges::copy(img.plane(src), out.plane(c).begin());
  }
  auto paint = [&out](int x, int y, double r, double g, double b) {
    if (x < 0 || y < 0 || x >= out.width() || y >= out.height()) return;
    out.at(0, y, x) = r;
    out.at(1, y, x) = g;
    out.at(2, y, x) = b;
  };
  for (const Region& r : estimate.path) {
    for (int x = r.x; x < r.x + r.width; ++x) {
      paint(x, r.y, 1.0, 0.0, 0.0);
      paint(x, r.y + r.height - 1, 1.0, 0.0, 0.0);
    }
    for (int y = r.y; y < r.y + r.height; ++y) {
      paint(r.x, y, 1.0, 0.0, 0.0);
      paint(r.x + r.width - 1, y, 1.0, 0.0, 0.0);
    }
  }
  for (int d = -2; d <= 2; ++d) {
    paint(estimate.pixel_x + d, estimate.pixel_y, 0.0, 1.0, 0.0);
    paint(estimate.pixel_x, estimate.pixel_y + d, 0.0, 1.0, 0.0);
  }
  return out;
}

}  // namespace dehaze
