#include "dehaze/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dehaze/errors.hpp"

namespace dehaze {

Image::Image(int width, int height, int channels, double fill)
    : width_(width), height_(height), channels_(channels) {
  if (width < 0 || height < 0) throw ArgumentError("image dimensions must be non-negative");
  if (channels != 1 && channels != 3) {
    throw ArgumentError("image must have 1 or 3 channels, got " + std::to_string(channels));
  }
  data_.assign(plane_size() * static_cast<std::size_t>(channels), fill);
}

namespace {

std::string describe(const Image& img) {
  return std::to_string(img.width()) + "x" + std::to_string(img.height()) + "x" +
         std::to_string(img.channels());
}

// Averages non-overlapping fx-by-fy blocks; partial blocks at the right and
// bottom edges average only the pixels they cover.
Image box_downsample(const Image& img, int fx, int fy) {
  const int w = (img.width() + fx - 1) / fx;
  const int h = (img.height() + fy - 1) / fy;
  Image out(w, h, img.channels());
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < h; ++y) {
      const int y0 = y * fy;
      const int y1 = std::min(img.height(), y0 + fy);
      for (int x = 0; x < w; ++x) {
        const int x0 = x * fx;
        const int x1 = std::min(img.width(), x0 + fx);
        // Summing offsets from the first pixel keeps flat blocks exact.
        const double ref = img.at(c, y0, x0);
        double sum = 0.0;
        for (int yy = y0; yy < y1; ++yy)
          for (int xx = x0; xx < x1; ++xx) sum += img.at(c, yy, xx) - ref;
        out.at(c, y, x) = ref + sum / static_cast<double>((y1 - y0) * (x1 - x0));
      }
    }
  }
  return out;
}

struct Tap {
  int i0;
  int i1;
  double w1;  // weight of i1; i0 gets 1 - w1
};

std::vector<Tap> bilinear_taps(int src, int dst) {
  std::vector<Tap> taps(static_cast<std::size_t>(dst));
  const double scale = static_cast<double>(src) / static_cast<double>(dst);
  for (int i = 0; i < dst; ++i) {
    double s = (i + 0.5) * scale - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(src - 1));
    const int i0 = static_cast<int>(std::floor(s));
    const int i1 = std::min(i0 + 1, src - 1);
    taps[static_cast<std::size_t>(i)] = {i0, i1, s - i0};
  }
  return taps;
}

}  // namespace

void require_same_shape(const Image& a, const Image& b, std::string_view what) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(what) + ": shape mismatch " + describe(a) + " vs " + describe(b));
  }
}

void require_same_size(const Image& a, const Image& b, std::string_view what) {
  if (!a.same_size(b)) {
    throw ShapeError(std::string(what) + ": size mismatch " + describe(a) + " vs " + describe(b));
  }
}

Image luminance(const Image& rgb) {
  if (rgb.channels() != 3) {
    throw ShapeError("luminance: expected 3 channels, got " + std::to_string(rgb.channels()));
  }
  Image y(rgb.width(), rgb.height(), 1);
  auto r = rgb.plane(0);
  auto g = rgb.plane(1);
  auto b = rgb.plane(2);
  auto out = y.plane(0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = kLumaR * r[i] + kLumaG * g[i] + kLumaB * b[i];
  }
  return y;
}

Image resize(const Image& img, int new_width, int new_height) {
  if (new_width < 1 || new_height < 1) {
    throw ArgumentError("resize: target dimensions must be >= 1");
  }
  if (img.empty()) throw ArgumentError("resize: empty source image");
  if (new_width == img.width() && new_height == img.height()) return img;

  const int fx = img.width() > 2 * new_width ? img.width() / new_width : 1;
  const int fy = img.height() > 2 * new_height ? img.height() / new_height : 1;
  const Image src = (fx > 1 || fy > 1) ? box_downsample(img, fx, fy) : img;

  const auto tx = bilinear_taps(src.width(), new_width);
  const auto ty = bilinear_taps(src.height(), new_height);
  Image out(new_width, new_height, img.channels());
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < new_height; ++y) {
      const Tap& vy = ty[static_cast<std::size_t>(y)];
      for (int x = 0; x < new_width; ++x) {
        const Tap& vx = tx[static_cast<std::size_t>(x)];
        const double top = (1.0 - vx.w1) * src.at(c, vy.i0, vx.i0) + vx.w1 * src.at(c, vy.i0, vx.i1);
        const double bottom = (1.0 - vx.w1) * src.at(c, vy.i1, vx.i0) + vx.w1 * src.at(c, vy.i1, vx.i1);
        out.at(c, y, x) = (1.0 - vy.w1) * top + vy.w1 * bottom;
      }
    }
  }
  return out;
}

Image clamp01(Image img) {
  for (double& s : img.samples()) s = std::clamp(s, 0.0, 1.0);
  return img;
}

Image crop(const Image& img, int x0, int y0, int width, int height) {
  if (x0 < 0 || y0 < 0 || width < 1 || height < 1 || x0 + width > img.width() ||
      y0 + height > img.height()) {
    throw ArgumentError("crop: window outside image");
  }
  Image out(width, height, img.channels());
  for (int c = 0; c < img.channels(); ++c)
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) out.at(c, y, x) = img.at(c, y0 + y, x0 + x);
  return out;
}

Image mirror_horizontal(const Image& img) {
  Image out(img.width(), img.height(), img.channels());
  for (int c = 0; c < img.channels(); ++c)
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x) out.at(c, y, x) = img.at(c, y, img.width() - 1 - x);
  return out;
}

Image extract_channel(const Image& img, int c) {
  if (c < 0 || c >= img.channels()) throw ArgumentError("extract_channel: channel out of range");
  Image out(img.width(), img.height(), 1);
  std::ranges::copy(img.plane(c), out.plane(0).begin());
  return out;
}

double max_abs_difference(const Image& a, const Image& b) {
  require_same_shape(a, b, "max_abs_difference");
  double m = 0.0;
  auto sa = a.samples();
  auto sb = b.samples();
  for (std::size_t i = 0; i < sa.size(); ++i) m = std::max(m, std::abs(sa[i] - sb[i]));
  return m;
}

}  // namespace dehaze
