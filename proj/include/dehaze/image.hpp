#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace dehaze {

/// Planar floating-point raster with 1 or 3 channels.
///
/// Samples are stored channel-major: one contiguous row-major plane per
/// channel. Images returned by the pipeline's public operations hold samples
/// in [0, 1]; signed intermediates such as detail layers and gradient fields
/// use the same container without that guarantee.
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels, double fill = 0.0);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t plane_size() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }

  double& at(int c, int y, int x) noexcept { return data_[index(c, y, x)]; }
  double at(int c, int y, int x) const noexcept { return data_[index(c, y, x)]; }

  std::span<double> plane(int c) & noexcept {
    return {data_.data() + static_cast<std::size_t>(c) * plane_size(), plane_size()};
  }
  std::span<const double> plane(int c) const& noexcept {
    return {data_.data() + static_cast<std::size_t>(c) * plane_size(), plane_size()};
  }

  std::span<double> samples() & noexcept { return data_; }
  std::span<const double> samples() const& noexcept { return data_; }
  // Views into a temporary would dangle.
  std::span<const double> plane(int c) const&& = delete;
  std::span<const double> samples() const&& = delete;

  bool same_shape(const Image& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_ &&
           channels_ == other.channels_;
  }
  bool same_size(const Image& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int c, int y, int x) const noexcept {
    return (static_cast<std::size_t>(c) * static_cast<std::size_t>(height_) +
            static_cast<std::size_t>(y)) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

// BT.601 luma weights.
inline constexpr double kLumaR = 0.299;
inline constexpr double kLumaG = 0.587;
inline constexpr double kLumaB = 0.114;

/// Throws ShapeError naming `what` unless both images have identical shape.
void require_same_shape(const Image& a, const Image& b, std::string_view what);
/// Throws ShapeError naming `what` unless both images have identical width/height.
void require_same_size(const Image& a, const Image& b, std::string_view what);

/// Y = 0.299 R + 0.587 G + 0.114 B. Requires a 3-channel input.
Image luminance(const Image& rgb);

/// Bilinear resampling with pixel-centre alignment. When shrinking by more
/// than 2x along an axis, the image is first box-averaged by an integer factor
/// so that the bilinear stage never skips source pixels.
Image resize(const Image& img, int new_width, int new_height);

Image clamp01(Image img);
Image crop(const Image& img, int x0, int y0, int width, int height);
Image mirror_horizontal(const Image& img);
Image extract_channel(const Image& img, int c);

double max_abs_difference(const Image& a, const Image& b);

}  // namespace dehaze
