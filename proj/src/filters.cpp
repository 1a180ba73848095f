#include "dehaze/filters.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#include "dehaze/errors.hpp"

namespace dehaze {
namespace {

// Applies a 1-D line operation to every row, then to every column, of every
// channel. `op(in, out)` receives contiguous buffers of equal length.
template <typename LineOp>
Image apply_separable(const Image& img, LineOp&& row_op, LineOp&& col_op) {
  Image tmp(img.width(), img.height(), img.channels());
  Image out(img.width(), img.height(), img.channels());
  const auto w = static_cast<std::size_t>(img.width());
  const auto h = static_cast<std::size_t>(img.height());
  std::vector<double> line_in(std::max(w, h));
  std::vector<double> line_out(std::max(w, h));
  for (int c = 0; c < img.channels(); ++c) {
    auto src = img.plane(c);
    auto mid = tmp.plane(c);
    for (std::size_t y = 0; y < h; ++y) {
      std::span<const double> row(src.data() + y * w, w);
      row_op(row, std::span<double>(mid.data() + y * w, w));
    }
    auto dst = out.plane(c);
    for (std::size_t x = 0; x < w; ++x) {
      for (std::size_t y = 0; y < h; ++y) line_in[y] = mid[y * w + x];
      col_op(std::span<const double>(line_in.data(), h), std::span<double>(line_out.data(), h));
      for (std::size_t y = 0; y < h; ++y) dst[y * w + x] = line_out[y];
    }
  }
  return out;
}

class BoxLine {
 public:
  explicit BoxLine(int radius) : radius_(radius) {}

  // Sum over [i-r, i+r] with indices clamped to the line, divided by 2r+1.
  void operator()(std::span<const double> in, std::span<double> out) {
    const int n = static_cast<int>(in.size());
    const int r = radius_;
    prefix_.resize(static_cast<std::size_t>(n + 2 * r + 1));
    // Offsets from the first sample keep constant lines exact and shrink
    // the magnitude of the running sum.
    if (n == 0) return;
    const double ref = in[0];
    prefix_[0] = 0.0;
    for (int k = 0; k < n + 2 * r; ++k) {
      const int src = std::clamp(k - r, 0, n - 1);
      prefix_[static_cast<std::size_t>(k + 1)] =
          prefix_[static_cast<std::size_t>(k)] + (in[static_cast<std::size_t>(src)] - ref);
    }
    const double inv = 1.0 / static_cast<double>(2 * r + 1);
    for (int i = 0; i < n; ++i) {
      out[static_cast<std::size_t>(i)] =
          ref + (prefix_[static_cast<std::size_t>(i + 2 * r + 1)] - prefix_[static_cast<std::size_t>(i)]) * inv;
    }
  }

 private:
  int radius_;
  std::vector<double> prefix_;
};

// van Herk / Gil-Werman: split the +inf padded line into blocks of size
// 2r+1; the window starting at j is covered by the suffix-min of j's block
// and the prefix-min of the block containing j+2r.
class MinLine {
 public:
  explicit MinLine(int radius) : radius_(radius) {}

  void operator()(std::span<const double> in, std::span<double> out) {
    const int n = static_cast<int>(in.size());
    const int r = radius_;
    const int block = 2 * r + 1;
    const int padded = n + 2 * r;
    const int len = ((padded + block - 1) / block) * block;
    constexpr double inf = std::numeric_limits<double>::infinity();
    buf_.assign(static_cast<std::size_t>(len), inf);
    for (int i = 0; i < n; ++i) buf_[static_cast<std::size_t>(i + r)] = in[static_cast<std::size_t>(i)];
    prefix_.resize(static_cast<std::size_t>(len));
    suffix_.resize(static_cast<std::size_t>(len));
    for (int start = 0; start < len; start += block) {
      const auto s = static_cast<std::size_t>(start);
      prefix_[s] = buf_[s];
      for (int k = 1; k < block; ++k) {
        const auto i = s + static_cast<std::size_t>(k);
        prefix_[i] = std::min(prefix_[i - 1], buf_[i]);
      }
      const auto last = s + static_cast<std::size_t>(block - 1);
      suffix_[last] = buf_[last];
      for (int k = block - 2; k >= 0; --k) {
        const auto i = s + static_cast<std::size_t>(k);
        suffix_[i] = std::min(suffix_[i + 1], buf_[i]);
      }
    }
    for (int i = 0; i < n; ++i) {
      // Window in padded coordinates: [i, i + 2r].
      out[static_cast<std::size_t>(i)] =
          std::min(suffix_[static_cast<std::size_t>(i)], prefix_[static_cast<std::size_t>(i + 2 * r)]);
    }
  }

 private:
  int radius_;
  std::vector<double> buf_;
  std::vector<double> prefix_;
  std::vector<double> suffix_;
};

class CorrelateLine {
 public:
  explicit CorrelateLine(std::span<const double> taps) : taps_(taps) {}

  void operator()(std::span<const double> in, std::span<double> out) const {
    const int n = static_cast<int>(in.size());
    const int half = static_cast<int>(taps_.size() / 2);
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int k = -half; k <= half; ++k) {
        acc += taps_[static_cast<std::size_t>(k + half)] * in[static_cast<std::size_t>(std::clamp(i + k, 0, n - 1))];
      }
      out[static_cast<std::size_t>(i)] = acc;
    }
  }

 private:
  std::span<const double> taps_;
};

class CorrelateLineAdjoint {
 public:
  explicit CorrelateLineAdjoint(std::span<const double> taps) : taps_(taps) {}

  void operator()(std::span<const double> in, std::span<double> out) const {
    const int n = static_cast<int>(in.size());
    const int half = static_cast<int>(taps_.size() / 2);
    std::fill(out.begin(), out.end(), 0.0);
    for (int i = 0; i < n; ++i) {
      const double g = in[static_cast<std::size_t>(i)];
      for (int k = -half; k <= half; ++k) {
        out[static_cast<std::size_t>(std::clamp(i + k, 0, n - 1))] += taps_[static_cast<std::size_t>(k + half)] * g;
      }
    }
  }

 private:
  std::span<const double> taps_;
};

void check_taps(std::span<const double> taps) {
  if (taps.empty() || taps.size() % 2 == 0) {
    throw ArgumentError("separable filter taps must have odd, non-zero length");
  }
}

}  // namespace

Image box_mean(const Image& img, int radius) {
  if (radius < 0) throw ArgumentError("box_mean: radius must be >= 0");
  if (radius == 0) return img;
  BoxLine rows(radius);
  BoxLine cols(radius);
  return apply_separable(img, rows, cols);
}

Image sliding_min(const Image& img, int radius) {
  if (radius < 0) throw ArgumentError("sliding_min: radius must be >= 0");
  if (radius == 0) return img;
  MinLine rows(radius);
  MinLine cols(radius);
  return apply_separable(img, rows, cols);
}

Image separable_filter(const Image& img, std::span<const double> taps_x,
                       std::span<const double> taps_y) {
  check_taps(taps_x);
  check_taps(taps_y);
  CorrelateLine rows(taps_x);
  CorrelateLine cols(taps_y);
  return apply_separable(img, rows, cols);
}

Image separable_filter_adjoint(const Image& img, std::span<const double> taps_x,
                               std::span<const double> taps_y) {
  check_taps(taps_x);
  check_taps(taps_y);
  // The forward pass filters rows then columns; each 1-D stage acts on its
  // own axis, so the two adjoint stages commute and may run in either order.
  CorrelateLineAdjoint rows(taps_x);
  CorrelateLineAdjoint cols(taps_y);
  return apply_separable(img, rows, cols);
}

}  // namespace dehaze
