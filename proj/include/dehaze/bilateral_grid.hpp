#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "dehaze/image.hpp"
#include "dehaze/transmission.hpp"

namespace dehaze {

/// Dimensions of the low-resolution predictor.
///
/// The network takes an RGB + luminance image of size
/// (grid_x * 2^levels) x (grid_y * 2^levels), runs `levels` stride-2 3x3
/// convolution banks with ReLU (widths base_channels, 2*base_channels, ...),
/// and maps each cell of the resulting grid_x x grid_y feature map linearly
/// to grid_d (slope, offset) pairs.
struct GridShape {
  int grid_x = 16;
  int grid_y = 16;
  int grid_d = 8;
  int levels = 4;
  int base_channels = 8;

  static constexpr int kInputChannels = 4;

  int input_width() const { return grid_x << levels; }
  int input_height() const { return grid_y << levels; }
  int channels_out(int level) const { return base_channels << level; }
  int channels_in(int level) const { return level == 0 ? kInputChannels : channels_out(level - 1); }
  int head_outputs() const { return 2 * grid_d; }

  void validate() const;
  friend bool operator==(const GridShape&, const GridShape&) = default;
};

/// Channel-major feature tensor.
struct FeatureMap {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<double> data;

  FeatureMap() = default;
  FeatureMap(int c, int h, int w) : channels(c), height(h), width(w),
      data(static_cast<std::size_t>(c) * static_cast<std::size_t>(h) * static_cast<std::size_t>(w), 0.0) {}

  double& at(int c, int y, int x) { return data[index(c, y, x)]; }
  double at(int c, int y, int x) const { return data[index(c, y, x)]; }

 private:
  std::size_t index(int c, int y, int x) const {
    return (static_cast<std::size_t>(c) * static_cast<std::size_t>(height) + static_cast<std::size_t>(y)) *
               static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
  }
};

/// Bilateral grid of per-cell affine coefficients: t = slope * g + offset.
struct AffineGrid {
  int grid_x = 0;
  int grid_y = 0;
  int grid_d = 0;
  std::vector<double> slope;
  std::vector<double> offset;

  AffineGrid() = default;
  AffineGrid(int gx, int gy, int gd, double slope_fill = 0.0, double offset_fill = 0.0);

  std::size_t index(int x, int y, int z) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(grid_x) + static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(grid_d) + static_cast<std::size_t>(z);
  }
};

/// Trainable parameters, stored as one flat vector so optimisers, gradient
/// checks and serialisation can treat them uniformly.
///
/// Layout: for each conv level, weights [out][in][3][3] then bias [out];
/// then head weights [2*grid_d][channels_out(levels-1)] and head bias. Head
/// rows [0, grid_d) produce slopes, rows [grid_d, 2*grid_d) offsets.
class BilateralGridModel {
 public:
  /// All-zero parameters.
  explicit BilateralGridModel(const GridShape& shape = {});

  /// He-normal conv weights with zero bias; head slope rows N(0, 0.01^2);
  /// head offset rows zero with bias `offset_bias` so training starts from a
  /// mid-range transmission instead of the clamp floor.
  static BilateralGridModel initialized(const GridShape& shape, std::uint64_t seed,
                                        double offset_bias = 0.5);

  const GridShape& shape() const noexcept { return shape_; }
  std::span<double> parameters() noexcept { return params_; }
  std::span<const double> parameters() const noexcept { return params_; }
  std::size_t parameter_count() const noexcept { return params_.size(); }

  std::size_t conv_weight_offset(int level) const { return conv_offsets_[static_cast<std::size_t>(level)]; }
  std::size_t conv_bias_offset(int level) const;
  std::size_t head_weight_offset() const { return head_offset_; }
  std::size_t head_bias_offset() const;

  friend bool operator==(const BilateralGridModel&, const BilateralGridModel&) = default;

 private:
  GridShape shape_;
  std::vector<std::size_t> conv_offsets_;
  std::size_t head_offset_ = 0;
  std::vector<double> params_;
};

/// Intermediate values of one forward pass, kept for backpropagation.
struct ForwardCache {
  std::vector<FeatureMap> inputs;          // input to each conv level, then the head input
  std::vector<FeatureMap> pre_activations; // conv outputs before ReLU
};

/// RGB + luminance tensor fed to the network.
FeatureMap network_input(const Image& base_lowres);

/// Forward pass. `base_lowres` must be RGB with exactly the model's input size.
AffineGrid predict_grid(const BilateralGridModel& model, const Image& base_lowres,
                        ForwardCache* cache = nullptr);

/// Accumulates dL/dparams into `grad` (same layout as parameters()) given
/// dL/dgrid and the cache of the matching forward pass.
void backpropagate_grid(const BilateralGridModel& model, const ForwardCache& cache,
                        const AffineGrid& grad_grid, std::span<double> grad);

/// The 8 grid cells and trilinear weights used for one full-resolution pixel.
struct SliceStencil {
  std::array<std::size_t, 8> cell{};
  std::array<double, 8> weight{};
};

/// Cell-centred coordinates: pixel (x, y) of a W x H image maps to grid
/// position ((x + 0.5) Gx / W - 0.5, (y + 0.5) Gy / H - 0.5) and guidance g
/// to g * D - 0.5, each clamped to the grid extent.
SliceStencil slice_stencil(const AffineGrid& grid, int x, int y, int width, int height, double g);

/// slope(p) * g(p) + offset(p) with trilinearly interpolated coefficients,
/// no clamping.
Image slice_raw(const AffineGrid& grid, const Image& guidance);

/// slice_raw clamped to [t_floor, 1].
TransmissionMap slice(const AffineGrid& grid, const Image& guidance, double t_floor = kDefaultTFloor);

/// Accumulates dL/dgrid from dL/d(slice_raw).
void slice_backward(const Image& guidance, const Image& grad_raw, AffineGrid& grad_grid);

/// Resize the base layer to the model input, predict the grid, and slice it
/// against the full-resolution luminance of the base layer.
TransmissionMap estimate_t_learned(const BilateralGridModel& model, const Image& base,
                                   double t_floor = kDefaultTFloor);

/// Little-endian binary form: 8-byte magic, shape, per-layer shapes,
/// parameter count, then float64 parameters.
std::vector<std::uint8_t> serialize_model(const BilateralGridModel& model);
BilateralGridModel deserialize_model(std::span<const std::uint8_t> bytes);
void save_model(const BilateralGridModel& model, const std::filesystem::path& path);
BilateralGridModel load_model(const std::filesystem::path& path);

}  // namespace dehaze
