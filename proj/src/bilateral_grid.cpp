#include "dehaze/bilateral_grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "dehaze/errors.hpp"
#include "dehaze/random.hpp"

namespace dehaze {

void GridShape::validate() const {
  if (grid_x < 1 || grid_y < 1 || grid_d < 1) throw ArgumentError("grid dimensions must be >= 1");
  if (levels < 1 || levels > 8) throw ArgumentError("grid model needs 1..8 conv levels");
  if (base_channels < 1) throw ArgumentError("grid model base channel count must be >= 1");
}

AffineGrid::AffineGrid(int gx, int gy, int gd, double slope_fill, double offset_fill)
    : grid_x(gx), grid_y(gy), grid_d(gd),
      slope(static_cast<std::size_t>(gx) * static_cast<std::size_t>(gy) * static_cast<std::size_t>(gd), slope_fill),
      offset(slope.size(), offset_fill) {}

// ------------------------------------------------------------------ model

BilateralGridModel::BilateralGridModel(const GridShape& shape) : shape_(shape) {
  shape_.validate();
  std::size_t offset = 0;
  for (int l = 0; l < shape_.levels; ++l) {
    conv_offsets_.push_back(offset);
    const auto out = static_cast<std::size_t>(shape_.channels_out(l));
    const auto in = static_cast<std::size_t>(shape_.channels_in(l));
    offset += out * in * 9 + out;
  }
  head_offset_ = offset;
  const auto head_in = static_cast<std::size_t>(shape_.channels_out(shape_.levels - 1));
  const auto head_out = static_cast<std::size_t>(shape_.head_outputs());
  offset += head_out * head_in + head_out;
  params_.assign(offset, 0.0);
}

std::size_t BilateralGridModel::conv_bias_offset(int level) const {
  return conv_weight_offset(level) + static_cast<std::size_t>(shape_.channels_out(level)) *
                                         static_cast<std::size_t>(shape_.channels_in(level)) * 9;
}

std::size_t BilateralGridModel::head_bias_offset() const {
  return head_offset_ + static_cast<std::size_t>(shape_.head_outputs()) *
                            static_cast<std::size_t>(shape_.channels_out(shape_.levels - 1));
}

BilateralGridModel BilateralGridModel::initialized(const GridShape& shape, std::uint64_t seed,
                                                   double offset_bias) {
  BilateralGridModel model(shape);
  Rng rng(seed);
  auto p = model.parameters();
  for (int l = 0; l < shape.levels; ++l) {
    const double stddev = std::sqrt(2.0 / (9.0 * shape.channels_in(l)));
    for (std::size_t i = model.conv_weight_offset(l); i < model.conv_bias_offset(l); ++i) {
      p[i] = rng.normal(0.0, stddev);
    }
  }
  const auto head_in = static_cast<std::size_t>(shape.channels_out(shape.levels - 1));
  for (int k = 0; k < shape.grid_d; ++k) {
    for (std::size_t c = 0; c < head_in; ++c) {
      p[model.head_weight_offset() + static_cast<std::size_t>(k) * head_in + c] = rng.normal(0.0, 0.01);
    }
  }
  for (int k = shape.grid_d; k < shape.head_outputs(); ++k) {
    p[model.head_bias_offset() + static_cast<std::size_t>(k)] = offset_bias;
  }
  return model;
}

// ------------------------------------------------------------------ forward / backward

namespace {

// 3x3 convolution, stride 2, zero padding 1: out(y, x) reads in(2y-1..2y+1, 2x-1..2x+1).
FeatureMap conv_stride2(const FeatureMap& in, std::span<const double> weight, std::span<const double> bias,
                        int out_channels) {
  FeatureMap out(out_channels, in.height / 2, in.width / 2);
  for (int o = 0; o < out_channels; ++o) {
    for (int y = 0; y < out.height; ++y)
      for (int x = 0; x < out.width; ++x) out.at(o, y, x) = bias[static_cast<std::size_t>(o)];
    for (int i = 0; i < in.channels; ++i) {
      const double* w = weight.data() + (static_cast<std::size_t>(o) * static_cast<std::size_t>(in.channels) +
                                         static_cast<std::size_t>(i)) * 9;
      for (int y = 0; y < out.height; ++y) {
        for (int ky = 0; ky < 3; ++ky) {
          const int iy = 2 * y + ky - 1;
          if (iy < 0 || iy >= in.height) continue;
          for (int x = 0; x < out.width; ++x) {
            double acc = 0.0;
            for (int kx = 0; kx < 3; ++kx) {
              const int ix = 2 * x + kx - 1;
              if (ix < 0 || ix >= in.width) continue;
              acc += w[ky * 3 + kx] * in.at(i, iy, ix);
            }
            out.at(o, y, x) += acc;
          }
        }
      }
    }
  }
  return out;
}

void conv_stride2_backward(const FeatureMap& in, const FeatureMap& grad_out, std::span<const double> weight,
                           std::span<double> grad_weight, std::span<double> grad_bias, FeatureMap* grad_in) {
  for (int o = 0; o < grad_out.channels; ++o) {
    double bsum = 0.0;
    for (int y = 0; y < grad_out.height; ++y)
      for (int x = 0; x < grad_out.width; ++x) bsum += grad_out.at(o, y, x);
    grad_bias[static_cast<std::size_t>(o)] += bsum;
    for (int i = 0; i < in.channels; ++i) {
      const std::size_t base = (static_cast<std::size_t>(o) * static_cast<std::size_t>(in.channels) +
                                static_cast<std::size_t>(i)) * 9;
      for (int ky = 0; ky < 3; ++ky) {
        for (int kx = 0; kx < 3; ++kx) {
          const double w = weight[base + static_cast<std::size_t>(ky * 3 + kx)];
          double gw = 0.0;
          for (int y = 0; y < grad_out.height; ++y) {
            const int iy = 2 * y + ky - 1;
            if (iy < 0 || iy >= in.height) continue;
            for (int x = 0; x < grad_out.width; ++x) {
              const int ix = 2 * x + kx - 1;
              if (ix < 0 || ix >= in.width) continue;
              const double g = grad_out.at(o, y, x);
              gw += g * in.at(i, iy, ix);
              if (grad_in != nullptr) grad_in->at(i, iy, ix) += w * g;
            }
          }
          grad_weight[base + static_cast<std::size_t>(ky * 3 + kx)] += gw;
        }
      }
    }
  }
}

}  // namespace

FeatureMap network_input(const Image& base_lowres) {
  if (base_lowres.channels() != 3) throw ShapeError("network input must be RGB");
  FeatureMap in(GridShape::kInputChannels, base_lowres.height(), base_lowres.width());
  const Image luma = luminance(base_lowres);
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      for (int c = 0; c < 3; ++c) in.at(c, y, x) = base_lowres.at(c, y, x);
      in.at(3, y, x) = luma.at(0, y, x);
    }
  }
  return in;
}

AffineGrid predict_grid(const BilateralGridModel& model, const Image& base_lowres, ForwardCache* cache) {
  const GridShape& s = model.shape();
  if (base_lowres.width() != s.input_width() || base_lowres.height() != s.input_height()) {
    throw ShapeError("predict_grid: expected " + std::to_string(s.input_width()) + "x" +
                     std::to_string(s.input_height()) + " input, got " + std::to_string(base_lowres.width()) +
                     "x" + std::to_string(base_lowres.height()));
  }
  auto params = model.parameters();
  FeatureMap act = network_input(base_lowres);
  if (cache != nullptr) {
    cache->inputs.clear();
    cache->pre_activations.clear();
  }
  for (int l = 0; l < s.levels; ++l) {
    const std::size_t wo = model.conv_weight_offset(l);
    const std::size_t bo = model.conv_bias_offset(l);
    const int out_ch = s.channels_out(l);
    FeatureMap z = conv_stride2(act, params.subspan(wo, bo - wo),
                                params.subspan(bo, static_cast<std::size_t>(out_ch)), out_ch);
    FeatureMap next = z;
    for (double& v : next.data) v = std::max(0.0, v);
    if (cache != nullptr) {
      cache->inputs.push_back(std::move(act));
      cache->pre_activations.push_back(std::move(z));
    }
    act = std::move(next);
  }

  AffineGrid grid(s.grid_x, s.grid_y, s.grid_d);
  const int head_in = act.channels;
  const double* hw = params.data() + model.head_weight_offset();
  const double* hb = params.data() + model.head_bias_offset();
  for (int y = 0; y < s.grid_y; ++y) {
    for (int x = 0; x < s.grid_x; ++x) {
      for (int k = 0; k < s.head_outputs(); ++k) {
        double v = hb[k];
        for (int c = 0; c < head_in; ++c) v += hw[k * head_in + c] * act.at(c, y, x);
        if (k < s.grid_d) {
          grid.slope[grid.index(x, y, k)] = v;
        } else {
          grid.offset[grid.index(x, y, k - s.grid_d)] = v;
        }
      }
    }
  }
  if (cache != nullptr) cache->inputs.push_back(std::move(act));
  return grid;
}

void backpropagate_grid(const BilateralGridModel& model, const ForwardCache& cache, const AffineGrid& grad_grid,
                        std::span<double> grad) {
  const GridShape& s = model.shape();
  if (grad.size() != model.parameter_count()) throw ShapeError("backpropagate_grid: gradient size mismatch");
  if (cache.inputs.size() != static_cast<std::size_t>(s.levels + 1)) {
    throw ArgumentError("backpropagate_grid: cache does not match model");
  }
  auto params = model.parameters();

  const FeatureMap& head_input = cache.inputs.back();
  const int head_in = head_input.channels;
  const double* hw = params.data() + model.head_weight_offset();
  double* ghw = grad.data() + model.head_weight_offset();
  double* ghb = grad.data() + model.head_bias_offset();
  FeatureMap grad_act(head_in, head_input.height, head_input.width);
  for (int y = 0; y < s.grid_y; ++y) {
    for (int x = 0; x < s.grid_x; ++x) {
      for (int k = 0; k < s.head_outputs(); ++k) {
        const double g = k < s.grid_d ? grad_grid.slope[grad_grid.index(x, y, k)]
                                      : grad_grid.offset[grad_grid.index(x, y, k - s.grid_d)];
        if (g == 0.0) continue;
        ghb[k] += g;
        for (int c = 0; c < head_in; ++c) {
          ghw[k * head_in + c] += g * head_input.at(c, y, x);
          grad_act.at(c, y, x) += g * hw[k * head_in + c];
        }
      }
    }
  }

  for (int l = s.levels - 1; l >= 0; --l) {
    const FeatureMap& z = cache.pre_activations[static_cast<std::size_t>(l)];
    FeatureMap grad_z = std::move(grad_act);
    for (std::size_t i = 0; i < grad_z.data.size(); ++i) {
      if (!(z.data[i] > 0.0)) grad_z.data[i] = 0.0;
    }
    const FeatureMap& in = cache.inputs[static_cast<std::size_t>(l)];
    const std::size_t wo = model.conv_weight_offset(l);
    const std::size_t bo = model.conv_bias_offset(l);
    FeatureMap grad_in;
    if (l > 0) grad_in = FeatureMap(in.channels, in.height, in.width);
    conv_stride2_backward(in, grad_z, params.subspan(wo, bo - wo), grad.subspan(wo, bo - wo),
                          grad.subspan(bo, static_cast<std::size_t>(s.channels_out(l))),
                          l > 0 ? &grad_in : nullptr);
    grad_act = std::move(grad_in);
  }
}

// ------------------------------------------------------------------ slicing

namespace {

struct AxisTap {
  int i0;
  int i1;
  double f;  // weight of i1
};

AxisTap axis_tap(double coord, int extent) {
  coord = std::clamp(coord, 0.0, static_cast<double>(extent - 1));
  const int i0 = static_cast<int>(std::floor(coord));
  const int i1 = std::min(i0 + 1, extent - 1);
  return {i0, i1, coord - i0};
}

}  // namespace

SliceStencil slice_stencil(const AffineGrid& grid, int x, int y, int width, int height, double g) {
  const AxisTap tx = axis_tap((x + 0.5) * grid.grid_x / width - 0.5, grid.grid_x);
  const AxisTap ty = axis_tap((y + 0.5) * grid.grid_y / height - 0.5, grid.grid_y);
  const AxisTap tz = axis_tap(g * grid.grid_d - 0.5, grid.grid_d);
  SliceStencil s;
  std::size_t k = 0;
  for (int dz = 0; dz < 2; ++dz) {
    const int zi = dz == 0 ? tz.i0 : tz.i1;
    const double wz = dz == 0 ? 1.0 - tz.f : tz.f;
    for (int dy = 0; dy < 2; ++dy) {
      const int yi = dy == 0 ? ty.i0 : ty.i1;
      const double wy = dy == 0 ? 1.0 - ty.f : ty.f;
      for (int dx = 0; dx < 2; ++dx, ++k) {
        const int xi = dx == 0 ? tx.i0 : tx.i1;
        const double wx = dx == 0 ? 1.0 - tx.f : tx.f;
        s.cell[k] = grid.index(xi, yi, zi);
        s.weight[k] = wx * wy * wz;
      }
    }
  }
  return s;
}

Image slice_raw(const AffineGrid& grid, const Image& guidance) {
  if (guidance.channels() != 1) throw ShapeError("slice: guidance must be single-channel");
  Image out(guidance.width(), guidance.height(), 1);
  for (int y = 0; y < guidance.height(); ++y) {
    for (int x = 0; x < guidance.width(); ++x) {
      const double g = guidance.at(0, y, x);
      const SliceStencil st = slice_stencil(grid, x, y, guidance.width(), guidance.height(), g);
      double a = 0.0;
      double b = 0.0;
      for (std::size_t k = 0; k < 8; ++k) {
        a += st.weight[k] * grid.slope[st.cell[k]];
        b += st.weight[k] * grid.offset[st.cell[k]];
      }
      out.at(0, y, x) = a * g + b;
    }
  }
  return out;
}

TransmissionMap slice(const AffineGrid& grid, const Image& guidance, double t_floor) {
  Image t = slice_raw(grid, guidance);
  for (double& v : t.samples()) v = std::clamp(v, t_floor, 1.0);
  return {std::move(t)};
}

void slice_backward(const Image& guidance, const Image& grad_raw, AffineGrid& grad_grid) {
  require_same_shape(guidance, grad_raw, "slice_backward");
  for (int y = 0; y < guidance.height(); ++y) {
    for (int x = 0; x < guidance.width(); ++x) {
      const double gr = grad_raw.at(0, y, x);
      if (gr == 0.0) continue;
      const double g = guidance.at(0, y, x);
      const SliceStencil st = slice_stencil(grad_grid, x, y, guidance.width(), guidance.height(), g);
      for (std::size_t k = 0; k < 8; ++k) {
        grad_grid.slope[st.cell[k]] += st.weight[k] * g * gr;
        grad_grid.offset[st.cell[k]] += st.weight[k] * gr;
      }
    }
  }
}

TransmissionMap estimate_t_learned(const BilateralGridModel& model, const Image& base, double t_floor) {
  if (base.channels() != 3) throw ShapeError("estimate_t_learned: expected an RGB base layer");
  const GridShape& s = model.shape();
  const Image lowres = resize(base, s.input_width(), s.input_height());
  const AffineGrid grid = predict_grid(model, lowres);
  return slice(grid, clamp01(luminance(base)), t_floor);
}

// ------------------------------------------------------------------ serialisation

namespace {

constexpr char kMagic[8] = {'D', 'H', 'Z', 'B', 'G', 'M', '0', '1'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint64_t read(int n) {
    if (pos_ + static_cast<std::size_t>(n) > bytes_.size()) throw FormatError("model file truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + static_cast<std::size_t>(i)]) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(read(4)); }
  std::uint64_t u64() { return read(8); }
  std::span<const std::uint8_t> take(std::size_t n) {
    if (pos_ + n > bytes_.size()) throw FormatError("model file truncated");
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize_model(const BilateralGridModel& model) {
  const GridShape& s = model.shape();
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put_u32(out, static_cast<std::uint32_t>(s.grid_x));
  put_u32(out, static_cast<std::uint32_t>(s.grid_y));
  put_u32(out, static_cast<std::uint32_t>(s.grid_d));
  put_u32(out, static_cast<std::uint32_t>(s.levels));
  put_u32(out, static_cast<std::uint32_t>(s.base_channels));
  put_u32(out, static_cast<std::uint32_t>(GridShape::kInputChannels));
  // Layer shapes: out, in, kernel size.
  put_u32(out, static_cast<std::uint32_t>(s.levels + 1));
  for (int l = 0; l < s.levels; ++l) {
    put_u32(out, static_cast<std::uint32_t>(s.channels_out(l)));
    put_u32(out, static_cast<std::uint32_t>(s.channels_in(l)));
    put_u32(out, 3);
  }
  put_u32(out, static_cast<std::uint32_t>(s.head_outputs()));
  put_u32(out, static_cast<std::uint32_t>(s.channels_out(s.levels - 1)));
  put_u32(out, 1);
  put_u64(out, model.parameter_count());
  for (double p : model.parameters()) put_u64(out, std::bit_cast<std::uint64_t>(p));
  return out;
}

BilateralGridModel deserialize_model(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  const auto magic = in.take(sizeof kMagic);
  if (std::memcmp(magic.data(), kMagic, sizeof kMagic) != 0) throw FormatError("not a grid model file (bad magic)");
  GridShape s;
  s.grid_x = static_cast<int>(in.u32());
  s.grid_y = static_cast<int>(in.u32());
  s.grid_d = static_cast<int>(in.u32());
  s.levels = static_cast<int>(in.u32());
  s.base_channels = static_cast<int>(in.u32());
  if (in.u32() != static_cast<std::uint32_t>(GridShape::kInputChannels)) {
    throw FormatError("grid model: unsupported input channel count");
  }
  try {
    s.validate();
  } catch (const ArgumentError& e) {
    throw FormatError(std::string("grid model: ") + e.what());
  }
  if (in.u32() != static_cast<std::uint32_t>(s.levels + 1)) throw FormatError("grid model: layer count mismatch");
  for (int l = 0; l <= s.levels; ++l) {
    const bool head = l == s.levels;
    const auto out_ch = in.u32();
    const auto in_ch = in.u32();
    const auto k = in.u32();
    const bool ok = head ? (out_ch == static_cast<std::uint32_t>(s.head_outputs()) &&
                            in_ch == static_cast<std::uint32_t>(s.channels_out(s.levels - 1)) && k == 1)
                         : (out_ch == static_cast<std::uint32_t>(s.channels_out(l)) &&
                            in_ch == static_cast<std::uint32_t>(s.channels_in(l)) && k == 3);
    if (!ok) throw FormatError("grid model: layer " + std::to_string(l) + " shape mismatch");
  }
  BilateralGridModel model(s);
  if (in.u64() != model.parameter_count()) throw FormatError("grid model: parameter count mismatch");
  for (double& p : model.parameters()) {
    p = std::bit_cast<double>(in.u64());
    if (!std::isfinite(p)) throw FormatError("grid model: non-finite parameter");
  }
  if (!in.done()) throw FormatError("grid model: trailing bytes");
  return model;
}

void save_model(const BilateralGridModel& model, const std::filesystem::path& path) {
  const auto bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

BilateralGridModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

}  // namespace dehaze
