#include <gtest/gtest.h>

#include <cstring>

#include "dehaze/bilateral_grid.hpp"
#include "dehaze/errors.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace dehaze;

namespace {

GridShape reduced() {
  GridShape s;
  s.grid_x = 4;
  s.grid_y = 4;
  s.grid_d = 4;
  s.levels = 2;
  return s;
}

AffineGrid random_grid(int gx, int gy, int gd, std::uint32_t seed) {
  AffineGrid g(gx, gy, gd);
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& v : g.slope) v = u(gen);
  for (double& v : g.offset) v = u(gen);
  return g;
}

std::vector<std::uint8_t> relu_pattern(const ForwardCache& cache) {
  std::vector<std::uint8_t> p;
  for (const FeatureMap& z : cache.pre_activations)
    for (double v : z.data) p.push_back(v > 0.0);
  return p;
}

}  // namespace

TEST(GridModel, ParameterLayout) {
  const BilateralGridModel m(reduced());
  // conv0: 8*4*9+8, conv1: 16*8*9+16, head: 8*16+8.
  EXPECT_EQ(m.parameter_count(), 296u + 1168u + 136u);
  EXPECT_EQ(m.conv_bias_offset(0), 288u);
  EXPECT_EQ(m.head_weight_offset(), 1464u);
  EXPECT_EQ(m.head_bias_offset(), 1464u + 128u);
  const BilateralGridModel full{GridShape{}};
  EXPECT_EQ(full.shape().input_width(), 256);
  EXPECT_EQ(full.shape().channels_out(3), 64);
}

TEST(GridModel, InitialisationFollowsTheScheme) {
  const BilateralGridModel m = BilateralGridModel::initialized(reduced(), 3);
  const auto p = m.parameters();
  for (std::size_t i = m.conv_bias_offset(0); i < m.conv_weight_offset(1); ++i) EXPECT_EQ(p[i], 0.0);
  // Head slope rows are small, offset rows zero with the offset bias.
  const std::size_t head_in = 16;
  for (std::size_t r = 4; r < 8; ++r)
    for (std::size_t c = 0; c < head_in; ++c) EXPECT_EQ(p[m.head_weight_offset() + r * head_in + c], 0.0);
  for (std::size_t r = 0; r < 4; ++r) EXPECT_EQ(p[m.head_bias_offset() + r], 0.0);
  for (std::size_t r = 4; r < 8; ++r) EXPECT_EQ(p[m.head_bias_offset() + r], 0.5);
  EXPECT_EQ(m, BilateralGridModel::initialized(reduced(), 3));
  EXPECT_NE(m, BilateralGridModel::initialized(reduced(), 4));
}

TEST(PredictGrid, ZeroModelGivesZeroGridAndFloorTransmission) {
  const BilateralGridModel m(reduced());
  const AffineGrid g = predict_grid(m, oracle::random_image(16, 16, 3, 250));
  for (double v : g.slope) EXPECT_EQ(v, 0.0);
  for (double v : g.offset) EXPECT_EQ(v, 0.0);
  const TransmissionMap t = slice(g, oracle::random_image(20, 12, 1, 251));
  for (double v : t.values.samples()) EXPECT_EQ(v, kDefaultTFloor);
}

TEST(PredictGrid, DeterministicAndShapeChecked) {
  const BilateralGridModel m = BilateralGridModel::initialized(reduced(), 5);
  const Image in = oracle::random_image(16, 16, 3, 252);
  const AffineGrid a = predict_grid(m, in);
  const AffineGrid b = predict_grid(m, in);
  EXPECT_EQ(a.slope, b.slope);
  EXPECT_EQ(a.offset, b.offset);
  EXPECT_THROW(predict_grid(m, oracle::random_image(17, 16, 3, 1)), ShapeError);
  EXPECT_THROW(predict_grid(m, oracle::random_image(16, 16, 1, 1)), ShapeError);
}

TEST(PredictGrid, JacobianMatchesFiniteDifferences) {
  BilateralGridModel m = BilateralGridModel::initialized(reduced(), 6);
  // Random biases so that ReLUs are not all sitting at zero.
  std::mt19937 gen(7);
  std::normal_distribution<double> n(0.0, 0.1);
  for (int l = 0; l < 2; ++l)
    for (std::size_t i = m.conv_bias_offset(l); i < m.conv_weight_offset(l) + (l == 0 ? 296u : 1168u); ++i)
      m.parameters()[i] = n(gen);
  const Image in = oracle::random_image(16, 16, 3, 253);
  const AffineGrid probe = random_grid(4, 4, 4, 254);
  auto objective = [&] {
    const AffineGrid g = predict_grid(m, in);
    double s = 0.0;
    for (std::size_t i = 0; i < g.slope.size(); ++i) s += probe.slope[i] * g.slope[i] + probe.offset[i] * g.offset[i];
    return s;
  };
  ForwardCache cache;
  predict_grid(m, in, &cache);
  const auto pattern = relu_pattern(cache);
  std::vector<double> grad(m.parameter_count(), 0.0);
  backpropagate_grid(m, cache, probe, grad);

  int checked = 0;
  for (std::size_t i = 0; i < m.parameter_count(); ++i) {
    double& x = m.parameters()[i];
    const double saved = x;
    const double h = 1e-6;
    bool kink = false;
    for (double sign : {1.0, -1.0}) {
      x = saved + sign * h;
      ForwardCache c;
      predict_grid(m, in, &c);
      kink = kink || relu_pattern(c) != pattern;
    }
    x = saved;
    if (kink) continue;
    const double fd = oracle::central_difference(objective, x, h);
    const double err = oracle::relative_error(grad[i], fd);
    EXPECT_TRUE(err < 1e-5 || std::abs(grad[i] - fd) <= 1e-8) << "param " << i << " analytic " << grad[i] << " fd " << fd;
    ++checked;
  }
  EXPECT_GT(checked, static_cast<int>(m.parameter_count() * 9 / 10));
}

TEST(Slice, ConstantGrid) {
  const AffineGrid g(4, 3, 5, 0.0, 0.6);
  const TransmissionMap t = slice(g, oracle::random_image(13, 9, 1, 255));
  for (double v : t.values.samples()) EXPECT_NEAR(v, 0.6, 1e-15);
}

TEST(Slice, IdentityAffine) {
  const AffineGrid g(4, 4, 8, 1.0, 0.0);
  const Image guide = oracle::random_image(10, 10, 1, 256);
  const TransmissionMap t = slice(g, guide);
  for (std::size_t i = 0; i < guide.samples().size(); ++i) {
    EXPECT_NEAR(t.values.samples()[i], std::clamp(guide.samples()[i], kDefaultTFloor, 1.0), 1e-15);
  }
}

TEST(Slice, MatchesTentOracle) {
  const AffineGrid g = random_grid(4, 3, 5, 257);
  const Image guide = oracle::random_image(8, 8, 1, 258);
  const Image raw = slice_raw(g, guide);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      const double gv = guide.at(0, y, x);
      const double u = (x + 0.5) * 4 / 8.0 - 0.5;
      const double v = (y + 0.5) * 3 / 8.0 - 0.5;
      const double w = gv * 5 - 0.5;
      const double a = oracle::trilinear(g.slope, 4, 3, 5, u, v, w);
      const double b = oracle::trilinear(g.offset, 4, 3, 5, u, v, w);
      EXPECT_NEAR(raw.at(0, y, x), a * gv + b, 1e-12);
    }
}

TEST(Slice, WeightsFormPartitionOfUnity) {
  const AffineGrid g(5, 4, 6);
  const Image guide = oracle::random_image(23, 17, 1, 259);
  for (int y = 0; y < 17; ++y)
    for (int x = 0; x < 23; ++x) {
      const SliceStencil s = slice_stencil(g, x, y, 23, 17, guide.at(0, y, x));
      double sum = 0.0;
      for (double w : s.weight) {
        EXPECT_GE(w, 0.0);
        sum += w;
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
}

TEST(Slice, BackwardIsTheAdjoint) {
  const AffineGrid g = random_grid(4, 4, 4, 260);
  const Image guide = oracle::random_image(11, 9, 1, 261);
  const Image w = oracle::random_image(11, 9, 1, 262, -1.0, 1.0);
  const Image raw = slice_raw(g, guide);
  double lhs = 0.0;
  for (std::size_t i = 0; i < raw.samples().size(); ++i) lhs += raw.samples()[i] * w.samples()[i];
  AffineGrid grad(4, 4, 4);
  slice_backward(guide, w, grad);
  double rhs = 0.0;
  for (std::size_t i = 0; i < g.slope.size(); ++i) rhs += g.slope[i] * grad.slope[i] + g.offset[i] * grad.offset[i];
  EXPECT_NEAR(lhs, rhs, 1e-12);
}

TEST(EstimateTLearned, FullResolutionAndRange) {
  const BilateralGridModel m = BilateralGridModel::initialized(reduced(), 8);
  const Image base = oracle::random_image(37, 29, 3, 263);
  const TransmissionMap t = estimate_t_learned(m, base);
  EXPECT_EQ(t.width(), 37);
  EXPECT_EQ(t.height(), 29);
  for (double v : t.values.samples()) {
    EXPECT_GE(v, kDefaultTFloor);
    EXPECT_LE(v, 1.0);
  }
}

TEST(ModelFile, RoundTripAndLayout) {
  const BilateralGridModel m = BilateralGridModel::initialized(reduced(), 9);
  const auto bytes = serialize_model(m);
  EXPECT_EQ(std::memcmp(bytes.data(), "DHZBGM01", 8), 0);
  // magic + 6 shape words + layer count + 3 layers of 3 words + count + params
  EXPECT_EQ(bytes.size(), 8u + 24u + 4u + 36u + 8u + 8u * m.parameter_count());
  EXPECT_EQ(bytes[8], 4);  // grid_x, little-endian
  EXPECT_EQ(deserialize_model(bytes), m);

  testing_support::TempDir dir("model");
  save_model(m, dir / "m.bin");
  EXPECT_EQ(load_model(dir / "m.bin"), m);
}

TEST(ModelFile, RejectsCorruptInput) {
  const auto bytes = serialize_model(BilateralGridModel(reduced()));
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(deserialize_model(bad_magic), FormatError);
  auto truncated = bytes;
  truncated.pop_back();
  EXPECT_THROW(deserialize_model(truncated), FormatError);
  auto trailing = bytes;
  trailing.push_back(0);
  EXPECT_THROW(deserialize_model(trailing), FormatError);
  auto bad_layer = bytes;
  bad_layer[8 + 24 + 4] = 9;  // first layer output channels
  EXPECT_THROW(deserialize_model(bad_layer), FormatError);
  EXPECT_THROW(load_model("/nonexistent/model.bin"), IoError);
}
