#include <gtest/gtest.h>

#include "dehaze/airlight.hpp"
#include "dehaze/errors.hpp"
#include "oracles.hpp"

using namespace dehaze;

namespace {

void fill_rect(Image& img, int x0, int y0, int w, int h, double r, double g, double b) {
  for (int y = y0; y < y0 + h; ++y) {
    for (int x = x0; x < x0 + w; ++x) {
      img.at(0, y, x) = r;
      img.at(1, y, x) = g;
      img.at(2, y, x) = b;
    }
  }
}

bool nested(const Region& inner, const Region& outer) {
  return inner.x >= outer.x && inner.y >= outer.y && inner.x + inner.width <= outer.x + outer.width &&
         inner.y + inner.height <= outer.y + outer.height;
}

}  // namespace

TEST(Airlight, BrightUniformQuadrantWins) {
  Image img = oracle::random_image(128, 128, 3, 80, 0.0, 0.4);
  fill_rect(img, 0, 0, 64, 64, 0.95, 0.95, 0.95);
  const AirlightEstimate est = estimate_airlight(img);
  for (int c = 0; c < 3; ++c) EXPECT_DOUBLE_EQ(est.airlight[c], 0.95);
  EXPECT_TRUE((Region{0, 0, 64, 64}.contains(est.pixel_x, est.pixel_y)));
}

TEST(Airlight, ConstantImageTiesResolveTopLeft) {
  const Image img(64, 48, 3, 0.6);
  const AirlightEstimate est = estimate_airlight(img);
  for (int c = 0; c < 3; ++c) EXPECT_DOUBLE_EQ(est.airlight[c], 0.6);
  EXPECT_EQ(est.pixel_x, 0);
  EXPECT_EQ(est.pixel_y, 0);
  for (const Region& r : est.path) {
    EXPECT_EQ(r.x, 0);
    EXPECT_EQ(r.y, 0);
  }
}

TEST(Airlight, FlatSkyBeatsBrighterSpeckle) {
  Image img(128, 128, 3, 0.05);
  // Top-left speckle: mean 0.8, std 0.2, score 0.6.
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) {
      const double v = (x + y) % 2 == 0 ? 1.0 : 0.6;
      fill_rect(img, x, y, 1, 1, v, v, v);
    }
  // Top-right flat sky: mean 0.75, std 0, score 0.75.
  fill_rect(img, 64, 0, 64, 64, 0.75, 0.75, 0.75);
  const AirlightEstimate est = estimate_airlight(img);
  EXPECT_DOUBLE_EQ(est.airlight[0], 0.75);
  EXPECT_GE(est.pixel_x, 64);
  EXPECT_LT(est.pixel_y, 64);
}

TEST(Airlight, PathIsNestedAndContainsThePixel) {
  const Image img = oracle::random_image(200, 150, 3, 81);
  const AirlightEstimate est = estimate_airlight(img);
  ASSERT_GE(est.path.size(), 2u);
  EXPECT_EQ(est.path.front(), (Region{0, 0, 200, 150}));
  for (std::size_t i = 1; i < est.path.size(); ++i) EXPECT_TRUE(nested(est.path[i], est.path[i - 1]));
  EXPECT_TRUE(est.path.back().contains(est.pixel_x, est.pixel_y));
  // The loop stops only once a size limit is reached.
  const Region& leaf = est.path.back();
  EXPECT_TRUE(std::min(leaf.width, leaf.height) < 16 || leaf.width * leaf.height < 0.005 * 200 * 150);
}

TEST(Airlight, PicksPixelClosestToWhiteInLeaf) {
  const Image img = oracle::random_image(40, 40, 3, 82);
  const AirlightEstimate est = estimate_airlight(img);
  const Region& leaf = est.path.back();
  double best = 1e9;
  for (int y = leaf.y; y < leaf.y + leaf.height; ++y)
    for (int x = leaf.x; x < leaf.x + leaf.width; ++x) {
      double d = 0.0;
      for (int c = 0; c < 3; ++c) d += (1.0 - img.at(c, y, x)) * (1.0 - img.at(c, y, x));
      best = std::min(best, d);
    }
  double got = 0.0;
  for (int c = 0; c < 3; ++c) got += (1.0 - est.airlight[c]) * (1.0 - est.airlight[c]);
  EXPECT_DOUBLE_EQ(got, best);
}

TEST(Airlight, SmallImageSkipsRecursion) {
  const Image img = oracle::random_image(10, 12, 3, 83);
  const AirlightEstimate est = estimate_airlight(img);
  EXPECT_EQ(est.path.size(), 1u);
}

TEST(Airlight, IsDeterministic) {
  const Image img = oracle::random_image(97, 61, 3, 84);
  const AirlightEstimate a = estimate_airlight(img);
  const AirlightEstimate b = estimate_airlight(img);
  EXPECT_EQ(a.airlight, b.airlight);
  EXPECT_EQ(a.path, b.path);
}

TEST(Airlight, RejectsGrayInput) {
  EXPECT_THROW(estimate_airlight(Image(32, 32, 1, 0.5)), ShapeError);
}

TEST(Airlight, DebugOverlayMarksPath) {
  const Image img(64, 64, 3, 0.5);
  const AirlightEstimate est = estimate_airlight(img);
  const Image dbg = draw_airlight_path(img, est);
  EXPECT_EQ(dbg.at(0, 0, 63), 1.0);
  EXPECT_EQ(dbg.at(1, 0, 63), 0.0);
}
