#include <gtest/gtest.h>

#include <vector>

#include "dehaze/errors.hpp"
#include "dehaze/filters.hpp"
#include "oracles.hpp"

using namespace dehaze;

TEST(BoxMean, MatchesDirectSummation) {
  const Image img = oracle::random_image(64, 64, 3, 21);
  for (int r : {1, 2, 5, 16, 40}) {
    EXPECT_LE(max_abs_difference(box_mean(img, r), oracle::box_mean(img, r)), 1e-10) << "radius " << r;
  }
}

TEST(BoxMean, HandlesNonSquareAndTinyImages) {
  const Image img = oracle::random_image(7, 2, 1, 22);
  EXPECT_LE(max_abs_difference(box_mean(img, 3), oracle::box_mean(img, 3)), 1e-12);
  EXPECT_EQ(box_mean(img, 0), img);
  EXPECT_THROW(box_mean(img, -1), ArgumentError);
}

TEST(SlidingMin, MatchesBruteForceExactly) {
  for (std::uint32_t seed = 0; seed < 3; ++seed) {
    const Image img = oracle::random_image(32, 32, 1, 30 + seed);
    for (int r : {1, 3, 7}) {
      EXPECT_EQ(sliding_min(img, r), oracle::dark_channel(img, r)) << "radius " << r;
    }
  }
}

TEST(SlidingMin, WindowLargerThanImage) {
  const Image img = oracle::random_image(5, 3, 1, 33);
  EXPECT_EQ(sliding_min(img, 9), oracle::dark_channel(img, 9));
}

TEST(SeparableFilter, AdjointSatisfiesInnerProductIdentity) {
  const Image x = oracle::random_image(13, 9, 3, 40, -1.0, 1.0);
  const Image y = oracle::random_image(13, 9, 3, 41, -1.0, 1.0);
  const std::vector<double> tx{0.1, 0.3, 0.5, 0.2, -0.1};
  const std::vector<double> ty{0.25, 0.5, 0.25};
  const Image ax = separable_filter(x, tx, ty);
  const Image aty = separable_filter_adjoint(y, tx, ty);
  double lhs = 0.0;
  double rhs = 0.0;
  for (std::size_t i = 0; i < x.samples().size(); ++i) {
    lhs += ax.samples()[i] * y.samples()[i];
    rhs += x.samples()[i] * aty.samples()[i];
  }
  EXPECT_NEAR(lhs, rhs, 1e-12);
  const std::vector<double> even{0.5, 0.5};
  EXPECT_THROW(separable_filter(x, even, ty), ArgumentError);
}
