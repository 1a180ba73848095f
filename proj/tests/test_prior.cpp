#include <gtest/gtest.h>

#include "dehaze/errors.hpp"
#include "dehaze/transmission_prior.hpp"
#include "oracles.hpp"
#include "scenes.hpp"

using namespace dehaze;

TEST(DarkChannel, MatchesBruteForce) {
  const Image img = oracle::random_image(32, 32, 3, 90);
  for (int r : {0, 1, 3, 7}) EXPECT_EQ(dark_channel(img, r), oracle::dark_channel(img, r)) << "radius " << r;
}

TEST(DarkChannel, ZeroChannelInPatchGivesZero) {
  Image img(15, 15, 3, 0.8);
  img.at(2, 7, 7) = 0.0;
  const Image d = dark_channel(img, 2);
  EXPECT_EQ(d.at(0, 5, 5), 0.0);
  EXPECT_EQ(d.at(0, 9, 9), 0.0);
  EXPECT_EQ(d.at(0, 4, 7), 0.8);
}

TEST(DarkChannel, WhiteImageIsOne) {
  for (const Image v = dark_channel(Image(9, 9, 3, 1.0), 3); double s : v.samples()) EXPECT_EQ(s, 1.0);
}

TEST(PriorTransmission, BaseEqualToAirlightGivesOneMinusOmega) {
  const Airlight a{{0.9, 0.8, 0.85}};
  Image base(12, 12, 3);
  for (int c = 0; c < 3; ++c)
    for (double& s : base.plane(c)) s = a[c];
  const Image raw = raw_prior_transmission(base, a, 0.95, 7);
  for (double s : raw.samples()) EXPECT_NEAR(s, 0.05, 1e-15);
}

TEST(PriorTransmission, BlackPatchGivesOne) {
  const Image black(12, 12, 3, 0.0);
  const TransmissionMap t = estimate_t_prior(black, Airlight{{0.9, 0.9, 0.9}});
  for (double s : t.values.samples()) EXPECT_DOUBLE_EQ(s, 1.0);
}

TEST(PriorTransmission, OutputWithinFloorAndOne) {
  const Image img = oracle::random_image(48, 40, 3, 91);
  const TransmissionMap t = estimate_t_prior(img, Airlight{{0.5, 0.6, 0.4}});
  for (double s : t.values.samples()) {
    EXPECT_GE(s, kDefaultTFloor);
    EXPECT_LE(s, 1.0);
  }
}

TEST(PriorTransmission, BrighteningTowardAirlightNeverRaisesT) {
  const Airlight a{{0.95, 0.9, 0.92}};
  Image img = oracle::random_image(40, 40, 3, 92, 0.0, 0.9);
  std::mt19937 gen(93);
  std::uniform_int_distribution<int> pix(0, 39);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  Image before = raw_prior_transmission(img, a, 0.95, 3);
  for (int trial = 0; trial < 50; ++trial) {
    const int x = pix(gen);
    const int y = pix(gen);
    const double f = frac(gen);
    for (int c = 0; c < 3; ++c) {
      double& v = img.at(c, y, x);
      if (v < a[c]) v += f * (a[c] - v);
    }
    const Image after = raw_prior_transmission(img, a, 0.95, 3);
    for (std::size_t i = 0; i < after.samples().size(); ++i) {
      ASSERT_LE(after.samples()[i], before.samples()[i] + 1e-15);
    }
    before = after;
  }
}

TEST(PriorTransmission, ZeroAirlightChannelIsRejected) {
  EXPECT_THROW(estimate_t_prior(Image(8, 8, 3, 0.5), Airlight{{0.0, 0.9, 0.9}}), ArgumentError);
  EXPECT_THROW(estimate_t_prior(Image(8, 8, 3, 0.5), Airlight{{0.9, 0.9, 0.9}}, {0.0, 7, 0.05, {}}), ArgumentError);
}

TEST(PriorTransmission, RecoversSyntheticTransmission) {
  for (std::uint32_t seed = 0; seed < 5; ++seed) {
    const scenes::Scene s = scenes::make_scene({}, 300 + seed);
    const TransmissionMap t = estimate_t_prior(decompose(s.hazy, {}).base, s.airlight);
    EXPECT_LE(scenes::mean_abs_difference(t.values, s.t.values), 0.1) << "seed " << seed;
  }
}

TEST(PriorTransmission, BaseLayerBeatsNoisyInput) {
  // Estimating from the raw noisy image is less accurate than from its base
  // layer, for every noise realisation.
  const scenes::Scene s = scenes::make_scene({}, 400);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Image noisy = add_noise(s.hazy, 0.02, 500 + seed);
    const double raw_err = scenes::mean_abs_difference(estimate_t_prior(noisy, s.airlight).values, s.t.values);
    const double base_err =
        scenes::mean_abs_difference(estimate_t_prior(decompose(noisy, {}).base, s.airlight).values, s.t.values);
    EXPECT_GT(raw_err, base_err) << "seed " << seed;
  }
}
