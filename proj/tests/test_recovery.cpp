#include <gtest/gtest.h>

#include <cmath>

#include "dehaze/errors.hpp"
#include "dehaze/metrics.hpp"
#include "dehaze/noise_analysis.hpp"
#include "dehaze/recovery.hpp"
#include "dehaze/synthesis.hpp"
#include "oracles.hpp"

using namespace dehaze;

namespace {

TransmissionMap random_t(int w, int h, std::uint32_t seed, double lo, double hi) {
  return {oracle::random_image(w, h, 1, seed, lo, hi)};
}

LayerPair random_layers(int w, int h, std::uint32_t seed) {
  LayerPair lp{oracle::random_image(w, h, 3, seed, 0.2, 0.9), oracle::random_image(w, h, 3, seed + 1, -0.1, 0.1)};
  return lp;
}

RecoveryParams unclamped() {
  RecoveryParams p;
  p.clamp_output = false;
  return p;
}

}  // namespace

TEST(Gate, MidpointIsExactlyHalf) {
  for (double eta : {2.0, 4.0, 8.0}) EXPECT_EQ(gate(1.0 / eta, eta), 0.5);
}

TEST(Gate, Limits) {
  EXPECT_NEAR(gate(0.0, 4.0), 1.0 / (1.0 + std::exp(32.0)), 1e-28);
  EXPECT_LT(gate(0.0, 4.0), 2e-14);
  EXPECT_NEAR(gate(0.5, 4.0), 1.0 / (1.0 + std::exp(-32.0)), 1e-15);
}

TEST(Gate, StrictlyIncreasing) {
  double prev = gate(0.0, 4.0);
  for (int i = 1; i <= 1000; ++i) {
    // Stay where the sigmoid is not yet saturated to 1 in double precision.
    const double t = 0.45 * i / 1000.0;
    const double g = gate(t, 4.0);
    EXPECT_GT(g, prev) << "t = " << t;
    prev = g;
  }
}

TEST(Gate, DerivativeMatchesFiniteDifference) {
  for (double t : {0.1, 0.2, 0.25, 0.3}) {
    double x = t;
    const double fd = oracle::central_difference([&] { return gate(x, 4.0); }, x, 1e-7);
    EXPECT_LT(oracle::relative_error(gate_derivative(t, 4.0), fd), 1e-6);
  }
}

TEST(RecoverClassic, UnitTransmissionIsIdentity) {
  const Image z = oracle::random_image(16, 16, 3, 110);
  EXPECT_LE(max_abs_difference(recover_classic(z, TransmissionMap::constant(16, 16, 1.0), {{0.8, 0.9, 0.7}}, 0.1), z),
            1e-15);
}

TEST(RecoverClassic, AirlightIsAFixedPoint) {
  const Airlight a{{0.8, 0.9, 0.7}};
  Image z(8, 8, 3);
  for (int c = 0; c < 3; ++c)
    for (double& s : z.plane(c)) s = a[c];
  const Image out = recover_classic(z, random_t(8, 8, 111, 0.0, 1.0), a, 0.1);
  EXPECT_LE(max_abs_difference(out, z), 1e-15);
}

TEST(RecoverClassic, InvertsHazeModel) {
  for (std::uint32_t seed = 0; seed < 5; ++seed) {
    const Image clean = oracle::random_image(64, 64, 3, 120 + seed);
    const TransmissionMap t = random_t(64, 64, 130 + seed, 0.1, 1.0);
    const Airlight a{{0.85, 0.9, 0.95}};
    EXPECT_GE(psnr(recover_classic(apply_haze(clean, t, a), t, a, 0.1), clean), 60.0);
  }
}

TEST(RecoverClassic, ClampsOnlyAtTheEnd) {
  const Image z(2, 2, 3, 0.1);
  const TransmissionMap t = TransmissionMap::constant(2, 2, 0.1);
  const Airlight a{{0.9, 0.9, 0.9}};
  EXPECT_NEAR(recover_classic(z, t, a, 0.1, false).at(0, 0, 0), -7.1, 1e-12);
  EXPECT_EQ(recover_classic(z, t, a, 0.1).at(0, 0, 0), 0.0);
  EXPECT_THROW(recover_classic(z, TransmissionMap::constant(3, 2, 0.5), a, 0.1), ShapeError);
  EXPECT_THROW(recover_classic(z, t, a, 0.0), ArgumentError);
}

TEST(RecoverFused, OpenGateEqualsClassic) {
  const LayerPair lp = random_layers(20, 20, 140);
  const TransmissionMap t = random_t(20, 20, 142, 0.05, 1.0);
  const Airlight a{{0.8, 0.85, 0.9}};
  Image z = lp.base;
  for (std::size_t i = 0; i < z.samples().size(); ++i) z.samples()[i] += lp.detail.samples()[i];
  const Image fused = recover_fused_gated(lp, t, Image(20, 20, 1, 1.0), a, unclamped());
  EXPECT_LE(max_abs_difference(fused, recover_classic(z, t, a, 0.1, false)), 1e-12);
}

TEST(RecoverFused, ClosedGatePassesDetailThrough) {
  const LayerPair lp = random_layers(20, 20, 150);
  const TransmissionMap t = random_t(20, 20, 152, 0.05, 1.0);
  const Airlight a{{0.8, 0.85, 0.9}};
  const Image fused = recover_fused_gated(lp, t, Image(20, 20, 1, 0.0), a, unclamped());
  const Image base_only = recover_classic(lp.base, t, a, 0.1, false);
  for (std::size_t i = 0; i < fused.samples().size(); ++i) {
    EXPECT_NEAR(fused.samples()[i], base_only.samples()[i] + lp.detail.samples()[i], 1e-12);
  }
}

TEST(RecoverFused, AgreesWithClassicWhereGateIsOpen) {
  const RecoveryParams p = unclamped();
  const double t_min = (1.0 / p.eta) * (1.0 + 8.0 / p.slope);
  const LayerPair lp = random_layers(32, 32, 160);
  const TransmissionMap t = random_t(32, 32, 162, t_min, 1.0);
  const Airlight a{{0.9, 0.9, 0.9}};
  Image z = lp.base;
  for (std::size_t i = 0; i < z.samples().size(); ++i) z.samples()[i] += lp.detail.samples()[i];
  EXPECT_LE(max_abs_difference(recover_fused(lp, t, a, p), recover_classic(z, t, a, p.t0, false)), 1e-3);
}

TEST(RecoverFused, SampleDerivativeMatchesFiniteDifference) {
  const RecoveryParams p;
  for (double t : {0.07, 0.2, 0.25, 0.31, 0.8}) {
    double x = t;
    const double fd = oracle::central_difference([&] { return fused_sample(0.6, 0.05, 0.9, x, p).value; }, x, 1e-7);
    const double d = fused_sample(0.6, 0.05, 0.9, t, p).d_dt;
    // Where the gate is shut the derivative is ~1e-10 and the difference
    // quotient is pure rounding, so an absolute floor applies there.
    EXPECT_TRUE(oracle::relative_error(d, fd) < 1e-6 || std::abs(d - fd) <= 1e-8) << "t = " << t << " d = " << d << " fd = " << fd;
  }
}

TEST(RecoverFused, SuppressesNoiseInDenseHaze) {
  NoiseExperiment setup;
  const NoiseRow row = run_noise_experiment(setup, 0.1);
  const double s2 = setup.sigma * setup.sigma;
  EXPECT_NEAR(row.classic_variance, s2 / 0.01, 0.25 * s2 / 0.01);
  EXPECT_LE(row.fused_variance, 2.0 * s2);
}

TEST(NoiseGain, ReciprocalOfClampedT) {
  const TransmissionMap t = random_t(9, 9, 170, 0.0, 1.0);
  const Image g = noise_gain(t, 0.1);
  for (std::size_t i = 0; i < g.samples().size(); ++i) {
    EXPECT_DOUBLE_EQ(g.samples()[i], 1.0 / std::max(t.values.samples()[i], 0.1));
  }
  for (const Image v = noise_gain(TransmissionMap::constant(3, 3, 1.0), 0.1); double s : v.samples()) EXPECT_EQ(s, 1.0);
  for (const Image v = noise_gain(TransmissionMap::constant(3, 3, 0.05), 0.1); double s : v.samples()) EXPECT_DOUBLE_EQ(s, 10.0);
  for (const Image v = noise_amplification_map(TransmissionMap::constant(3, 3, 1.0), 0.1); double s : v.samples()) {
    EXPECT_DOUBLE_EQ(s, 0.1);
  }
}
