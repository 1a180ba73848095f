#pragma once

#include <cstdint>
#include <vector>

#include "dehaze/airlight.hpp"
#include "dehaze/recovery.hpp"
#include "dehaze/wgif.hpp"

namespace dehaze {

/// Flat-scene noise experiment: a constant clean image is hazed with a
/// constant transmission, Gaussian noise is added, and the scene is
/// recovered with the true t and A both classically and with the gated
/// fusion. Variances are measured on the unclamped outputs and averaged
/// over seeds.
struct NoiseExperiment {
  int size = 64;
  double clean_value = 0.5;
  Airlight airlight{{0.8, 0.8, 0.8}};
  double sigma = 0.02;
  int seeds = 20;
  std::uint64_t first_seed = 1;
  WgifParams wgif{};
  RecoveryParams recovery{};
};

struct NoiseRow {
  double t = 0.0;
  double input_variance = 0.0;    // measured on the noisy hazy image
  double classic_variance = 0.0;
  double fused_variance = 0.0;
  double predicted_classic = 0.0; // sigma^2 / max(t, t0)^2
};

NoiseRow run_noise_experiment(const NoiseExperiment& setup, double t);

std::vector<NoiseRow> run_noise_experiment(const NoiseExperiment& setup, const std::vector<double>& ts);

/// Sample variance (divisor n - 1) of every sample of a single-channel or
/// RGB image, channels pooled after removing each channel's own mean.
double pooled_variance(const Image& img);

}  // namespace dehaze
