#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dehaze/airlight.hpp"
#include "dehaze/bilateral_grid.hpp"
#include "dehaze/losses.hpp"
#include "dehaze/recovery.hpp"
#include "dehaze/synthesis.hpp"
#include "dehaze/wgif.hpp"

namespace dehaze {

struct TrainConfig {
  double learning_rate = 1e-3;
  int steps = 1000;
  double color_weight = kDefaultColorWeight;
  std::uint64_t seed = 1;
  int batch = 1;

  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;

  double t_floor = kDefaultTFloor;
  WgifParams wgif{};
  AirlightParams airlight{};
  RecoveryParams recovery{};
  GaussianKernel kernel{};

  void validate() const;
};

struct TrainingPair {
  Image hazy;
  Image clean;
  std::optional<DepthMap> depth;  // carried for bookkeeping; supervision is image-only
};

/// The model-independent part of a training pair, computed once.
struct PreparedSample {
  Image clean;
  LayerPair layers;
  Airlight airlight;
  Image lowres;
  Image guidance;
};

PreparedSample prepare_sample(const TrainingPair& pair, const GridShape& shape, const TrainConfig& cfg);

struct LossBreakdown {
  double value = 0.0;
  double restoration = 0.0;
  double color = 0.0;
};

/// Piecewise-linear state of one evaluation: ReLU signs, clamp states of t
/// and the max(t, t0) branch. Two evaluations with equal patterns lie on the
/// same smooth piece of the loss.
using KinkPattern = std::vector<std::uint8_t>;

/// Forward pass through prediction, slicing, fused recovery (unclamped
/// output) and the total loss. When `grad` is non-empty it receives
/// dL/dparams (overwritten). Gradients stop at the transmission clamp.
LossBreakdown loss_and_gradient(const BilateralGridModel& model, const PreparedSample& sample,
                                const TrainConfig& cfg, std::span<double> grad = {},
                                KinkPattern* pattern = nullptr);

/// Adam with bias correction.
class AdamOptimizer {
 public:
  AdamOptimizer(std::size_t size, double learning_rate, double beta1, double beta2, double epsilon);

  void step(std::span<double> params, std::span<const double> grad);
  long steps_taken() const noexcept { return t_; }

 private:
  double lr_;
  double beta1_;
  double beta2_;
  double epsilon_;
  long t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

struct TrainResult {
  BilateralGridModel model;
  std::vector<double> loss_trace;         // batch-mean total loss before each update
  std::vector<double> restoration_trace;
  std::vector<double> color_trace;
};

/// Minimises the batch-mean total loss with Adam. Pairs are visited
/// cyclically in the given order; step s uses pairs s*batch .. s*batch+batch-1
/// (mod N). Throws ArgumentError for an empty dataset and NumericError if the
/// loss becomes non-finite.
TrainResult train(BilateralGridModel model, std::span<const TrainingPair> data, const TrainConfig& cfg);

/// Same as train() on samples that were already prepared.
TrainResult train_prepared(BilateralGridModel model, std::span<const PreparedSample> samples,
                           const TrainConfig& cfg);

}  // namespace dehaze
