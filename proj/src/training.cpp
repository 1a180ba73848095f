#include "dehaze/training.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dehaze/errors.hpp"

namespace dehaze {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ArgumentError("train: learning rate must be > 0");
  if (steps < 0) throw ArgumentError("train: steps must be >= 0");
  if (!(color_weight >= 0.0)) throw ArgumentError("train: colour weight must be >= 0");
  if (batch < 1) throw ArgumentError("train: batch must be >= 1");
  if (!(t_floor > 0.0 && t_floor < 1.0)) throw ArgumentError("train: t_floor must lie in (0, 1)");
  wgif.validate();
  recovery.validate();
}

PreparedSample prepare_sample(const TrainingPair& pair, const GridShape& shape, const TrainConfig& cfg) {
  if (pair.hazy.channels() != 3) throw ShapeError("training pair: hazy image must be RGB");
  require_same_shape(pair.hazy, pair.clean, "training pair");
  PreparedSample s;
  s.clean = pair.clean;
  s.layers = decompose(pair.hazy, cfg.wgif);
  s.airlight = estimate_airlight(s.layers.base, cfg.airlight).airlight;
  s.lowres = resize(s.layers.base, shape.input_width(), shape.input_height());
  s.guidance = clamp01(luminance(s.layers.base));
  return s;
}

LossBreakdown loss_and_gradient(const BilateralGridModel& model, const PreparedSample& sample,
                                const TrainConfig& cfg, std::span<double> grad, KinkPattern* pattern) {
  const bool want_grad = !grad.empty();
  ForwardCache cache;
  const AffineGrid grid = predict_grid(model, sample.lowres, want_grad || pattern != nullptr ? &cache : nullptr);
  const Image t_raw = slice_raw(grid, sample.guidance);

  const Image& zb = sample.layers.base;
  const Image& ze = sample.layers.detail;
  const std::size_t n = t_raw.plane_size();
  Image recovered(zb.width(), zb.height(), zb.channels());
  Image d_dt(zb.width(), zb.height(), zb.channels());
  auto tr = t_raw.plane(0);
  for (int c = 0; c < zb.channels(); ++c) {
    auto b = zb.plane(c);
    auto e = ze.plane(c);
    auto out = recovered.plane(c);
    auto dd = d_dt.plane(c);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = std::clamp(tr[i], cfg.t_floor, 1.0);
      const FusedSample fs = fused_sample(b[i], e[i], sample.airlight[c], t, cfg.recovery);
      out[i] = fs.value;
      dd[i] = fs.d_dt;
    }
  }

  const TotalLoss loss = total_loss(recovered, sample.clean, cfg.color_weight, cfg.kernel);
  LossBreakdown result{loss.value, loss.restoration, loss.color};

  if (pattern != nullptr) {
    pattern->clear();
    for (const FeatureMap& z : cache.pre_activations) {
      for (double v : z.data) pattern->push_back(v > 0.0 ? 1 : 0);
    }
    for (double v : tr) {
      const std::uint8_t clamp_state = v < cfg.t_floor ? 0 : (v > 1.0 ? 2 : 1);
      const double t = std::clamp(v, cfg.t_floor, 1.0);
      pattern->push_back(static_cast<std::uint8_t>(clamp_state | (t > cfg.recovery.t0 ? 4 : 0)));
    }
  }
  if (!want_grad) return result;

  if (grad.size() != model.parameter_count()) throw ShapeError("loss_and_gradient: gradient size mismatch");
  Image grad_t(t_raw.width(), t_raw.height(), 1);
  auto gt = grad_t.plane(0);
  for (int c = 0; c < zb.channels(); ++c) {
    auto gi = loss.gradient.plane(c);
    auto dd = d_dt.plane(c);
    for (std::size_t i = 0; i < n; ++i) gt[i] += gi[i] * dd[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (tr[i] < cfg.t_floor || tr[i] > 1.0) gt[i] = 0.0;
  }
  AffineGrid grad_grid(grid.grid_x, grid.grid_y, grid.grid_d);
  slice_backward(sample.guidance, grad_t, grad_grid);
  std::fill(grad.begin(), grad.end(), 0.0);
  backpropagate_grid(model, cache, grad_grid, grad);
  return result;
}

AdamOptimizer::AdamOptimizer(std::size_t size, double learning_rate, double beta1, double beta2, double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), epsilon_(epsilon), m_(size, 0.0), v_(size, 0.0) {}

void AdamOptimizer::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) throw ShapeError("adam: size mismatch");
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    params[i] -= lr_ * m_hat / (std::sqrt(v_hat) + epsilon_);
  }
}

TrainResult train_prepared(BilateralGridModel model, std::span<const PreparedSample> samples,
                           const TrainConfig& cfg) {
  cfg.validate();
  if (samples.empty()) throw ArgumentError("train: dataset is empty");
  TrainResult result{std::move(model), {}, {}, {}};
  const std::size_t count = result.model.parameter_count();
  AdamOptimizer adam(count, cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_epsilon);
  std::vector<double> grad(count);
  std::vector<double> batch_grad(count);
  const double inv_batch = 1.0 / cfg.batch;

  for (int step = 0; step < cfg.steps; ++step) {
    std::fill(batch_grad.begin(), batch_grad.end(), 0.0);
    LossBreakdown mean;
    for (int b = 0; b < cfg.batch; ++b) {
      const std::size_t idx =
          (static_cast<std::size_t>(step) * static_cast<std::size_t>(cfg.batch) + static_cast<std::size_t>(b)) %
          samples.size();
      const LossBreakdown l = loss_and_gradient(result.model, samples[idx], cfg, grad);
      mean.value += l.value * inv_batch;
      mean.restoration += l.restoration * inv_batch;
      mean.color += l.color * inv_batch;
      for (std::size_t i = 0; i < count; ++i) batch_grad[i] += grad[i] * inv_batch;
    }
    if (!std::isfinite(mean.value)) {
      std::ostringstream msg;
      msg << "train: non-finite loss " << mean.value << " at step " << step;
      throw NumericError(msg.str());
    }
    result.loss_trace.push_back(mean.value);
    result.restoration_trace.push_back(mean.restoration);
    result.color_trace.push_back(mean.color);
    adam.step(result.model.parameters(), batch_grad);
  }
  return result;
}

TrainResult train(BilateralGridModel model, std::span<const TrainingPair> data, const TrainConfig& cfg) {
  cfg.validate();
  if (data.empty()) throw ArgumentError("train: dataset is empty");
  std::vector<PreparedSample> samples;
  samples.reserve(data.size());
  for (const TrainingPair& pair : data) samples.push_back(prepare_sample(pair, model.shape(), cfg));
  return train_prepared(std::move(model), samples, cfg);
}

}  // namespace dehaze
