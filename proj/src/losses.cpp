#include "dehaze/losses.hpp"

#include <cmath>
#include <numeric>

#include "dehaze/errors.hpp"
#include "dehaze/filters.hpp"

namespace dehaze {

double GaussianKernel::value(int k, int l) const {
  const double dx = k - mu_x;
  const double dy = l - mu_y;
  return amplitude * std::exp(-dx * dx / (2.0 * sigma_x) - dy * dy / (2.0 * sigma_y));
}

std::vector<double> GaussianKernel::taps_x() const {
  std::vector<double> taps;
  for (int k = -radius; k <= radius; ++k) {
    const double dx = k - mu_x;
    taps.push_back(amplitude * std::exp(-dx * dx / (2.0 * sigma_x)));
  }
  return taps;
}

std::vector<double> GaussianKernel::taps_y() const {
  std::vector<double> taps;
  for (int l = -radius; l <= radius; ++l) {
    const double dy = l - mu_y;
    taps.push_back(std::exp(-dy * dy / (2.0 * sigma_y)));
  }
  return taps;
}

double GaussianKernel::sum() const {
  const auto tx = taps_x();
  const auto ty = taps_y();
  return std::accumulate(tx.begin(), tx.end(), 0.0) * std::accumulate(ty.begin(), ty.end(), 0.0);
}

LossValue restoration_loss(const Image& pred, const Image& truth) {
  require_same_shape(pred, truth, "restoration_loss");
  LossValue loss;
  loss.gradient = Image(pred.width(), pred.height(), pred.channels());
  auto p = pred.samples();
  auto t = truth.samples();
  auto g = loss.gradient.samples();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double diff = t[i] - p[i];
    loss.value += diff * diff;
    g[i] = -2.0 * diff;
  }
  return loss;
}

Image gaussian_blur(const Image& img, const GaussianKernel& kernel) {
  return separable_filter(img, kernel.taps_x(), kernel.taps_y());
}

Image gaussian_blur_adjoint(const Image& img, const GaussianKernel& kernel) {
  return separable_filter_adjoint(img, kernel.taps_x(), kernel.taps_y());
}

LossValue color_loss(const Image& pred, const Image& truth, const GaussianKernel& kernel) {
  require_same_shape(pred, truth, "color_loss");
  if (pred.channels() != 3) throw ShapeError("color_loss: expected RGB images");
  const Image bp = gaussian_blur(pred, kernel);
  const Image bt = gaussian_blur(truth, kernel);

  LossValue loss;
  Image grad_blurred(pred.width(), pred.height(), 3);
  const std::size_t n = pred.plane_size();
  for (std::size_t i = 0; i < n; ++i) {
    double u[3];
    double v[3];
    for (int c = 0; c < 3; ++c) {
      u[c] = bp.plane(c)[i];
      v[c] = bt.plane(c)[i];
    }
    const double nu = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
    const double nv = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (nu < kMinColorNorm || nv < kMinColorNorm) continue;

    const double cx = u[1] * v[2] - u[2] * v[1];
    const double cy = u[2] * v[0] - u[0] * v[2];
    const double cz = u[0] * v[1] - u[1] * v[0];
    const double dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    // atan2 of |u x v| and u.v is exact at 0 and pi, unlike acos of the cosine.
    loss.value += std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot);

    // d angle / d u = -(v_hat - cos * u_hat) / (|u| sin); the numerator is
    // the component of v_hat orthogonal to u, whose norm is sin.
    const double cos_angle = dot / (nu * nv);
    double perp[3];
    double perp_norm_sq = 0.0;
    for (int c = 0; c < 3; ++c) {
      perp[c] = v[c] / nv - cos_angle * u[c] / nu;
      perp_norm_sq += perp[c] * perp[c];
    }
    const double perp_norm = std::sqrt(perp_norm_sq);
    if (perp_norm < 1e-12) continue;  // parallel or antiparallel: zero subgradient
    for (int c = 0; c < 3; ++c) grad_blurred.plane(c)[i] = -perp[c] / (nu * perp_norm);
  }
  loss.gradient = gaussian_blur_adjoint(grad_blurred, kernel);
  return loss;
}

TotalLoss total_loss(const Image& pred, const Image& truth, double color_weight,
                     const GaussianKernel& kernel) {
  if (!(color_weight >= 0.0)) throw ArgumentError("total_loss: colour weight must be >= 0");
  LossValue lr = restoration_loss(pred, truth);
  TotalLoss out;
  out.restoration = lr.value;
  out.gradient = std::move(lr.gradient);
  if (pred.channels() == 3) {
    const LossValue lc = color_loss(pred, truth, kernel);
    out.color = lc.value;
    auto g = out.gradient.samples();
    auto gc = lc.gradient.samples();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += color_weight * gc[i];
  }
  out.value = out.restoration + color_weight * out.color;
  return out;
}

}  // namespace dehaze
