#include "dehaze/noise_analysis.hpp"

#include <algorithm>

#include "dehaze/errors.hpp"
#include "dehaze/synthesis.hpp"

namespace dehaze {

double pooled_variance(const Image& img) {
  const std::size_t n = img.plane_size();
  if (n < 2) throw ArgumentError("pooled_variance: need at least two samples per channel");
  double ss = 0.0;
  for (int c = 0; c < img.channels(); ++c) {
    auto p = img.plane(c);
    double mean = 0.0;
    for (double v : p) mean += v;
    mean /= static_cast<double>(n);
    for (double v : p) ss += (v - mean) * (v - mean);
  }
  return ss / static_cast<double>(img.channels() * (n - 1));
}

NoiseRow run_noise_experiment(const NoiseExperiment& setup, double t) {
  if (setup.seeds < 1 || setup.size < 2) throw ArgumentError("noise experiment: need seeds >= 1 and size >= 2");
  const Image clean(setup.size, setup.size, 3, setup.clean_value);
  const TransmissionMap tm = TransmissionMap::constant(setup.size, setup.size, t);
  const Image hazy = apply_haze(clean, tm, setup.airlight);
  RecoveryParams rp = setup.recovery;
  rp.clamp_output = false;

  NoiseRow row;
  row.t = t;
  const double denom = std::max(t, rp.t0);
  row.predicted_classic = setup.sigma * setup.sigma / (denom * denom);
  for (int s = 0; s < setup.seeds; ++s) {
    const Image noisy = add_noise(hazy, setup.sigma, setup.first_seed + static_cast<std::uint64_t>(s));
    row.input_variance += pooled_variance(noisy);
    row.classic_variance += pooled_variance(recover_classic(noisy, tm, setup.airlight, rp.t0, false));
    row.fused_variance += pooled_variance(recover_fused(decompose(noisy, setup.wgif), tm, setup.airlight, rp));
  }
  const double inv = 1.0 / setup.seeds;
  row.input_variance *= inv;
  row.classic_variance *= inv;
  row.fused_variance *= inv;
  return row;
}

std::vector<NoiseRow> run_noise_experiment(const NoiseExperiment& setup, const std::vector<double>& ts) {
  std::vector<NoiseRow> rows;
  rows.reserve(ts.size());
  for (double t : ts) rows.push_back(run_noise_experiment(setup, t));
  return rows;
}

}  // namespace dehaze
