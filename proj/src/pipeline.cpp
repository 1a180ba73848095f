#include "dehaze/pipeline.hpp"

#include "dehaze/errors.hpp"
#include "dehaze/recovery.hpp"
#include "dehaze/transmission_prior.hpp"

namespace dehaze {

DehazeResult dehaze_image(const Image& hazy, const PipelineConfig& cfg, const BilateralGridModel* model,
                          bool classic) {
  if (hazy.channels() != 3) throw ShapeError("dehaze: expected an RGB image");
  cfg.validate();
  DehazeResult r;
  r.layers = decompose(hazy, cfg.wgif());
  r.airlight = estimate_airlight(r.layers.base, cfg.airlight()).airlight;
  r.transmission = model != nullptr ? estimate_t_learned(*model, r.layers.base, cfg.t_floor)
                                    : estimate_t_prior(r.layers.base, r.airlight, cfg.prior());
  r.image = classic ? recover_classic(hazy, r.transmission, r.airlight, cfg.t0)
                    : recover_fused(r.layers, r.transmission, r.airlight, cfg.recovery());
  return r;
}

}  // namespace dehaze
