#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dehaze/airlight.hpp"
#include "dehaze/bilateral_grid.hpp"
#include "dehaze/recovery.hpp"
#include "dehaze/training.hpp"
#include "dehaze/transmission_prior.hpp"
#include "dehaze/wgif.hpp"

namespace dehaze {

/// Every tunable of the pipeline in one flat record. Field names double as
/// configuration-file keys and, with '_' replaced by '-', as CLI flags.
struct PipelineConfig {
  int radius = WgifParams{}.radius;
  double lambda = WgifParams{}.lambda;
  double eps = WgifParams{}.epsilon;
  double omega = 0.95;
  int patch_radius = 7;
  double eta = 4.0;
  double t0 = 0.1;
  double t_floor = kDefaultTFloor;
  int min_block = 16;
  double wc = kDefaultColorWeight;
  double lr = 1e-3;
  int steps = 1000;
  std::uint64_t seed = 1;
  int batch = 1;
  int grid_x = 16;
  int grid_y = 16;
  int grid_d = 8;
  int levels = 4;

  void validate() const;

  WgifParams wgif() const;
  PriorParams prior() const;
  RecoveryParams recovery() const;
  AirlightParams airlight() const;
  GridShape grid() const;
  TrainConfig training() const;
};

/// Names of all recognised configuration keys.
std::vector<std::string> config_keys();

/// Parses and stores one value; throws ArgumentError for unknown keys or
/// unparsable values.
void set_config_value(PipelineConfig& cfg, std::string_view key, std::string_view value);

/// Current value of `key` in a form set_config_value() accepts.
std::string get_config_value(const PipelineConfig& cfg, std::string_view key);

/// Parses `key = value` lines; blank lines and '#' comments are ignored.
/// Unknown keys and malformed lines raise ArgumentError.
std::map<std::string, std::string> parse_config_text(std::string_view text);
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

/// Applies file values to `cfg`, skipping keys in `explicitly_set` so that
/// command-line flags take precedence over the file and the file over
/// built-in defaults. Validates the result.
void apply_config(PipelineConfig& cfg, const std::map<std::string, std::string>& values,
                  const std::set<std::string>& explicitly_set);

}  // namespace dehaze
