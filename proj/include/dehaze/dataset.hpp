#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dehaze/airlight.hpp"
#include "dehaze/image.hpp"
#include "dehaze/synthesis.hpp"
#include "dehaze/training.hpp"

namespace dehaze {

struct PairFiles {
  std::string stem;
  std::filesystem::path first;
  std::filesystem::path second;
};

struct PairListing {
  std::vector<PairFiles> pairs;         // sorted by stem
  std::vector<std::string> unmatched;   // stems present in only one directory
};

/// Matches image files of two directories by stem.
PairListing match_directories(const std::filesystem::path& first, const std::filesystem::path& second);

/// Matches image files in `root/first_dir` and `root/second_dir` by stem.
PairListing match_pairs(const std::filesystem::path& root, std::string_view first_dir = "hazy",
                        std::string_view second_dir = "clean");

/// Loads every matched hazy/clean pair under `root`.
std::vector<TrainingPair> load_training_pairs(const std::filesystem::path& root);

/// Largest centred square of side min(crop, width, height), resized to
/// down x down.
Image center_crop_resize(const Image& img, int crop_side, int down);

struct PrepareOptions {
  int crop = 480;
  int down = 256;
  bool mirror = false;
};

struct PrepareReport {
  std::size_t pairs_written = 0;
  std::vector<std::string> unmatched;
};

/// Crops and downsamples every matched pair of `src` into `dst/hazy` and
/// `dst/clean`; with `mirror`, also writes a horizontally flipped copy under
/// the stem suffix "_m". Unmatched stems are reported and skipped.
PrepareReport prepare_dataset(const std::filesystem::path& src, const std::filesystem::path& dst,
                              const PrepareOptions& options);

struct SynthesisOptions {
  std::optional<double> beta;                 // sampled from U[0.5, 2.5] when unset
  std::optional<Airlight> airlight;           // sampled from U[0.7, 1]^3 when unset
  double noise_sigma = 0.0;
  std::uint64_t seed = 1;
  double t_floor = kDefaultTFloor;
};

struct SynthesisRecord {
  std::string stem;
  double beta = 0.0;
  Airlight airlight;
};

/// Hazes every clean image of `clean_dir` with the depth map of the same
/// stem in `depth_dir` and writes `out/hazy` and `out/clean`. Parameters are
/// drawn per image, in stem order, from one generator seeded with
/// `options.seed`; the records (also written to `out/params.csv`) list what
/// was used.
std::vector<SynthesisRecord> synthesize_dataset(const std::filesystem::path& clean_dir,
                                                const std::filesystem::path& depth_dir,
                                                const std::filesystem::path& out,
                                                const SynthesisOptions& options,
                                                std::vector<std::string>* unmatched = nullptr);

}  // namespace dehaze
