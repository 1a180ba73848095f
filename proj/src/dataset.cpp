#include "dehaze/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>

#include "dehaze/errors.hpp"
#include "dehaze/image_io.hpp"
#include "dehaze/random.hpp"

namespace dehaze {
namespace {

namespace fs = std::filesystem;

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::ranges::transform(ext, ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".ppm" || ext == ".pgm" || ext == ".pfm";
}

std::map<std::string, fs::path> images_by_stem(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("'" + dir.string() + "' is not a directory");
  std::map<std::string, fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_image_file(entry.path())) {
      out.emplace(entry.path().stem().string(), entry.path());
    }
  }
  return out;
}

}  // namespace

PairListing match_directories(const fs::path& first_dir, const fs::path& second_dir) {
  const auto first = images_by_stem(first_dir);
  const auto second = images_by_stem(second_dir);
  PairListing listing;
  std::set<std::string> stems;
  for (const auto& [stem, _] : first) stems.insert(stem);
  for (const auto& [stem, _] : second) stems.insert(stem);
  for (const std::string& stem : stems) {
    const auto a = first.find(stem);
    const auto b = second.find(stem);
    if (a == first.end() || b == second.end()) {
      listing.unmatched.push_back(stem);
    } else {
      listing.pairs.push_back({stem, a->second, b->second});
    }
  }
  return listing;
}

PairListing match_pairs(const fs::path& root, std::string_view first_dir, std::string_view second_dir) {
  return match_directories(root / first_dir, root / second_dir);
}

std::vector<TrainingPair> load_training_pairs(const fs::path& root) {
  std::vector<TrainingPair> pairs;
  for (const PairFiles& f : match_pairs(root).pairs) {
    TrainingPair p;
    p.hazy = load_image(f.first);
    p.clean = load_image(f.second);
    require_same_shape(p.hazy, p.clean, "training pair '" + f.stem + "'");
    pairs.push_back(std::move(p));
  }
  return pairs;
}

Image center_crop_resize(const Image& img, int crop_side, int down) {
  if (crop_side < 1 || down < 1) throw ArgumentError("center_crop_resize: sizes must be >= 1");
  const int side = std::min({crop_side, img.width(), img.height()});
  const Image square = crop(img, (img.width() - side) / 2, (img.height() - side) / 2, side, side);
  return resize(square, down, down);
}

PrepareReport prepare_dataset(const fs::path& src, const fs::path& dst, const PrepareOptions& options) {
  const PairListing listing = match_pairs(src);
  fs::create_directories(dst / "hazy");
  fs::create_directories(dst / "clean");
  PrepareReport report;
  report.unmatched = listing.unmatched;
  for (const PairFiles& f : listing.pairs) {
    const Image hazy = center_crop_resize(load_image(f.first), options.crop, options.down);
    const Image clean = center_crop_resize(load_image(f.second), options.crop, options.down);
    save_image(hazy, dst / "hazy" / (f.stem + ".png"));
    save_image(clean, dst / "clean" / (f.stem + ".png"));
    ++report.pairs_written;
    if (options.mirror) {
      save_image(mirror_horizontal(hazy), dst / "hazy" / (f.stem + "_m.png"));
      save_image(mirror_horizontal(clean), dst / "clean" / (f.stem + "_m.png"));
      ++report.pairs_written;
    }
  }
  return report;
}

std::vector<SynthesisRecord> synthesize_dataset(const fs::path& clean_dir, const fs::path& depth_dir,
                                                const fs::path& out, const SynthesisOptions& options,
                                                std::vector<std::string>* unmatched) {
  if (options.beta && !(*options.beta > 0.0)) throw ArgumentError("synthesize: beta must be > 0");
  if (!(options.noise_sigma >= 0.0)) throw ArgumentError("synthesize: noise sigma must be >= 0");
  const PairListing listing = match_directories(clean_dir, depth_dir);
  if (unmatched != nullptr) *unmatched = listing.unmatched;
  fs::create_directories(out / "hazy");
  fs::create_directories(out / "clean");
  Rng rng(options.seed);
  std::vector<SynthesisRecord> records;
  for (const PairFiles& f : listing.pairs) {
    SynthesisRecord rec;
    rec.stem = f.stem;
    // Draw every parameter even when overridden so the stream, and thus the
    // other images, does not depend on which options were given.
    const double beta = rng.uniform(0.5, 2.5);
    Airlight a;
    for (double& v : a.rgb) v = rng.uniform(0.7, 1.0);
    const std::uint64_t noise_seed = static_cast<std::uint64_t>(rng.uniform() * 0x1.0p53);
    rec.beta = options.beta.value_or(beta);
    rec.airlight = options.airlight.value_or(a);

    Image clean = load_image(f.first);
    if (clean.channels() != 3) throw ShapeError("synthesize: '" + f.first.string() + "' is not RGB");
    const DepthMap depth = load_depth(f.second);
    require_same_size(clean, depth.depth, "synthesize '" + f.stem + "'");
    const TransmissionMap t = t_from_depth(depth, rec.beta, options.t_floor);
    const Image hazy = add_noise(apply_haze(clean, t, rec.airlight), options.noise_sigma, noise_seed);
    save_image(hazy, out / "hazy" / (f.stem + ".png"));
    save_image(clean, out / "clean" / (f.stem + ".png"));
    records.push_back(rec);
  }
  std::ofstream csv(out / "params.csv");
  if (!csv) throw IoError("cannot write '" + (out / "params.csv").string() + "'");
  csv << "name,beta,airlight_r,airlight_g,airlight_b\n";
  csv.precision(17);
  for (const SynthesisRecord& r : records) {
    csv << r.stem << ',' << r.beta << ',' << r.airlight[0] << ',' << r.airlight[1] << ',' << r.airlight[2] << '\n';
  }
  return records;
}

}  // namespace dehaze
