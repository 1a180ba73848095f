// Command-line front end. Exit codes: 0 success, 1 processing failure,
// 2 usage error.

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dehaze/airlight.hpp"
#include "dehaze/bilateral_grid.hpp"
#include "dehaze/config.hpp"
#include "dehaze/dataset.hpp"
#include "dehaze/errors.hpp"
#include "dehaze/image_io.hpp"
#include "dehaze/losses.hpp"
#include "dehaze/metrics.hpp"
#include "dehaze/noise_analysis.hpp"
#include "dehaze/pipeline.hpp"
#include "dehaze/recovery.hpp"
#include "dehaze/training.hpp"
#include "dehaze/transmission_prior.hpp"
#include "dehaze/wgif.hpp"

namespace fs = std::filesystem;
using namespace dehaze;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::map<std::string, std::string>& key_help() {
  static const std::map<std::string, std::string> help = {
      {"radius", "WGIF window radius"},
      {"lambda", "WGIF regularisation"},
      {"eps", "edge-weight epsilon"},
      {"omega", "haze retention factor of the dark-channel prior"},
      {"patch_radius", "dark-channel patch radius"},
      {"eta", "gate constant; the gate opens at t = 1/eta"},
      {"t0", "lower bound of t in the recovery division"},
      {"t_floor", "lower clamp of estimated transmission"},
      {"min_block", "smallest quad-tree block side for airlight search"},
      {"wc", "colour-loss weight"},
      {"lr", "Adam learning rate"},
      {"steps", "training steps"},
      {"seed", "random seed"},
      {"batch", "pairs per training step"},
      {"grid_x", "bilateral grid width"},
      {"grid_y", "bilateral grid height"},
      {"grid_d", "bilateral grid depth (guidance bins)"},
      {"levels", "stride-2 convolution levels"},
  };
  return help;
}

std::string flag_name(std::string key) {
  std::ranges::replace(key, '_', '-');
  return "--" + key;
}

// Binds a subset of PipelineConfig keys to flags of one subcommand plus a
// --config option. Values stay strings until resolve() so flags, file and
// defaults all go through the same parser.
class ConfigOptions {
 public:
  ConfigOptions(CLI::App* app, std::initializer_list<std::string> keys) {
    app->add_option("--config", config_path_, "key=value configuration file")->check(CLI::ExistingFile);
    const PipelineConfig defaults;
    for (const std::string& key : keys) {
      CLI::Option* opt = app->add_option(flag_name(key), values_[key], key_help().at(key));
      opt->default_str(get_config_value(defaults, key));
      options_[key] = opt;
    }
  }

  PipelineConfig resolve() const {
    try {
      PipelineConfig cfg;
      std::set<std::string> explicit_keys;
      for (const auto& [key, opt] : options_) {
        if (opt->count() > 0) {
          set_config_value(cfg, key, values_.at(key));
          explicit_keys.insert(key);
        }
      }
      std::map<std::string, std::string> file_values;
      if (!config_path_.empty()) file_values = read_config_file(config_path_);
      apply_config(cfg, file_values, explicit_keys);
      return cfg;
    } catch (const ArgumentError& e) {
      throw UsageError(e.what());
    }
  }

 private:
  std::string config_path_;
  std::map<std::string, std::string> values_;
  std::map<std::string, CLI::Option*> options_;
};

Image to_rgb(const Image& img) {
  if (img.channels() == 3) return img;
  Image out(img.width(), img.height(), 3);
  for (int c = 0; c < 3; ++c) std::ranges::copy(img.plane(0), out.plane(c).begin());
  return out;
}

std::string format_airlight(const Airlight& a) {
  std::ostringstream out;
  out.precision(6);
  out << "A = (" << a[0] << ", " << a[1] << ", " << a[2] << ")";
  return out.str();
}

Airlight parse_airlight(const std::string& text) {
  std::vector<double> v;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("--airlight: cannot parse '" + text + "'");
    }
  }
  if (v.size() == 1) v.assign(3, v[0]);
  if (v.size() != 3) throw UsageError("--airlight expects one value or r,g,b");
  for (double x : v) {
    if (!(x > 0.0 && x <= 1.0)) throw UsageError("--airlight values must lie in (0, 1]");
  }
  return Airlight{{v[0], v[1], v[2]}};
}

// ---------------------------------------------------------------- dehaze

struct DehazeArgs {
  std::string input;
  std::string estimator = "prior";
  std::string model;
  std::string output;
  std::string dump_t;
  std::string dump_gain;
  bool classic = false;
};

void run_dehaze(const DehazeArgs& args, const PipelineConfig& cfg) {
  if (args.estimator == "learned" && args.model.empty()) {
    throw UsageError("--estimator learned requires --model");
  }
  const Image hazy = to_rgb(load_image(args.input));
  std::optional<BilateralGridModel> model;
  if (args.estimator == "learned") model = load_model(args.model);
  const DehazeResult r = dehaze_image(hazy, cfg, model ? &*model : nullptr, args.classic);
  const Image& out = r.image;
  const TransmissionMap& t = r.transmission;
  fs::path target = args.output;
  if (target.empty()) {
    const fs::path in(args.input);
    target = in.parent_path() / (in.stem().string() + "_dehazed.png");
  }
  save_image(out, target);
  if (!args.dump_t.empty()) save_image(t.values, args.dump_t);
  if (!args.dump_gain.empty()) save_image(noise_amplification_map(t, cfg.t0), args.dump_gain);
}

// ------------------------------------------------------------- decompose

void run_decompose(const std::string& input, const std::string& out_dir, const PipelineConfig& cfg) {
  const Image img = load_image(input);
  const LayerPair layers = decompose(img, cfg.wgif());
  Image shown = layers.detail;
  for (double& s : shown.samples()) s = 0.5 + 0.5 * s;
  const std::string stem = fs::path(input).stem().string();
  const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
  fs::create_directories(dir);
  save_image(layers.base, dir / (stem + "_base.png"));
  save_image(shown, dir / (stem + "_detail.png"));
}

// -------------------------------------------------------------- airlight

void run_airlight(const std::string& input, const std::string& debug, const PipelineConfig& cfg) {
  const Image img = to_rgb(load_image(input));
  const LayerPair layers = decompose(img, cfg.wgif());
  const AirlightEstimate est = estimate_airlight(layers.base, cfg.airlight());
  std::cout << format_airlight(est.airlight) << "\n";
  if (!debug.empty()) save_image(draw_airlight_path(img, est), debug);
}

// ------------------------------------------------------------ synthesize

struct SynthesizeArgs {
  std::string clean;
  std::string depth;
  std::optional<double> beta;
  std::string airlight;
  double noise_sigma = 0.0;
  std::string out;
};

void run_synthesize(const SynthesizeArgs& args, const PipelineConfig& cfg) {
  SynthesisOptions opt;
  opt.beta = args.beta;
  if (!args.airlight.empty()) opt.airlight = parse_airlight(args.airlight);
  opt.noise_sigma = args.noise_sigma;
  opt.seed = cfg.seed;
  opt.t_floor = cfg.t_floor;
  std::vector<std::string> unmatched;
  const auto records = synthesize_dataset(args.clean, args.depth, args.out, opt, &unmatched);
  for (const std::string& stem : unmatched) std::cerr << "warning: no clean/depth match for '" << stem << "'\n";
  std::cout << "synthesized " << records.size() << " pairs into " << args.out << "\n";
}

// ----------------------------------------------------------------- train

void run_train(const std::string& data, const std::string& out, const std::string& log,
               const PipelineConfig& cfg) {
  const std::vector<TrainingPair> pairs = load_training_pairs(data);
  if (pairs.empty()) throw IoError("no matched hazy/clean pairs under '" + data + "'");
  const BilateralGridModel init = BilateralGridModel::initialized(cfg.grid(), cfg.seed);
  const TrainResult result = train(init, pairs, cfg.training());
  save_model(result.model, out);
  if (!log.empty()) {
    std::ofstream csv(log);
    if (!csv) throw IoError("cannot write '" + log + "'");
    csv.precision(17);
    csv << "step,loss,restoration,color\n";
    for (std::size_t i = 0; i < result.loss_trace.size(); ++i) {
      csv << i << ',' << result.loss_trace[i] << ',' << result.restoration_trace[i] << ','
          << result.color_trace[i] << '\n';
    }
  }
  if (!result.loss_trace.empty()) {
    std::cout << "trained " << result.loss_trace.size() << " steps: loss " << result.loss_trace.front() << " -> "
              << result.loss_trace.back() << "\n";
  }
}

// -------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string pairs;
  std::string pred_subdir = "hazy";
  std::string truth_subdir = "clean";
  std::vector<std::string> loss;
};

void run_evaluate(const EvaluateArgs& args, const PipelineConfig& cfg) {
  if (args.pairs.empty() == args.loss.empty()) throw UsageError("evaluate needs exactly one of --pairs or --loss");
  std::cout.precision(10);
  if (!args.loss.empty()) {
    const Image pred = load_image(args.loss[0]);
    const Image truth = load_image(args.loss[1]);
    const TotalLoss l = total_loss(pred, truth, cfg.wc);
    std::cout << "L_r = " << l.restoration << "\nL_c = " << l.color << "\nL = " << l.value << "\n";
    return;
  }
  const PairListing listing = match_pairs(args.pairs, args.pred_subdir, args.truth_subdir);
  for (const std::string& stem : listing.unmatched) std::cerr << "warning: unmatched stem '" << stem << "'\n";
  std::cout << "name,ssim,psnr\n";
  for (const PairFiles& f : listing.pairs) {
    const Image pred = load_image(f.first);
    const Image truth = load_image(f.second);
    std::cout << f.stem << ',' << ssim(pred, truth) << ',' << psnr(pred, truth) << '\n';
  }
}

// --------------------------------------------------------- noise-analyze

struct NoiseArgs {
  std::vector<double> ts{0.05, 0.1, 0.15, 0.2, 0.3, 0.5, 0.8};
  double sigma = 0.02;
  int seeds = 20;
  int size = 64;
  double clean = 0.5;
  std::string airlight = "0.8";
};

void run_noise_analyze(const NoiseArgs& args, const PipelineConfig& cfg) {
  NoiseExperiment setup;
  setup.size = args.size;
  setup.clean_value = args.clean;
  setup.airlight = parse_airlight(args.airlight);
  setup.sigma = args.sigma;
  setup.seeds = args.seeds;
  setup.first_seed = cfg.seed;
  setup.wgif = cfg.wgif();
  setup.recovery = cfg.recovery();
  std::cout.precision(8);
  std::cout << "t,sigma,input_var,classic_var,predicted_classic_var,fused_var,fused_over_classic\n";
  for (const NoiseRow& r : run_noise_experiment(setup, args.ts)) {
    std::cout << r.t << ',' << args.sigma << ',' << r.input_variance << ',' << r.classic_variance << ','
              << r.predicted_classic << ',' << r.fused_variance << ',' << r.fused_variance / r.classic_variance
              << '\n';
  }
}

// --------------------------------------------------------------- prepare

void run_prepare(const std::string& src, const std::string& dst, const PrepareOptions& opt) {
  const PrepareReport report = prepare_dataset(src, dst, opt);
  for (const std::string& stem : report.unmatched) std::cerr << "warning: skipping unmatched stem '" << stem << "'\n";
  std::cout << "wrote " << report.pairs_written << " pairs into " << dst << "\n";
}

const std::set<std::string> kSubcommands = {"dehaze", "decompose", "airlight", "synthesize",
                                             "train", "evaluate", "noise-analyze", "prepare"};

int run(int argc, char** argv) {
  // `dehaze <image> ...` without a subcommand means the dehaze subcommand.
  // Only words that look like paths qualify, so a mistyped subcommand is
  // still reported as a usage error.
  std::vector<std::string> args(argv + 1, argv + argc);
  const auto looks_like_path = [](const std::string& a) {
    return a.find_first_of("./\\") != std::string::npos || std::filesystem::exists(a);
  };
  if (!args.empty() && !args[0].starts_with('-') && !kSubcommands.contains(args[0]) && looks_like_path(args[0])) {
    args.insert(args.begin(), "dehaze");
  }
  std::reverse(args.begin(), args.end());  // CLI11 consumes vectors back to front

  CLI::App app{"Single-image dehazing with a weighted guided filter decomposition and gated recovery", "dehaze"};
  app.require_subcommand(1);
  std::function<void()> action;

  auto* dz = app.add_subcommand("dehaze", "Dehaze one image");
  DehazeArgs dz_args;
  dz->add_option("image", dz_args.input, "Hazy input image")->required();
  dz->add_option("--estimator", dz_args.estimator, "Transmission estimator")
      ->check(CLI::IsMember({"prior", "learned"}))
      ->capture_default_str();
  dz->add_option("--model", dz_args.model, "Model file for --estimator learned");
  dz->add_option("-o,--output", dz_args.output, "Output PNG (default <stem>_dehazed.png next to the input)");
  dz->add_flag("--classic", dz_args.classic, "Use classic recovery instead of the gated fusion");
  dz->add_option("--dump-t", dz_args.dump_t, "Write the transmission map");
  dz->add_option("--dump-gain", dz_args.dump_gain, "Write the normalised noise-gain map");
  ConfigOptions dz_cfg(dz, {"radius", "lambda", "eps", "omega", "patch_radius", "eta", "t0", "t_floor", "min_block"});
  dz->callback([&] { action = [&] { run_dehaze(dz_args, dz_cfg.resolve()); }; });

  auto* dc = app.add_subcommand("decompose", "Split an image into base and detail layers");
  std::string dc_input;
  std::string dc_out;
  dc->add_option("image", dc_input, "Input image")->required();
  dc->add_option("--out-dir", dc_out, "Output directory (default: current directory)");
  ConfigOptions dc_cfg(dc, {"radius", "lambda", "eps"});
  dc->callback([&] { action = [&] { run_decompose(dc_input, dc_out, dc_cfg.resolve()); }; });

  auto* al = app.add_subcommand("airlight", "Estimate the airlight of an image");
  std::string al_input;
  std::string al_debug;
  al->add_option("image", al_input, "Input image")->required();
  al->add_option("--debug", al_debug, "Write a PNG showing the quad-tree search path");
  ConfigOptions al_cfg(al, {"radius", "lambda", "eps", "min_block"});
  al->callback([&] { action = [&] { run_airlight(al_input, al_debug, al_cfg.resolve()); }; });

  auto* sy = app.add_subcommand("synthesize", "Create hazy/clean training pairs from clean images and depth maps");
  SynthesizeArgs sy_args;
  sy->add_option("--clean", sy_args.clean, "Directory of clean RGB images")->required();
  sy->add_option("--depth", sy_args.depth, "Directory of depth maps (16-bit PNG or PFM)")->required();
  sy->add_option("--beta", sy_args.beta, "Scattering coefficient (default: sampled from U[0.5, 2.5])");
  sy->add_option("--airlight", sy_args.airlight, "Airlight v or r,g,b (default: sampled from U[0.7, 1]^3)");
  sy->add_option("--noise-sigma", sy_args.noise_sigma, "Gaussian noise standard deviation")->capture_default_str();
  sy->add_option("--out", sy_args.out, "Output directory")->required();
  ConfigOptions sy_cfg(sy, {"seed", "t_floor"});
  sy->callback([&] { action = [&] { run_synthesize(sy_args, sy_cfg.resolve()); }; });

  auto* tr = app.add_subcommand("train", "Train the bilateral-grid transmission predictor");
  std::string tr_data;
  std::string tr_out;
  std::string tr_log;
  tr->add_option("--data", tr_data, "Dataset directory with hazy/ and clean/")->required();
  tr->add_option("--out", tr_out, "Model file to write")->required();
  tr->add_option("--log", tr_log, "Write the per-step loss trace as CSV");
  ConfigOptions tr_cfg(tr, {"steps", "lr", "wc", "seed", "batch", "grid_x", "grid_y", "grid_d", "levels", "radius",
                            "lambda", "eps", "eta", "t0", "t_floor", "min_block"});
  tr->callback([&] { action = [&] { run_train(tr_data, tr_out, tr_log, tr_cfg.resolve()); }; });

  auto* ev = app.add_subcommand("evaluate", "SSIM/PSNR over a directory of pairs, or the loss of one pair");
  EvaluateArgs ev_args;
  ev->add_option("--pairs", ev_args.pairs, "Directory holding the two subdirectories to compare");
  ev->add_option("--pred-subdir", ev_args.pred_subdir, "Subdirectory of predictions")->capture_default_str();
  ev->add_option("--truth-subdir", ev_args.truth_subdir, "Subdirectory of references")->capture_default_str();
  ev->add_option("--loss", ev_args.loss, "Print L_r, L_c and L for <pred> <truth>")->expected(2);
  ConfigOptions ev_cfg(ev, {"wc"});
  ev->callback([&] { action = [&] { run_evaluate(ev_args, ev_cfg.resolve()); }; });

  auto* na = app.add_subcommand("noise-analyze", "Classic vs gated-fusion noise variance on a flat hazy scene");
  NoiseArgs na_args;
  na->add_option("--t", na_args.ts, "Transmission values")->delimiter(',')->capture_default_str();
  na->add_option("--sigma", na_args.sigma, "Noise standard deviation")->capture_default_str();
  na->add_option("--seeds", na_args.seeds, "Noise realisations per t")->check(CLI::PositiveNumber)->capture_default_str();
  na->add_option("--size", na_args.size, "Image side")->check(CLI::Range(2, 4096))->capture_default_str();
  na->add_option("--clean", na_args.clean, "Clean intensity")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  na->add_option("--airlight", na_args.airlight, "Airlight v or r,g,b")->capture_default_str();
  ConfigOptions na_cfg(na, {"radius", "lambda", "eps", "eta", "t0", "seed"});
  na->callback([&] { action = [&] { run_noise_analyze(na_args, na_cfg.resolve()); }; });

  auto* pr = app.add_subcommand("prepare", "Crop, downsample and optionally mirror a hazy/clean dataset");
  std::string pr_src;
  std::string pr_dst;
  PrepareOptions pr_opt;
  pr->add_option("--src", pr_src, "Source directory with hazy/ and clean/")->required();
  pr->add_option("--dst", pr_dst, "Destination directory")->required();
  pr->add_option("--crop", pr_opt.crop, "Centre-crop side")->check(CLI::PositiveNumber)->capture_default_str();
  pr->add_option("--down", pr_opt.down, "Output side")->check(CLI::PositiveNumber)->capture_default_str();
  pr->add_flag("--mirror", pr_opt.mirror, "Also write horizontally mirrored copies");
  pr->callback([&] { action = [&] { run_prepare(pr_src, pr_dst, pr_opt); }; });

  try {
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    action();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
