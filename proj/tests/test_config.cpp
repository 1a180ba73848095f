#include <gtest/gtest.h>

#include <fstream>

#include "dehaze/config.hpp"
#include "dehaze/errors.hpp"
#include "test_support.hpp"

using namespace dehaze;

TEST(PipelineConfig, DefaultsAreValidAndPropagate) {
  const PipelineConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.omega, 0.95);
  EXPECT_EQ(cfg.patch_radius, 7);
  EXPECT_EQ(cfg.eta, 4.0);
  EXPECT_EQ(cfg.t0, 0.1);
  EXPECT_EQ(cfg.t_floor, 0.05);
  EXPECT_EQ(cfg.wc, 0.01);
  EXPECT_EQ(cfg.lr, 1e-3);
  EXPECT_EQ(cfg.radius, 8);
  EXPECT_EQ(cfg.lambda, 2e-2);
  EXPECT_EQ(cfg.grid().grid_x, 16);
  EXPECT_EQ(cfg.grid().grid_d, 8);
  EXPECT_EQ(cfg.training().color_weight, 0.01);
  EXPECT_EQ(cfg.prior().refine.lambda, cfg.lambda);
}

TEST(PipelineConfig, ParsesKeyValueText) {
  const auto values = parse_config_text("# comment\n\n eta = 5.5 \nsteps=42 # trailing\nseed=18446744073709551615\n");
  EXPECT_EQ(values.size(), 3u);
  PipelineConfig cfg;
  apply_config(cfg, values, {});
  EXPECT_EQ(cfg.eta, 5.5);
  EXPECT_EQ(cfg.steps, 42);
  EXPECT_EQ(cfg.seed, 18446744073709551615ull);
}

TEST(PipelineConfig, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(parse_config_text("etta = 4\n"), ArgumentError);
  EXPECT_THROW(parse_config_text("eta 4\n"), ArgumentError);
  EXPECT_THROW(parse_config_text("steps = 1.5\n"), ArgumentError);
  EXPECT_THROW(parse_config_text("lambda = abc\n"), ArgumentError);
  PipelineConfig cfg;
  EXPECT_THROW(apply_config(cfg, parse_config_text("omega = 1.5\n"), {}), ArgumentError);
  EXPECT_THROW(set_config_value(cfg, "nope", "1"), ArgumentError);
}

TEST(PipelineConfig, DomainChecks) {
  auto bad = [](auto mutate) {
    PipelineConfig cfg;
    mutate(cfg);
    return cfg;
  };
  EXPECT_THROW(bad([](PipelineConfig& c) { c.radius = 0; }).validate(), ArgumentError);
  EXPECT_THROW(bad([](PipelineConfig& c) { c.lambda = 0; }).validate(), ArgumentError);
  EXPECT_THROW(bad([](PipelineConfig& c) { c.eta = 1.0; }).validate(), ArgumentError);
  EXPECT_THROW(bad([](PipelineConfig& c) { c.t0 = 1.0; }).validate(), ArgumentError);
  EXPECT_THROW(bad([](PipelineConfig& c) { c.wc = -0.1; }).validate(), ArgumentError);
  EXPECT_THROW(bad([](PipelineConfig& c) { c.levels = 0; }).validate(), ArgumentError);
}

TEST(PipelineConfig, FlagBeatsFileBeatsDefault) {
  testing_support::TempDir dir("config");
  std::ofstream(dir / "c.txt") << "eta = 5\nt0 = 0.2\n";
  PipelineConfig cfg;
  // The command line set t0 explicitly.
  set_config_value(cfg, "t0", "0.3");
  apply_config(cfg, read_config_file(dir / "c.txt"), {"t0"});
  EXPECT_EQ(cfg.t0, 0.3);    // flag
  EXPECT_EQ(cfg.eta, 5.0);   // file
  EXPECT_EQ(cfg.omega, 0.95);  // default
}

TEST(PipelineConfig, ValuesRoundTripThroughText) {
  PipelineConfig cfg;
  for (const std::string& key : config_keys()) {
    PipelineConfig copy;
    set_config_value(copy, key, get_config_value(cfg, key));
    EXPECT_EQ(get_config_value(copy, key), get_config_value(cfg, key)) << key;
  }
  EXPECT_THROW(read_config_file("/nonexistent/cfg.txt"), IoError);
}
