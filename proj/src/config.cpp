#include "dehaze/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <variant>

#include "dehaze/errors.hpp"

namespace dehaze {
namespace {

using Field = std::variant<int PipelineConfig::*, double PipelineConfig::*, std::uint64_t PipelineConfig::*>;

struct KeySpec {
  std::string_view name;
  Field field;
};

constexpr KeySpec kKeys[] = {
    {"radius", &PipelineConfig::radius},
    {"lambda", &PipelineConfig::lambda},
    {"eps", &PipelineConfig::eps},
    {"omega", &PipelineConfig::omega},
    {"patch_radius", &PipelineConfig::patch_radius},
    {"eta", &PipelineConfig::eta},
    {"t0", &PipelineConfig::t0},
    {"t_floor", &PipelineConfig::t_floor},
    {"min_block", &PipelineConfig::min_block},
    {"wc", &PipelineConfig::wc},
    {"lr", &PipelineConfig::lr},
    {"steps", &PipelineConfig::steps},
    {"seed", &PipelineConfig::seed},
    {"batch", &PipelineConfig::batch},
    {"grid_x", &PipelineConfig::grid_x},
    {"grid_y", &PipelineConfig::grid_y},
    {"grid_d", &PipelineConfig::grid_d},
    {"levels", &PipelineConfig::levels},
};

const KeySpec* find_key(std::string_view key) {
  for (const KeySpec& k : kKeys) {
    if (k.name == key) return &k;
  }
  return nullptr;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ArgumentError("config: invalid value '" + std::string(text) + "' for key '" + std::string(key) + "'");
  }
  return value;
}

void require(bool ok, const char* message) {
  if (!ok) throw ArgumentError(std::string("config: ") + message);
}

}  // namespace

void PipelineConfig::validate() const {
  require(radius >= 1, "radius must be >= 1");
  require(lambda > 0.0, "lambda must be > 0");
  require(eps > 0.0, "eps must be > 0");
  require(omega > 0.0 && omega <= 1.0, "omega must lie in (0, 1]");
  require(patch_radius >= 0, "patch_radius must be >= 0");
  require(eta > 1.0, "eta must be > 1");
  require(t0 > 0.0 && t0 < 1.0, "t0 must lie in (0, 1)");
  require(t_floor > 0.0 && t_floor < 1.0, "t_floor must lie in (0, 1)");
  require(min_block >= 1, "min_block must be >= 1");
  require(wc >= 0.0, "wc must be >= 0");
  require(lr > 0.0, "lr must be > 0");
  require(steps >= 0, "steps must be >= 0");
  require(batch >= 1, "batch must be >= 1");
  require(grid_x >= 1 && grid_y >= 1 && grid_d >= 1, "grid dimensions must be >= 1");
  require(levels >= 1 && levels <= 8, "levels must lie in [1, 8]");
}

WgifParams PipelineConfig::wgif() const { return {radius, lambda, eps}; }

PriorParams PipelineConfig::prior() const { return {omega, patch_radius, t_floor, wgif()}; }

RecoveryParams PipelineConfig::recovery() const {
  RecoveryParams p;
  p.t0 = t0;
  p.eta = eta;
  return p;
}

AirlightParams PipelineConfig::airlight() const {
  AirlightParams p;
  p.min_block = min_block;
  return p;
}

GridShape PipelineConfig::grid() const {
  GridShape s;
  s.grid_x = grid_x;
  s.grid_y = grid_y;
  s.grid_d = grid_d;
  s.levels = levels;
  return s;
}

TrainConfig PipelineConfig::training() const {
  TrainConfig c;
  c.learning_rate = lr;
  c.steps = steps;
  c.color_weight = wc;
  c.seed = seed;
  c.batch = batch;
  c.t_floor = t_floor;
  c.wgif = wgif();
  c.airlight = airlight();
  c.recovery = recovery();
  return c;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const KeySpec& k : kKeys) keys.emplace_back(k.name);
  return keys;
}

void set_config_value(PipelineConfig& cfg, std::string_view key, std::string_view value) {
  const KeySpec* spec = find_key(key);
  if (spec == nullptr) throw ArgumentError("config: unknown key '" + std::string(key) + "'");
  std::visit(
      [&](auto member) {
        using T = std::remove_reference_t<decltype(cfg.*member)>;
        cfg.*member = parse_number<T>(key, value);
      },
      spec->field);
}

std::string get_config_value(const PipelineConfig& cfg, std::string_view key) {
  const KeySpec* spec = find_key(key);
  if (spec == nullptr) throw ArgumentError("config: unknown key '" + std::string(key) + "'");
  return std::visit(
      [&](auto member) {
        std::ostringstream out;
        out << cfg.*member;
        return out.str();
      },
      spec->field);
}

std::map<std::string, std::string> parse_config_text(std::string_view text) {
  std::map<std::string, std::string> values;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ArgumentError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (find_key(key) == nullptr) {
      throw ArgumentError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    PipelineConfig probe;
    set_config_value(probe, key, value);
    values[key] = value;
  }
  return values;
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void apply_config(PipelineConfig& cfg, const std::map<std::string, std::string>& values,
                  const std::set<std::string>& explicitly_set) {
  for (const auto& [key, value] : values) {
    if (explicitly_set.contains(key)) continue;
    set_config_value(cfg, key, value);
  }
  cfg.validate();
}

}  // namespace dehaze
