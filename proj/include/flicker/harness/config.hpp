#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flicker/attack/driver.hpp"
#include "flicker/diffnet/train.hpp"
#include "flicker/ota/channel.hpp"
#include "flicker/video/dataset.hpp"

namespace flicker::harness {

// Flat key=value text with [section] headers. Keys are addressed as
// "section.key" ("key" before the first header). '#' and ';' start comments;
// blank lines are ignored. Lists are comma separated.
class Config {
 public:
  static Config parse(std::string_view text, const std::string& origin = "<config>");
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

  std::string text(const std::string& key, const std::string& fallback) const;
  double real(const std::string& key, double fallback) const;
  std::uint64_t integer(const std::string& key, std::uint64_t fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::vector<double> reals(const std::string& key, const std::vector<double>& fallback) const;

  std::vector<std::string> keys() const;

 private:
  std::string origin_;
  std::map<std::string, std::string> values_;
};

struct OtaSettings {
  std::size_t trials = 10;          // eval clips attacked and re-rendered
  double jitter = 0.04;             // jitter_params amount for the re-rendered scene
  double probe_amplitude = 0.5;     // calibration pulse height (gray levels)
  std::size_t probe_width = 4;      // calibration pulse length (frames)
  double attack_margin = 0.3;       // margin used for the scene attack
  std::size_t attack_iterations = 150;
  double attack_learning_rate = 1e-2;
};

// Illustrative bulb/camera path used when the config names none: mild
// crosstalk, a rise time of a few frames, 3 frames of desynchronization and
// light sensor noise. Not measured on hardware.
ota::ChannelModel default_ota_channel();

struct ExperimentConfig {
  video::SyntheticDatasetSpec dataset{};  // clips_per_class = training clips per class
  std::size_t eval_per_class = 10;
  diffnet::TrainConfig train{};
  attack::AttackConfig attack = attack::AttackConfig::defaults(attack::AttackMode::kUniversal);
  std::optional<double> linf_pct;         // attack budget, percent of the intensity range
  std::vector<double> sweep_linf_pct{5, 10, 15, 20};
  std::size_t repeats = 10;
  ota::ChannelModel channel = default_ota_channel();
  OtaSettings ota{};
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 1;

  // Unknown keys raise ValidationError, so typos never go unnoticed.
  static ExperimentConfig from(const Config& c);
  static ExperimentConfig load(const std::filesystem::path& path);

  // Re-derives every stream (dataset, training, attack) from one global seed.
  void apply_seed(std::uint64_t global_seed);

  void validate() const;
};

// The documented key list with defaults, as a commented config file.
std::string default_config_text();

}  // namespace flicker::harness
