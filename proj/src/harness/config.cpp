#include "flicker/harness/config.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "flicker/attack/temporal.hpp"
#include "flicker/error.hpp"
#include "flicker/rng.hpp"

namespace flicker::harness {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "seed", "out_dir",
      "dataset.frames", "dataset.height", "dataset.width", "dataset.v_min", "dataset.v_max", "dataset.classes",
      "dataset.train_per_class", "dataset.eval_per_class", "dataset.noise_sigma",
      "train.arch", "train.learning_rate", "train.batch_size", "train.epochs", "train.beta1", "train.beta2",
      "train.epsilon",
      "attack.mode", "attack.class", "attack.time_invariant", "attack.margin", "attack.margin_space",
      "attack.direction", "attack.target", "attack.lambda", "attack.beta1", "attack.beta2", "attack.linf_pct",
      "attack.iterations", "attack.batch_size", "attack.learning_rate", "attack.adam_beta1", "attack.adam_beta2",
      "attack.adam_epsilon", "attack.eval_every",
      "sweep.linf_pct", "sweep.repeats",
      "channel.crosstalk", "channel.rise_alpha", "channel.phase", "channel.ambient", "channel.noise_sigma",
      "ota.trials", "ota.jitter", "ota.probe_amplitude", "ota.probe_width", "ota.attack_margin",
      "ota.attack_iterations", "ota.attack_learning_rate",
  };
  return keys;
}

}  // namespace

Config Config::parse(std::string_view text, const std::string& origin) {
  Config c;
  c.origin_ = origin;
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find_first_of("#;");
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') throw ValidationError(where + ": unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section.empty()) throw ValidationError(where + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ValidationError(where + ": expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (key.empty()) throw ValidationError(where + ": missing key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (c.values_.count(full)) throw ValidationError(where + ": duplicate key " + full);
    c.values_[full] = trim(std::string_view(line).substr(eq + 1));
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

std::string Config::text(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::real(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  double v = 0.0;
  const char* b = it->second.data();
  const char* e = b + it->second.size();
  const auto r = std::from_chars(b, e, v);
  if (r.ec != std::errc() || r.ptr != e || !std::isfinite(v))
    throw ValidationError(origin_ + ": " + key + " must be a finite number, got '" + it->second + "'");
  return v;
}

std::uint64_t Config::integer(const std::string& key, std::uint64_t fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::uint64_t v = 0;
  const char* b = it->second.data();
  const char* e = b + it->second.size();
  const auto r = std::from_chars(b, e, v);
  if (r.ec != std::errc() || r.ptr != e)
    throw ValidationError(origin_ + ": " + key + " must be a non-negative integer, got '" + it->second + "'");
  return v;
}

bool Config::flag(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
  if (it->second == "false" || it->second == "0" || it->second == "no") return false;
  throw ValidationError(origin_ + ": " + key + " must be true or false");
}

std::vector<double> Config::reals(const std::string& key, const std::vector<double>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  std::istringstream in(it->second);
  std::string item;
  while (std::getline(in, item, ',')) {
    Config one;
    one.origin_ = origin_;
    one.values_[key] = trim(item);
    out.push_back(one.real(key, 0.0));
  }
  return out;
}

std::vector<std::string> Config::keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) out.push_back(k);
  return out;
}

ota::ChannelModel default_ota_channel() {
  ota::ChannelModel ch;
  ch.crosstalk = {{{0.92, 0.06, 0.02}, {0.05, 0.90, 0.05}, {0.02, 0.07, 0.91}}};
  ch.rise_alpha = 0.7;
  ch.phase = 3;
  ch.noise_sigma = 0.01;
  return ch;
}

ExperimentConfig ExperimentConfig::from(const Config& c) {
  for (const std::string& k : c.keys())
    if (!known_keys().count(k)) throw ValidationError("unknown config key '" + k + "'");

  ExperimentConfig x;
  x.apply_seed(c.integer("seed", x.seed));
  x.out_dir = c.text("out_dir", x.out_dir.string());

  video::Dims& d = x.dataset.dims;
  d.frames = c.integer("dataset.frames", d.frames);
  d.height = c.integer("dataset.height", d.height);
  d.width = c.integer("dataset.width", d.width);
  d.v_min = c.real("dataset.v_min", d.v_min);
  d.v_max = c.real("dataset.v_max", d.v_max);
  x.dataset.num_classes = c.integer("dataset.classes", x.dataset.num_classes);
  x.dataset.clips_per_class = c.integer("dataset.train_per_class", x.dataset.clips_per_class);
  x.eval_per_class = c.integer("dataset.eval_per_class", x.eval_per_class);
  x.dataset.noise_sigma = c.real("dataset.noise_sigma", x.dataset.noise_sigma);

  diffnet::TrainConfig& t = x.train;
  t.arch = diffnet::parse_architecture(c.text("train.arch", diffnet::architecture_name(t.arch)));
  t.learning_rate = c.real("train.learning_rate", t.learning_rate);
  t.batch_size = c.integer("train.batch_size", t.batch_size);
  t.epochs = c.integer("train.epochs", t.epochs);
  t.beta1 = c.real("train.beta1", t.beta1);
  t.beta2 = c.real("train.beta2", t.beta2);
  t.epsilon = c.real("train.epsilon", t.epsilon);

  const attack::AttackMode mode = attack::parse_mode(c.text("attack.mode", attack::mode_name(x.attack.mode)));
  const std::uint64_t attack_seed = x.attack.seed;
  x.attack = attack::AttackConfig::defaults(mode);
  x.attack.seed = attack_seed;
  attack::AttackConfig& a = x.attack;
  a.attacked_class = c.integer("attack.class", a.attacked_class);
  a.time_invariant = c.flag("attack.time_invariant", a.time_invariant);
  a.margin.margin = c.real("attack.margin", a.margin.margin);
  const std::string space = c.text("attack.margin_space", "probability");
  if (space == "probability") a.margin.space = attack::MarginSpace::kProbability;
  else if (space == "logit") a.margin.space = attack::MarginSpace::kLogit;
  else throw ValidationError("attack.margin_space must be probability or logit");
  const std::string dir = c.text("attack.direction", "untargeted");
  if (dir == "untargeted") a.margin.direction = attack::Direction::kUntargeted;
  else if (dir == "targeted") a.margin.direction = attack::Direction::kTargeted;
  else throw ValidationError("attack.direction must be untargeted or targeted");
  a.margin.cls = c.integer("attack.target", a.margin.cls);
  a.weights.lambda = c.real("attack.lambda", a.weights.lambda);
  a.weights.beta1 = c.real("attack.beta1", a.weights.beta1);
  a.weights.beta2 = c.real("attack.beta2", a.weights.beta2);
  if (c.has("attack.linf_pct")) x.linf_pct = c.real("attack.linf_pct", 0.0);
  a.iterations = c.integer("attack.iterations", a.iterations);
  a.batch_size = c.integer("attack.batch_size", a.batch_size);
  a.learning_rate = c.real("attack.learning_rate", a.learning_rate);
  a.adam_beta1 = c.real("attack.adam_beta1", a.adam_beta1);
  a.adam_beta2 = c.real("attack.adam_beta2", a.adam_beta2);
  a.adam_epsilon = c.real("attack.adam_epsilon", a.adam_epsilon);
  a.eval_every = c.integer("attack.eval_every", a.eval_every);

  x.sweep_linf_pct = c.reals("sweep.linf_pct", x.sweep_linf_pct);
  x.repeats = c.integer("sweep.repeats", x.repeats);

  ota::ChannelModel& ch = x.channel;
  if (c.has("channel.crosstalk")) {
    const std::vector<double> m = c.reals("channel.crosstalk", {});
    if (m.size() != 9) throw ValidationError("channel.crosstalk needs 9 comma-separated values (row-major)");
    for (std::size_t i = 0; i < 9; ++i) ch.crosstalk[i / 3][i % 3] = m[i];
  }
  ch.rise_alpha = c.real("channel.rise_alpha", ch.rise_alpha);
  ch.phase = static_cast<long>(c.integer("channel.phase", static_cast<std::uint64_t>(ch.phase)));
  if (c.has("channel.ambient")) {
    const std::vector<double> b = c.reals("channel.ambient", {});
    if (b.size() != 3) throw ValidationError("channel.ambient needs 3 comma-separated values");
    for (std::size_t i = 0; i < 3; ++i) ch.ambient[i] = b[i];
  }
  ch.noise_sigma = c.real("channel.noise_sigma", ch.noise_sigma);

  OtaSettings& o = x.ota;
  o.trials = c.integer("ota.trials", o.trials);
  o.jitter = c.real("ota.jitter", o.jitter);
  o.probe_amplitude = c.real("ota.probe_amplitude", o.probe_amplitude);
  o.probe_width = c.integer("ota.probe_width", o.probe_width);
  o.attack_margin = c.real("ota.attack_margin", o.attack_margin);
  o.attack_iterations = c.integer("ota.attack_iterations", o.attack_iterations);
  o.attack_learning_rate = c.real("ota.attack_learning_rate", o.attack_learning_rate);

  x.validate();
  return x;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) { return from(Config::load(path)); }

void ExperimentConfig::apply_seed(std::uint64_t global_seed) {
  seed = global_seed;
  const SplitMix64 root(global_seed);
  dataset.seed = root.split(1)();
  train.seed = root.split(2)();
  attack.seed = root.split(3)();
}

void ExperimentConfig::validate() const {
  dataset.validate();
  if (eval_per_class < 1) throw ValidationError("dataset.eval_per_class must be >= 1");
  train.validate();
  if (!(train.learning_rate > 0.0)) throw ValidationError("train.learning_rate must be > 0");
  attack.validate();
  attack.margin.validate(dataset.num_classes);
  if (linf_pct && !(*linf_pct > 0.0)) throw ValidationError("attack.linf_pct must be > 0");
  if (sweep_linf_pct.empty()) throw ValidationError("sweep.linf_pct must list at least one budget");
  for (double p : sweep_linf_pct)
    if (!(p > 0.0)) throw ValidationError("sweep.linf_pct values must be > 0");
  if (repeats < 1) throw ValidationError("sweep.repeats must be >= 1");
  channel.validate();
  if (ota.trials < 1) throw ValidationError("ota.trials must be >= 1");
  if (!(ota.jitter >= 0.0)) throw ValidationError("ota.jitter must be >= 0");
  if (!(ota.probe_amplitude > 0.0)) throw ValidationError("ota.probe_amplitude must be > 0");
  if (!(ota.attack_margin > 0.0)) throw ValidationError("ota.attack_margin must be > 0");
  if (ota.attack_iterations < 1) throw ValidationError("ota.attack_iterations must be >= 1");
  if (!(ota.attack_learning_rate > 0.0)) throw ValidationError("ota.attack_learning_rate must be > 0");
}

std::string default_config_text() {
  return R"(# flicker experiment configuration (key = value, [section] headers)
seed = 1
out_dir = out

[dataset]
frames = 16
height = 32
width = 32
v_min = -1
v_max = 1
classes = 6
train_per_class = 20
eval_per_class = 10
noise_sigma = 0.05

[train]
arch = A                  # A or B
learning_rate = 0.01
batch_size = 8
epochs = 40

[attack]
mode = universal          # single_video | single_class | universal
class = 0                 # single_class only
time_invariant = false
margin = 0.05
margin_space = probability
direction = untargeted
lambda = 1
beta1 = 0.5
beta2 = 0.5
# linf_pct = 20           # optional budget, percent of (v_max - v_min)
iterations = 300
batch_size = 8
learning_rate = 0.001
eval_every = 10

[sweep]
linf_pct = 5,10,15,20
repeats = 10

[channel]
crosstalk = 0.92,0.06,0.02, 0.05,0.90,0.05, 0.02,0.07,0.91
rise_alpha = 0.7
phase = 3
ambient = 0,0,0           # relative to the half-max illumination of the clean recording
noise_sigma = 0.01

[ota]
trials = 10
jitter = 0.04
probe_amplitude = 0.5
probe_width = 4
attack_margin = 0.3
attack_iterations = 150
attack_learning_rate = 0.01
)";
}

}  // namespace flicker::harness
