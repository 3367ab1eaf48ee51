#include "flicker/attack/driver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "flicker/adam.hpp"
#include "flicker/attack/temporal.hpp"
#include "flicker/diffnet/network.hpp"
#include "flicker/error.hpp"
#include "flicker/rng.hpp"

namespace flicker::attack {
namespace {

constexpr std::uint64_t kBatchStream = 1;
constexpr std::uint64_t kTauStream = 2;
constexpr std::uint64_t kSelectionStream = 3;

HistoryRecord checkpoint(const diffnet::ModelParams& model, std::span<const video::LabeledVideo> data,
                         const video::Perturbation& delta, const AttackConfig& cfg, const TauMode& selection,
                         std::size_t iteration) {
  const std::size_t T = delta.frames();
  std::vector<long> taus(data.size());
  for (std::size_t n = 0; n < data.size(); ++n) taus[n] = tau_for_clip(selection, n, T);

  HistoryRecord r;
  r.iteration = iteration;
  const ObjectiveValue obj = objective(delta, data, model, cfg.weights, cfg.margin, taus, false);
  r.loss = obj.loss;
  r.data_term = obj.data_term;
  r.reg_term = obj.reg_term;

  double fooled = 0.0, top = 0.0, orig = 0.0;
  for (std::size_t n = 0; n < data.size(); ++n) {
    const diffnet::Prediction& p = obj.predictions[n];
    fooled += p.top_class != data[n].label ? 1.0 : 0.0;
    top += p.probabilities[p.top_class];
    orig += p.probabilities[data[n].label];
  }
  const double inv = 1.0 / static_cast<double>(data.size());
  r.fooling_ratio = fooled * inv;
  r.top_probability = top * inv;
  r.original_probability = orig * inv;
  const MetricsReport m = metrics(delta);
  r.thickness_pct = m.thickness_pct;
  r.roughness_pct = m.roughness_pct;
  r.linf_pct = m.linf_pct;
  return r;
}

}  // namespace

const char* mode_name(AttackMode m) {
  switch (m) {
    case AttackMode::kSingleVideo: return "single_video";
    case AttackMode::kSingleClass: return "single_class";
    case AttackMode::kUniversal: return "universal";
  }
  return "unknown";
}

AttackMode parse_mode(const std::string& name) {
  if (name == "single_video" || name == "single") return AttackMode::kSingleVideo;
  if (name == "single_class" || name == "class") return AttackMode::kSingleClass;
  if (name == "universal") return AttackMode::kUniversal;
  throw ValidationError("unknown attack mode \"" + name + "\" (single | class | universal)");
}

AttackConfig AttackConfig::defaults(AttackMode mode) {
  AttackConfig c;
  c.mode = mode;
  c.batch_size = mode == AttackMode::kSingleVideo ? 1 : 8;
  return c;
}

void AttackConfig::validate() const {
  if (iterations < 1) throw ValidationError("attack: iterations must be >= 1");
  if (batch_size < 1) throw ValidationError("attack: batch_size must be >= 1");
  if (eval_every < 1) throw ValidationError("attack: eval_every must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw ValidationError("attack: learning rate must be finite and > 0");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0 && adam_beta2 >= 0.0 && adam_beta2 < 1.0 && adam_epsilon > 0.0))
    throw ValidationError("attack: bad Adam constants");
  if (zeta && (!(*zeta > 0.0) || !std::isfinite(*zeta))) throw ValidationError("attack: zeta must be > 0");
  weights.validate();
  if (!(margin.margin > 0.0)) throw ValidationError("attack: margin must be > 0");
}

std::vector<video::LabeledVideo> select_class(std::span<const video::LabeledVideo> data, std::size_t label) {
  std::vector<video::LabeledVideo> out;
  for (const auto& clip : data)
    if (clip.label == label) out.push_back(clip);
  if (out.empty()) throw ValidationError("no clips of class " + std::to_string(label));
  return out;
}

AttackResult attack(const diffnet::ModelParams& model, std::span<const video::LabeledVideo> data,
                    const AttackConfig& cfg, const std::function<void(const HistoryRecord&)>& on_eval) {
  cfg.validate();
  if (data.empty()) throw ValidationError("attack: no clips to attack");
  cfg.margin.validate(model.num_classes);
  if (cfg.mode == AttackMode::kSingleVideo && data.size() != 1)
    throw ValidationError("attack: single-video mode takes exactly one clip");
  if (cfg.mode == AttackMode::kSingleClass)
    for (const auto& clip : data)
      if (clip.label != cfg.attacked_class) throw ValidationError("attack: single-class data must share one label");
  for (const auto& clip : data)
    if (!(clip.video.dims() == model.dims)) throw ShapeError("attack: clip dims do not match the model");

  const std::size_t T = model.dims.frames;
  const SplitMix64 root(cfg.seed);
  SplitMix64 batch_rng = root.split(kBatchStream);
  SplitMix64 tau_rng = root.split(kTauStream);
  const TauMode selection = cfg.time_invariant ? TauMode::random(root.split(kSelectionStream)()) : TauMode::synchronized();

  AttackResult result;
  result.config = cfg;
  result.model_fingerprint = diffnet::fingerprint(model);
  video::Perturbation delta(model.dims);
  Adam adam({delta.size()}, {cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_epsilon});

  double best_fool = -1.0, best_thick = 0.0;
  auto record = [&](std::size_t it) {
    HistoryRecord r = checkpoint(model, data, delta, cfg, selection, it);
    const double thick = metric_thickness(delta);
    if (r.fooling_ratio > best_fool || (r.fooling_ratio == best_fool && thick < best_thick)) {
      best_fool = r.fooling_ratio;
      best_thick = thick;
      result.delta = delta;
      result.best_iteration = it;
    }
    if (on_eval) on_eval(r);
    result.history.push_back(r);
  };
  record(0);

  const std::size_t batch_size = std::min(cfg.batch_size, data.size());
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t cursor = order.size();
  std::vector<video::LabeledVideo> batch;
  std::vector<long> taus;

  for (std::size_t it = 1; it <= cfg.iterations; ++it) {
    batch.clear();
    taus.clear();
    while (batch.size() < batch_size) {
      if (cursor == order.size()) {
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[batch_rng.below(i)]);
        cursor = 0;
      }
      batch.push_back(data[order[cursor++]]);
      taus.push_back(cfg.time_invariant ? static_cast<long>(1 + tau_rng.below(T)) : 0);
    }

    const ObjectiveValue obj = objective(delta, batch, model, cfg.weights, cfg.margin, taus);
    if (!std::isfinite(obj.loss)) throw OptimizationError("non-finite attack objective", it);
    std::vector<std::span<const double>> grads{obj.grad};
    adam.step(std::vector<std::span<double>>{delta.trace()}, grads);
    if (cfg.zeta) delta = project_linf(delta, *cfg.zeta);

    if (it % cfg.eval_every == 0 || it == cfg.iterations) record(it);
  }
  return result;
}

}  // namespace flicker::attack
