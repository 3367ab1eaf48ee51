#include "flicker/harness/experiments.hpp"

#include <cstdio>

#include "flicker/attack/temporal.hpp"
#include "flicker/diffnet/network.hpp"
#include "flicker/error.hpp"
#include "flicker/rng.hpp"

namespace flicker::harness {

Splits make_splits(const video::SyntheticDatasetSpec& spec, std::size_t eval_per_class) {
  spec.validate();
  if (eval_per_class < 1) throw ValidationError("make_splits: eval_per_class must be >= 1");
  video::SyntheticDatasetSpec joint = spec;
  joint.clips_per_class = spec.clips_per_class + eval_per_class;
  Splits s;
  for (std::size_t k = 0; k < spec.num_classes; ++k) {
    for (std::size_t i = 0; i < joint.clips_per_class; ++i) {
      const video::ClipParams p = video::sample_clip_params(joint, k, i);
      video::LabeledVideo clip{video::render_clip(p, spec.dims, spec.noise_sigma), k};
      if (i < spec.clips_per_class) {
        s.train.push_back(std::move(clip));
      } else {
        s.eval.push_back(std::move(clip));
        s.eval_params.push_back(p);
      }
    }
  }
  return s;
}

Filtered clean_filter(const diffnet::ModelParams& model, std::span<const video::LabeledVideo> data) {
  Filtered f;
  f.total = data.size();
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (diffnet::forward(model, data[i].video).top_class == data[i].label) {
      f.kept.push_back(data[i]);
      f.indices.push_back(i);
    }
  }
  return f;
}

Outcome run_attack(const diffnet::ModelParams& model, std::span<const video::LabeledVideo> train_set,
                   std::span<const video::LabeledVideo> eval_set, const attack::AttackConfig& cfg,
                   const attack::TauMode& eval_mode) {
  Outcome o;
  if (cfg.mode == attack::AttackMode::kSingleClass) {
    const auto train_c = attack::select_class(train_set, cfg.attacked_class);
    const auto eval_c = attack::select_class(eval_set, cfg.attacked_class);
    o.result = attack::attack(model, train_c, cfg);
    o.report = attack::evaluate(model, eval_c, o.result.delta, eval_mode);
  } else {
    o.result = attack::attack(model, train_set, cfg);
    o.report = attack::evaluate(model, eval_set, o.result.delta, eval_mode);
  }
  return o;
}

std::vector<Outcome> run_single_video(const diffnet::ModelParams& model, std::span<const video::LabeledVideo> clips,
                                      const attack::AttackConfig& cfg, const Progress& progress) {
  std::vector<Outcome> out;
  const SplitMix64 root(cfg.seed);
  for (std::size_t n = 0; n < clips.size(); ++n) {
    attack::AttackConfig c = cfg;
    c.mode = attack::AttackMode::kSingleVideo;
    c.seed = root.split(n)();
    Outcome o;
    o.result = attack::attack(model, clips.subspan(n, 1), c);
    const attack::TauMode mode =
        cfg.time_invariant ? attack::TauMode::sweep_all() : attack::TauMode::synchronized();
    o.report = attack::evaluate(model, clips.subspan(n, 1), o.result.delta, mode);
    if (progress) {
      char line[160];
      std::snprintf(line, sizeof line, "clip %zu/%zu label %zu fooled %.2f thickness %.2f%%", n + 1, clips.size(),
                    clips[n].label, o.report.fooling_ratio, o.report.thickness_pct);
      progress(line);
    }
    out.push_back(std::move(o));
  }
  return out;
}

std::vector<attack::EvalReport> baseline_reports(attack::Baseline kind, const video::Perturbation& reference,
                                                 const diffnet::ModelParams& model,
                                                 std::span<const video::LabeledVideo> eval_set, std::size_t repeats,
                                                 std::uint64_t seed, const attack::TauMode& mode) {
  const SplitMix64 stream = SplitMix64(seed).split(static_cast<std::uint64_t>(kind));
  std::vector<attack::EvalReport> out;
  for (std::size_t r = 0; r < repeats; ++r) {
    const video::Perturbation d = attack::make_baseline(kind, reference, stream.split(r)());
    out.push_back(attack::evaluate(model, eval_set, d, mode));
  }
  return out;
}

std::vector<SweepPoint> baseline_sweep(const diffnet::ModelParams& model,
                                       std::span<const video::LabeledVideo> train_set,
                                       std::span<const video::LabeledVideo> eval_set,
                                       const attack::AttackConfig& cfg, std::span<const double> budgets_pct,
                                       std::size_t repeats, const Progress& progress) {
  std::vector<SweepPoint> out;
  const attack::TauMode mode = attack::TauMode::synchronized();
  const SplitMix64 root(cfg.seed);
  for (std::size_t b = 0; b < budgets_pct.size(); ++b) {
    SweepPoint p;
    p.budget_pct = budgets_pct[b];
    attack::AttackConfig c = cfg;
    c.zeta = attack::zeta_from_percent(budgets_pct[b], model.dims);
    p.universal = run_attack(model, train_set, eval_set, c, mode);
    const std::uint64_t baseline_seed = root.split(0x62617365ULL + b)();
    for (attack::Baseline kind :
         {attack::Baseline::kUniform, attack::Baseline::kMinMax, attack::Baseline::kShuffle}) {
      p.baselines[static_cast<std::size_t>(kind)] =
          baseline_reports(kind, p.universal.result.delta, model, eval_set, repeats, baseline_seed, mode);
    }
    if (progress) {
      char line[160];
      std::snprintf(line, sizeof line, "budget %.3g%%: universal fooling %.3f", p.budget_pct,
                    p.universal.report.fooling_ratio);
      progress(line);
    }
    out.push_back(std::move(p));
  }
  return out;
}

TransferMatrix transfer_matrix(const std::array<const diffnet::ModelParams*, 2>& models,
                               const std::array<video::Perturbation, 2>& deltas,
                               const std::array<std::vector<video::LabeledVideo>, 2>& eval_sets,
                               const attack::TauMode& mode) {
  TransferMatrix m;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) m[i][j] = attack::transfer_eval(deltas[i], *models[j], eval_sets[j], mode);
  return m;
}

double OtaOutcome::success_rate() const {
  if (trials.empty()) return 0.0;
  std::size_t fooled = 0;
  for (const OtaTrial& t : trials) fooled += t.fooled ? 1 : 0;
  return static_cast<double>(fooled) / static_cast<double>(trials.size());
}

OtaOutcome scene_ota(const diffnet::ModelParams& model, std::span<const video::LabeledVideo> clips,
                     std::span<const video::ClipParams> params, const video::SyntheticDatasetSpec& spec,
                     const ota::ChannelModel& channel, const OtaSettings& settings,
                     const attack::AttackConfig& base, const Progress& progress) {
  if (clips.size() != params.size()) throw ValidationError("scene_ota: need render parameters for every clip");
  channel.validate();
  const SplitMix64 root(base.seed);
  const std::size_t frames = model.dims.frames;

  OtaOutcome out;
  const auto probes = ota::pulse_probes(frames, settings.probe_amplitude, settings.probe_width);
  const auto recorded = ota::observe(probes, channel, root.split(0x63616c)());
  out.calibration = ota::calibrate(recorded);

  attack::AttackConfig cfg = base;
  cfg.mode = attack::AttackMode::kSingleVideo;
  cfg.batch_size = 1;
  cfg.time_invariant = true;
  cfg.margin.margin = settings.attack_margin;
  cfg.iterations = settings.attack_iterations;
  cfg.learning_rate = settings.attack_learning_rate;

  const std::size_t n = std::min(settings.trials, clips.size());
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = k * clips.size() / n;  // spread over class-major sets
    const SplitMix64 trial = root.split(0x6f7461ULL).split(k);
    cfg.seed = trial.split(0)();
    const attack::AttackResult r = attack::attack(model, clips.subspan(i, 1), cfg);

    // re-roll the scene until the model recognises the clean variant
    SplitMix64 jitter = trial.split(1);
    std::optional<video::VideoTensor> variant;
    for (int attempt = 0; attempt < 8 && !variant; ++attempt) {
      video::VideoTensor v = video::render_clip(video::jitter_params(params[i], settings.jitter, jitter), spec.dims,
                                                spec.noise_sigma);
      if (diffnet::forward(model, v).top_class == clips[i].label) variant = std::move(v);
    }
    if (!variant) {
      ++out.skipped;
      continue;
    }

    const video::Perturbation command = ota::precompensate(r.delta, out.calibration.model);
    const video::VideoTensor received = ota::transmit(*variant, command, channel, trial.split(2)());
    OtaTrial t;
    t.clip = i;
    t.label = clips[i].label;
    t.predicted = diffnet::forward(model, received).top_class;
    t.fooled = t.predicted != t.label;
    t.digital_fooled = attack::fooling_ratio(model, clips.subspan(i, 1), r.delta, attack::TauMode::sweep_all()) == 1.0;
    const attack::MetricsReport m = attack::metrics(r.delta);
    t.thickness_pct = m.thickness_pct;
    t.roughness_pct = m.roughness_pct;
    out.trials.push_back(t);
    if (progress) {
      char line[160];
      std::snprintf(line, sizeof line, "trial %zu/%zu label %zu -> %zu (%s)", k + 1, n, t.label, t.predicted,
                    t.fooled ? "fooled" : "not fooled");
      progress(line);
    }
  }
  return out;
}

}  // namespace flicker::harness
