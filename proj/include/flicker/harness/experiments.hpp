#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "flicker/attack/baselines.hpp"
#include "flicker/attack/driver.hpp"
#include "flicker/harness/config.hpp"
#include "flicker/ota/channel.hpp"
#include "flicker/video/dataset.hpp"

namespace flicker::harness {

// Training clips (spec.clips_per_class per class) and a disjoint held-out set
// (eval_per_class per class), both class-major. The render parameters of the
// held-out clips are kept so scenes can be re-rendered.
struct Splits {
  std::vector<video::LabeledVideo> train;
  std::vector<video::LabeledVideo> eval;
  std::vector<video::ClipParams> eval_params;
};
Splits make_splits(const video::SyntheticDatasetSpec& spec, std::size_t eval_per_class);

// Keeps the clips the model already classifies correctly.
struct Filtered {
  std::vector<video::LabeledVideo> kept;
  std::vector<std::size_t> indices;  // positions in the input
  std::size_t total = 0;
};
Filtered clean_filter(const diffnet::ModelParams& model, std::span<const video::LabeledVideo> data);

using Progress = std::function<void(const std::string&)>;

// An attack optimized on `train_set` and evaluated on `eval_set`.
struct Outcome {
  attack::AttackResult result;
  attack::EvalReport report;
};

// Universal or single-class attack (cfg.mode decides; single-class restricts
// both sets to cfg.attacked_class).
Outcome run_attack(const diffnet::ModelParams& model, std::span<const video::LabeledVideo> train_set,
                   std::span<const video::LabeledVideo> eval_set, const attack::AttackConfig& cfg,
                   const attack::TauMode& eval_mode);

// One single-video attack per clip; clip n uses seed cfg.seed split by n. The
// report of each run covers its own clip only.
std::vector<Outcome> run_single_video(const diffnet::ModelParams& model, std::span<const video::LabeledVideo> clips,
                                      const attack::AttackConfig& cfg, const Progress& progress = {});

// Repeated random baselines matched to a reference perturbation. Repeat r of
// kind k draws from SplitMix64(seed).split(k).split(r).
std::vector<attack::EvalReport> baseline_reports(attack::Baseline kind, const video::Perturbation& reference,
                                                 const diffnet::ModelParams& model,
                                                 std::span<const video::LabeledVideo> eval_set, std::size_t repeats,
                                                 std::uint64_t seed, const attack::TauMode& mode);

struct SweepPoint {
  double budget_pct = 0.0;
  Outcome universal;
  std::array<std::vector<attack::EvalReport>, 3> baselines;  // uniform, minmax, shuffle
};

// For each budget: a universal attack projected to that l-infinity budget,
// then `repeats` draws of each random baseline matched to it.
std::vector<SweepPoint> baseline_sweep(const diffnet::ModelParams& model,
                                       std::span<const video::LabeledVideo> train_set,
                                       std::span<const video::LabeledVideo> eval_set,
                                       const attack::AttackConfig& cfg, std::span<const double> budgets_pct,
                                       std::size_t repeats, const Progress& progress = {});

// cell[i][j]: perturbation i (developed on model i) evaluated on model j over
// eval_sets[j] (which should be clean-filtered for model j).
using TransferMatrix = std::array<std::array<attack::EvalReport, 2>, 2>;
TransferMatrix transfer_matrix(const std::array<const diffnet::ModelParams*, 2>& models,
                               const std::array<video::Perturbation, 2>& deltas,
                               const std::array<std::vector<video::LabeledVideo>, 2>& eval_sets,
                               const attack::TauMode& mode);

// Scene-based over-the-air trial: a single-video time-invariant attack is
// developed on a clean rendering, precompensated with a calibrated channel
// estimate, and transmitted through the true channel into a re-jittered
// rendering of the same scene. Up to settings.trials clips are attacked,
// spaced evenly through `clips`.
struct OtaTrial {
  std::size_t clip = 0;      // index into the clips passed in
  std::size_t label = 0;
  std::size_t predicted = 0;  // on the transmitted variant
  bool digital_fooled = false;
  bool fooled = false;
  double thickness_pct = 0.0;
  double roughness_pct = 0.0;
};

struct OtaOutcome {
  ota::CalibrationResult calibration;
  std::vector<OtaTrial> trials;
  std::size_t skipped = 0;  // scenes whose every jittered variant was misclassified clean
  double success_rate() const;
};

OtaOutcome scene_ota(const diffnet::ModelParams& model, std::span<const video::LabeledVideo> clips,
                     std::span<const video::ClipParams> params, const video::SyntheticDatasetSpec& spec,
                     const ota::ChannelModel& channel, const OtaSettings& settings,
                     const attack::AttackConfig& base, const Progress& progress = {});

}  // namespace flicker::harness
