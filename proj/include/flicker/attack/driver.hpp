#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flicker/attack/evaluation.hpp"
#include "flicker/attack/loss.hpp"
#include "flicker/attack/objective.hpp"
#include "flicker/diffnet/model.hpp"
#include "flicker/video/tensor.hpp"

namespace flicker::attack {

enum class AttackMode { kSingleVideo, kSingleClass, kUniversal };

const char* mode_name(AttackMode m);  // "single_video" | "single_class" | "universal"
AttackMode parse_mode(const std::string& name);

struct AttackConfig {
  AttackMode mode = AttackMode::kUniversal;
  std::size_t attacked_class = 0;  // kSingleClass: every clip must carry this label
  bool time_invariant = false;     // fresh random roll per clip per iteration
  MarginSpec margin{};
  RegWeights weights{};
  std::optional<double> zeta;      // l-infinity budget in gray levels
  std::size_t iterations = 300;
  std::size_t batch_size = 8;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 0;
  std::size_t eval_every = 10;

  // Defaults per mode: batch 8 for class/universal, 1 for single video.
  static AttackConfig defaults(AttackMode mode);
  void validate() const;
};

struct HistoryRecord {
  std::size_t iteration = 0;
  double loss = 0.0;
  double data_term = 0.0;
  double reg_term = 0.0;
  double top_probability = 0.0;       // mean over the attacked clips
  double original_probability = 0.0;  // mean probability of the true label
  double thickness_pct = 0.0;
  double roughness_pct = 0.0;
  double linf_pct = 0.0;
  double fooling_ratio = 0.0;
};

struct AttackResult {
  video::Perturbation delta;  // best evaluated checkpoint
  std::size_t best_iteration = 0;
  std::vector<HistoryRecord> history;
  AttackConfig config;
  std::uint64_t model_fingerprint = 0;
};

// Optimizes one perturbation against `model` on `data` with Adam, starting
// from zero. A checkpoint is evaluated on the whole of `data` at iteration 0,
// every eval_every iterations and after the last one; the returned delta is
// the checkpoint with the highest fooling ratio (lower thickness on ties).
// When cfg.zeta is set the perturbation is projected after every step.
// Time-invariant runs draw tau uniformly per clip per iteration and evaluate
// checkpoints under a fixed random alignment.
AttackResult attack(const diffnet::ModelParams& model, std::span<const video::LabeledVideo> data,
                    const AttackConfig& cfg, const std::function<void(const HistoryRecord&)>& on_eval = {});

// Clips of one class; throws ValidationError when there are none.
std::vector<video::LabeledVideo> select_class(std::span<const video::LabeledVideo> data, std::size_t label);

}  // namespace flicker::attack
