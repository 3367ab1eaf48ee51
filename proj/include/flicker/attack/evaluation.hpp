#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "flicker/diffnet/model.hpp"
#include "flicker/video/tensor.hpp"

namespace flicker::attack {

// How the perturbation is aligned with each evaluation clip.
struct TauMode {
  enum class Kind { kSynchronized, kRandom, kSweepAll };
  Kind kind = Kind::kSynchronized;
  std::uint64_t seed = 0;  // kRandom only: clip n uses SplitMix64(seed).split(n)

  static TauMode synchronized() { return {Kind::kSynchronized, 0}; }
  static TauMode random(std::uint64_t seed) { return {Kind::kRandom, seed}; }
  static TauMode sweep_all() { return {Kind::kSweepAll, 0}; }
};

std::string to_string(const TauMode& m);        // "synchronized", "random:<seed>", "sweep-all"
TauMode parse_tau_mode(const std::string& text);  // inverse of to_string

// The shift applied to clip n under kSynchronized / kRandom.
long tau_for_clip(const TauMode& mode, std::size_t clip_index, std::size_t frames);

// Fraction of clips whose prediction on X + roll(delta, tau) differs from the
// label. The set is expected to hold only clips the model classifies
// correctly when clean. kSweepAll averages over every shift 0..T-1.
double fooling_ratio(const diffnet::ModelParams& params, std::span<const video::LabeledVideo> eval_set,
                     const video::Perturbation& delta, const TauMode& mode);

// Fooling ratio at each fixed shift tau = 0..T-1.
std::vector<double> fooling_ratio_per_shift(const diffnet::ModelParams& params,
                                            std::span<const video::LabeledVideo> eval_set,
                                            const video::Perturbation& delta);

struct ClassTally {
  std::size_t label = 0;
  std::size_t total = 0;
  double fooled = 0.0;  // averaged over shifts under kSweepAll
};

struct EvalReport {
  double fooling_ratio = 0.0;
  double thickness_pct = 0.0;
  double roughness_pct = 0.0;
  double linf_pct = 0.0;
  TauMode tau_mode;
  std::size_t eval_size = 0;           // M
  std::vector<ClassTally> per_class;   // labels present in the set, ascending
  std::vector<double> per_shift;       // filled under kSweepAll
};

EvalReport evaluate(const diffnet::ModelParams& params, std::span<const video::LabeledVideo> eval_set,
                    const video::Perturbation& delta, const TauMode& mode);

}  // namespace flicker::attack
