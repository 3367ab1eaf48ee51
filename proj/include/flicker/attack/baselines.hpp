#pragma once

#include <cstdint>
#include <span>

#include "flicker/attack/evaluation.hpp"
#include "flicker/video/tensor.hpp"

namespace flicker::attack {

// Random flickers matched to a reference perturbation.

// Every element i.i.d. uniform on [min ref, max ref].
video::Perturbation baseline_uniform(const video::Perturbation& ref, std::uint64_t seed);
// Every element min ref or max ref with a fair coin.
video::Perturbation baseline_minmax(const video::Perturbation& ref, std::uint64_t seed);
// Uniform random permutation of all 3T elements (Fisher-Yates).
video::Perturbation baseline_shuffle(const video::Perturbation& ref, std::uint64_t seed);

enum class Baseline { kUniform, kMinMax, kShuffle };
const char* baseline_name(Baseline b);
video::Perturbation make_baseline(Baseline kind, const video::Perturbation& ref, std::uint64_t seed);

// Fooling ratio of a perturbation developed on one model when applied to
// another model with the same input shape. Throws ValidationError on
// incompatible inputs.
EvalReport transfer_eval(const video::Perturbation& delta, const diffnet::ModelParams& target,
                         std::span<const video::LabeledVideo> eval_set, const TauMode& mode);

}  // namespace flicker::attack
