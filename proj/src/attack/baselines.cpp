#include "flicker/attack/baselines.hpp"

#include <algorithm>

#include "flicker/error.hpp"
#include "flicker/rng.hpp"

namespace flicker::attack {
namespace {

std::pair<double, double> bounds(const video::Perturbation& ref) {
  const auto [lo, hi] = std::minmax_element(ref.trace().begin(), ref.trace().end());
  return {*lo, *hi};
}

}  // namespace

video::Perturbation baseline_uniform(const video::Perturbation& ref, std::uint64_t seed) {
  const auto [lo, hi] = bounds(ref);
  SplitMix64 rng(seed);
  std::vector<double> t(ref.size());
  for (double& v : t) v = lo == hi ? lo : std::clamp(rng.uniform(lo, hi), lo, hi);
  return video::Perturbation(ref.dims(), std::move(t));
}

video::Perturbation baseline_minmax(const video::Perturbation& ref, std::uint64_t seed) {
  const auto [lo, hi] = bounds(ref);
  SplitMix64 rng(seed);
  std::vector<double> t(ref.size());
  for (double& v : t) v = rng.coin() ? hi : lo;
  return video::Perturbation(ref.dims(), std::move(t));
}

video::Perturbation baseline_shuffle(const video::Perturbation& ref, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<double> t(ref.trace().begin(), ref.trace().end());
  for (std::size_t i = t.size(); i > 1; --i) std::swap(t[i - 1], t[rng.below(i)]);
  return video::Perturbation(ref.dims(), std::move(t));
}

const char* baseline_name(Baseline b) {
  switch (b) {
    case Baseline::kUniform: return "random_uniform";
    case Baseline::kMinMax: return "random_minmax";
    case Baseline::kShuffle: return "flickering_shuffle";
  }
  return "unknown";
}

video::Perturbation make_baseline(Baseline kind, const video::Perturbation& ref, std::uint64_t seed) {
  switch (kind) {
    case Baseline::kUniform: return baseline_uniform(ref, seed);
    case Baseline::kMinMax: return baseline_minmax(ref, seed);
    case Baseline::kShuffle: return baseline_shuffle(ref, seed);
  }
  throw ValidationError("unknown baseline");
}

EvalReport transfer_eval(const video::Perturbation& delta, const diffnet::ModelParams& target,
                         std::span<const video::LabeledVideo> eval_set, const TauMode& mode) {
  if (!video::compatible(delta.dims(), target.dims))
    throw ValidationError("transfer: perturbation was developed for an incompatible input shape");
  return evaluate(target, eval_set, delta, mode);
}

}  // namespace flicker::attack
