#include "flicker/attack/evaluation.hpp"

#include <map>

#include "flicker/attack/objective.hpp"
#include "flicker/attack/temporal.hpp"
#include "flicker/diffnet/network.hpp"
#include "flicker/error.hpp"
#include "flicker/rng.hpp"

namespace flicker::attack {
namespace {

void check_set(const diffnet::ModelParams& params, std::span<const video::LabeledVideo> eval_set,
               const video::Perturbation& delta) {
  if (eval_set.empty()) throw ValidationError("fooling ratio: empty evaluation set");
  if (!video::compatible(delta.dims(), params.dims))
    throw ValidationError("fooling ratio: perturbation does not fit the model input");
  for (const auto& clip : eval_set)
    if (!(clip.video.dims() == params.dims)) throw ValidationError("fooling ratio: clip dims do not match the model");
}

bool fooled(const diffnet::ModelParams& params, const video::LabeledVideo& clip, const video::Perturbation& delta,
            long tau) {
  const video::VideoTensor x = apply_perturbation(clip.video, tau == 0 ? delta : roll(delta, tau));
  return diffnet::forward(params, x).top_class != clip.label;
}

// Per-clip fooled fraction (0/1, or the mean over shifts for sweep-all).
std::vector<double> fooled_fractions(const diffnet::ModelParams& params,
                                     std::span<const video::LabeledVideo> eval_set,
                                     const video::Perturbation& delta, const TauMode& mode,
                                     std::vector<double>* per_shift) {
  const std::size_t T = delta.frames();
  std::vector<double> out(eval_set.size(), 0.0);
  if (mode.kind == TauMode::Kind::kSweepAll) {
    if (per_shift) per_shift->assign(T, 0.0);
    for (std::size_t tau = 0; tau < T; ++tau) {
      const video::Perturbation rolled = roll(delta, static_cast<long>(tau));
      for (std::size_t n = 0; n < eval_set.size(); ++n) {
        const bool hit = fooled(params, eval_set[n], rolled, 0);
        out[n] += hit ? 1.0 : 0.0;
        if (per_shift && hit) (*per_shift)[tau] += 1.0;
      }
    }
    for (double& v : out) v /= static_cast<double>(T);
    if (per_shift)
      for (double& v : *per_shift) v /= static_cast<double>(eval_set.size());
    return out;
  }
  for (std::size_t n = 0; n < eval_set.size(); ++n)
    out[n] = fooled(params, eval_set[n], delta, tau_for_clip(mode, n, T)) ? 1.0 : 0.0;
  return out;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

std::string to_string(const TauMode& m) {
  switch (m.kind) {
    case TauMode::Kind::kSynchronized: return "synchronized";
    case TauMode::Kind::kRandom: return "random:" + std::to_string(m.seed);
    case TauMode::Kind::kSweepAll: return "sweep-all";
  }
  return "unknown";
}

TauMode parse_tau_mode(const std::string& text) {
  if (text == "synchronized" || text == "sync") return TauMode::synchronized();
  if (text == "sweep-all" || text == "sweep") return TauMode::sweep_all();
  if (text == "random") return TauMode::random(0);
  if (text.rfind("random:", 0) == 0) {
    try {
      return TauMode::random(std::stoull(text.substr(7)));
    } catch (const std::exception&) {
    }
  }
  throw ValidationError("unknown tau mode \"" + text + "\" (synchronized | random[:seed] | sweep-all)");
}

long tau_for_clip(const TauMode& mode, std::size_t clip_index, std::size_t frames) {
  if (mode.kind != TauMode::Kind::kRandom) return 0;
  return static_cast<long>(SplitMix64(mode.seed).split(clip_index).below(frames));
}

double fooling_ratio(const diffnet::ModelParams& params, std::span<const video::LabeledVideo> eval_set,
                     const video::Perturbation& delta, const TauMode& mode) {
  check_set(params, eval_set, delta);
  return mean(fooled_fractions(params, eval_set, delta, mode, nullptr));
}

std::vector<double> fooling_ratio_per_shift(const diffnet::ModelParams& params,
                                            std::span<const video::LabeledVideo> eval_set,
                                            const video::Perturbation& delta) {
  check_set(params, eval_set, delta);
  std::vector<double> per_shift;
  fooled_fractions(params, eval_set, delta, TauMode::sweep_all(), &per_shift);
  return per_shift;
}

EvalReport evaluate(const diffnet::ModelParams& params, std::span<const video::LabeledVideo> eval_set,
                    const video::Perturbation& delta, const TauMode& mode) {
  check_set(params, eval_set, delta);
  EvalReport r;
  const std::vector<double> hits = fooled_fractions(params, eval_set, delta, mode, &r.per_shift);
  r.fooling_ratio = mean(hits);
  const MetricsReport m = metrics(delta);
  r.thickness_pct = m.thickness_pct;
  r.roughness_pct = m.roughness_pct;
  r.linf_pct = m.linf_pct;
  r.tau_mode = mode;
  r.eval_size = eval_set.size();
  std::map<std::size_t, ClassTally> tallies;
  for (std::size_t n = 0; n < eval_set.size(); ++n) {
    ClassTally& t = tallies[eval_set[n].label];
    t.label = eval_set[n].label;
    ++t.total;
    t.fooled += hits[n];
  }
  for (const auto& [label, tally] : tallies) r.per_class.push_back(tally);
  return r;
}

}  // namespace flicker::attack
