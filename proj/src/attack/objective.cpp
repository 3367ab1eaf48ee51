#include "flicker/attack/objective.hpp"

#include <algorithm>
#include <cmath>

#include "flicker/attack/temporal.hpp"
#include "flicker/diffnet/network.hpp"
#include "flicker/error.hpp"
#include "flicker/rng.hpp"

namespace flicker::attack {
namespace {

void check_compatible(const video::Perturbation& delta, const video::Dims& clip) {
  if (!video::compatible(delta.dims(), clip))
    throw ShapeError("perturbation (T=" + std::to_string(delta.frames()) + ") does not fit clip (T=" +
                     std::to_string(clip.frames) + ")");
}

// Clamped sum of clip and (already rolled) trace.
void perturb(std::span<const double> clip, const video::Dims& d, std::span<const double> trace,
             std::vector<double>& out) {
  out.resize(clip.size());
  const std::size_t pixels = d.height * d.width;
  std::size_t i = 0;
  for (std::size_t t = 0; t < d.frames; ++t) {
    const double* off = trace.data() + t * video::kChannels;
    for (std::size_t p = 0; p < pixels; ++p)
      for (std::size_t c = 0; c < video::kChannels; ++c, ++i) out[i] = std::clamp(clip[i] + off[c], d.v_min, d.v_max);
  }
}

}  // namespace

void RegWeights::validate() const {
  for (double w : {lambda, beta1, beta2})
    if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("regularization weights must be finite and >= 0");
}

video::VideoTensor apply_perturbation(const video::VideoTensor& v, const video::Perturbation& delta) {
  check_compatible(delta, v.dims());
  std::vector<double> out;
  perturb(v.data(), v.dims(), delta.trace(), out);
  return video::VideoTensor(v.dims(), std::move(out));
}

ObjectiveValue objective(const video::Perturbation& delta, std::span<const video::LabeledVideo> batch,
                         const diffnet::ModelParams& params, const RegWeights& weights, const MarginSpec& spec,
                         std::optional<std::span<const long>> taus, bool with_gradient) {
  if (batch.empty()) throw ValidationError("objective: empty batch");
  if (taus && taus->size() != batch.size()) throw ValidationError("objective: need one shift per clip");
  weights.validate();
  spec.validate(params.num_classes);
  check_compatible(delta, params.dims);

  const video::Dims& d = params.dims;
  const std::size_t T = d.frames;
  const std::size_t pixels = d.height * d.width;
  const std::size_t n_trace = delta.size();

  ObjectiveValue out;
  if (weights.lambda > 0.0) {
    const double d1 = weights.beta1 > 0.0 ? thickness_reg(delta) : 0.0;
    const double d2 = weights.beta2 > 0.0 ? roughness_reg(delta) : 0.0;
    out.reg_term = weights.lambda * (weights.beta1 * d1 + weights.beta2 * d2);
  }

  std::vector<double> losses(batch.size());
  std::vector<std::vector<double>> grads(with_gradient ? batch.size() : 0);
  std::vector<std::uint64_t> keys(batch.size());
  std::vector<double> perturbed;
  out.predictions.reserve(batch.size());

  for (std::size_t n = 0; n < batch.size(); ++n) {
    const auto& clip = batch[n];
    if (!(clip.video.dims() == d)) throw ShapeError("objective: clip dims do not match the model");
    const long tau = taus ? (*taus)[n] : 0;
    const std::vector<double> rolled = roll(delta.trace(), T, tau);
    perturb(clip.video.data(), d, rolled, perturbed);

    MarginSpec clip_spec = spec;
    if (spec.direction == Direction::kUntargeted) clip_spec.cls = clip.label;

    const diffnet::Tape tape = diffnet::record_forward(params, perturbed);
    const diffnet::LossGrad lg = margin_loss_grad(tape.prediction, clip_spec);
    losses[n] = lg.value;
    out.predictions.push_back(tape.prediction);
    keys[n] = diffnet::clip_hash(clip.video.data(), clip.label) ^ SplitMix64::mix(static_cast<std::uint64_t>(tau));
    if (!with_gradient) continue;

    std::vector<double>& g = grads[n];
    g.assign(n_trace, 0.0);
    if (lg.value == 0.0 && std::all_of(lg.d_logits.begin(), lg.d_logits.end(), [](double x) { return x == 0.0; }))
      continue;
    const std::vector<double> gx = diffnet::backward_to_input(params, tape, lg.d_logits);
    const std::size_t shift = static_cast<std::size_t>(((tau % static_cast<long>(T)) + static_cast<long>(T)) %
                                                       static_cast<long>(T));
    std::size_t i = 0;
    for (std::size_t t = 0; t < T; ++t) {
      double acc[video::kChannels] = {0.0, 0.0, 0.0};
      for (std::size_t p = 0; p < pixels; ++p) {
        for (std::size_t c = 0; c < video::kChannels; ++c, ++i) {
          const double raw = clip.video.data()[i] + rolled[t * video::kChannels + c];
          if (raw >= d.v_min && raw <= d.v_max) acc[c] += gx[i];
        }
      }
      // rolled frame t carries delta frame (t + tau) mod T
      const std::size_t src = (t + shift) % T;
      for (std::size_t c = 0; c < video::kChannels; ++c) g[src * video::kChannels + c] += acc[c];
    }
  }

  const double inv = 1.0 / static_cast<double>(batch.size());
  if (with_gradient) out.grad.assign(n_trace, 0.0);
  for (std::size_t n : diffnet::canonical_order(keys)) {
    out.data_term += losses[n];
    if (with_gradient)
      for (std::size_t k = 0; k < n_trace; ++k) out.grad[k] += grads[n][k];
  }
  out.data_term *= inv;
  if (with_gradient) {
    for (double& v : out.grad) v *= inv;
    if (weights.lambda > 0.0) {
      if (weights.beta1 > 0.0) {
        const auto g1 = thickness_reg_grad(delta);
        for (std::size_t k = 0; k < n_trace; ++k) out.grad[k] += weights.lambda * weights.beta1 * g1[k];
      }
      if (weights.beta2 > 0.0) {
        const auto g2 = roughness_reg_grad(delta);
        for (std::size_t k = 0; k < n_trace; ++k) out.grad[k] += weights.lambda * weights.beta2 * g2[k];
      }
    }
  }
  out.loss = out.reg_term + out.data_term;
  return out;
}

}  // namespace flicker::attack
