#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "flicker/attack/loss.hpp"
#include "flicker/diffnet/model.hpp"
#include "flicker/diffnet/network.hpp"
#include "flicker/video/tensor.hpp"

namespace flicker::attack {

// lambda scales the whole regularizer; beta1 weighs thickness, beta2 roughness.
struct RegWeights {
  double lambda = 1.0;
  double beta1 = 0.5;
  double beta2 = 0.5;

  void validate() const;
};

// out[t,h,w,c] = clamp(v[t,h,w,c] + delta[t,c], v_min, v_max).
video::VideoTensor apply_perturbation(const video::VideoTensor& v, const video::Perturbation& delta);

struct ObjectiveValue {
  double loss = 0.0;        // reg_term + data_term
  double reg_term = 0.0;    // lambda * (beta1 * D1 + beta2 * D2)
  double data_term = 0.0;   // mean margin loss over the batch
  std::vector<double> grad; // d loss / d delta, T x 3 (empty when not requested)
  std::vector<diffnet::Prediction> predictions;  // per clip, batch order
};

// lambda * (beta1 D1 + beta2 D2) + (1/N) sum_n l(F(X_n + roll(delta, tau_n)), t_n).
//
// For untargeted specs the margin class of clip n is its label; for targeted
// specs it is spec.cls for every clip. `taus`, when given, holds one shift per
// clip. The gradient is exact: the clamp contributes 0 where the perturbed
// pixel leaves [v_min, v_max] (strictly) and 1 otherwise, the spatial
// broadcast contributes a sum over H x W, and the roll is undone before
// accumulation. Per-clip terms are reduced in a content-defined order.
ObjectiveValue objective(const video::Perturbation& delta, std::span<const video::LabeledVideo> batch,
                         const diffnet::ModelParams& params, const RegWeights& weights, const MarginSpec& spec,
                         std::optional<std::span<const long>> taus = std::nullopt, bool with_gradient = true);

}  // namespace flicker::attack
