#pragma once

#include <cstddef>

#include "flicker/diffnet/network.hpp"

namespace flicker::attack {

enum class MarginSpace {
  kProbability,  // margin and gradient both in probability space (default)
  kLogit,        // margin tested on probabilities, gradient taken through the logit gap
};

enum class Direction {
  kUntargeted,  // push class `cls` (the true label) below the runner-up
  kTargeted,    // pull class `cls` (the target) above every other class
};

struct MarginSpec {
  double margin = 0.05;
  MarginSpace space = MarginSpace::kProbability;
  Direction direction = Direction::kUntargeted;
  std::size_t cls = 0;

  // margin > 0 and finite; cls < num_classes; num_classes >= 2.
  void validate(std::size_t num_classes) const;
};

// Signed gap l_m. Untargeted: y_c - max_{i != c} y_i + m. Targeted:
// max_{i != c} y_i - y_c + m. Always evaluated on probabilities.
double margin_gap(const diffnet::Prediction& pred, const MarginSpec& spec);

// max(0, min(l_m^2 / m, l_m)).
double margin_loss(const diffnet::Prediction& pred, const MarginSpec& spec);

// Loss value plus its derivative w.r.t. the logits. In logit space the
// returned gradient is slope(l_m) * d(z_c - z_j)/dz (untargeted; sign flipped
// for targeted), with j the runner-up class: a surrogate, not the exact
// derivative of the value.
diffnet::LossGrad margin_loss_grad(const diffnet::Prediction& pred, const MarginSpec& spec);

}  // namespace flicker::attack
