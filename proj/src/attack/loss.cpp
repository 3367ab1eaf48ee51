#include "flicker/attack/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flicker/error.hpp"

namespace flicker::attack {
namespace {

// Most probable class other than `cls`, lowest index on ties.
std::size_t runner_up(const std::vector<double>& y, std::size_t cls) {
  std::size_t best = cls == 0 ? 1 : 0;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (i != cls && y[i] > y[best]) best = i;
  return best;
}

double piecewise(double gap, double m) { return std::max(0.0, std::min(gap * gap / m, gap)); }

// d loss / d gap.
double piecewise_slope(double gap, double m) {
  if (gap <= 0.0) return 0.0;
  if (gap < m) return 2.0 * gap / m;
  return 1.0;
}

}  // namespace

void MarginSpec::validate(std::size_t num_classes) const {
  if (num_classes < 2) throw ValidationError("margin loss needs at least 2 classes");
  if (!(margin > 0.0) || !std::isfinite(margin)) throw ValidationError("margin must be finite and > 0");
  if (cls >= num_classes)
    throw ValidationError("margin class " + std::to_string(cls) + " out of range for " +
                          std::to_string(num_classes) + " classes");
}

double margin_gap(const diffnet::Prediction& pred, const MarginSpec& spec) {
  spec.validate(pred.probabilities.size());
  const auto& y = pred.probabilities;
  const double other = y[runner_up(y, spec.cls)];
  const double gap = spec.direction == Direction::kUntargeted ? y[spec.cls] - other : other - y[spec.cls];
  return gap + spec.margin;
}

double margin_loss(const diffnet::Prediction& pred, const MarginSpec& spec) {
  return piecewise(margin_gap(pred, spec), spec.margin);
}

diffnet::LossGrad margin_loss_grad(const diffnet::Prediction& pred, const MarginSpec& spec) {
  const double gap = margin_gap(pred, spec);
  const auto& y = pred.probabilities;
  const std::size_t k = y.size();
  const std::size_t j = runner_up(y, spec.cls);
  const double sign = spec.direction == Direction::kUntargeted ? 1.0 : -1.0;
  const double slope = piecewise_slope(gap, spec.margin);

  diffnet::LossGrad out;
  out.value = piecewise(gap, spec.margin);
  out.d_logits.assign(k, 0.0);
  if (slope == 0.0) return out;

  if (spec.space == MarginSpace::kLogit) {
    out.d_logits[spec.cls] += sign * slope;
    out.d_logits[j] -= sign * slope;
    return out;
  }
  // d gap / d y, then through the softmax Jacobian: dz_i = y_i (g_i - <y, g>).
  std::vector<double> g(k, 0.0);
  g[spec.cls] = sign * slope;
  g[j] = -sign * slope;
  const double dot = y[spec.cls] * g[spec.cls] + y[j] * g[j];
  for (std::size_t i = 0; i < k; ++i) out.d_logits[i] = y[i] * (g[i] - dot);
  return out;
}

}  // namespace flicker::attack
