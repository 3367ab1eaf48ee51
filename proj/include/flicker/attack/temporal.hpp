#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "flicker/video/tensor.hpp"

namespace flicker::attack {

// Cyclic shift along the leading (time) axis of a t-major buffer holding
// `frames` equal-size frames: out[i] = in[(i + tau) mod T]. Any integer tau.
std::vector<double> roll(std::span<const double> x, std::size_t frames, long tau);
video::Perturbation roll(const video::Perturbation& p, long tau);
video::VideoTensor roll(const video::VideoTensor& v, long tau);

// First difference roll(x, 1) - x. Needs T >= 2.
std::vector<double> temporal_diff1(std::span<const double> x, std::size_t frames);
// Second difference roll(x, -1) - 2x + roll(x, 1). Needs T >= 3.
std::vector<double> temporal_diff2(std::span<const double> x, std::size_t frames);
video::Perturbation temporal_diff1(const video::Perturbation& p);
video::Perturbation temporal_diff2(const video::Perturbation& p);

// Sum |x|^p over all elements, raised to 1/p (p >= 1).
double p_norm(std::span<const double> x, double p);

// Thickness regularizer: ||delta||_2^2 / 3T.
double thickness_reg(const video::Perturbation& delta);
std::vector<double> thickness_reg_grad(const video::Perturbation& delta);

// Roughness regularizer: (||diff1||_2^2 + ||diff2||_2^2) / 3T. Needs T >= 3.
double roughness_reg(const video::Perturbation& delta);
std::vector<double> roughness_reg_grad(const video::Perturbation& delta);

// Mean absolute per-pixel amplitude ||delta||_1 / 3T, in gray levels.
double metric_thickness(const video::Perturbation& delta);
// Mean absolute first difference ||diff1||_1 / 3T, in gray levels.
double metric_roughness(const video::Perturbation& delta);
// max |delta| in gray levels.
double metric_linf(const video::Perturbation& delta);
// gray-level value as a percentage of (v_max - v_min).
double to_percent(double gray_level, const video::Dims& dims);

struct MetricsReport {
  double thickness_pct = 0.0;
  double roughness_pct = 0.0;
  double linf_pct = 0.0;
};
MetricsReport metrics(const video::Perturbation& delta);

// Elementwise clamp to [-zeta, zeta]. zeta must be > 0.
video::Perturbation project_linf(const video::Perturbation& delta, double zeta);

// zeta for an l-infinity budget given in percent of the intensity range.
double zeta_from_percent(double linf_pct, const video::Dims& dims);

}  // namespace flicker::attack
