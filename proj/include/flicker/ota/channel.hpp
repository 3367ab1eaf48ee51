#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <json.hpp>

#include "flicker/video/tensor.hpp"

namespace flicker::ota {

using Matrix3 = std::array<std::array<double, 3>, 3>;

// Bulb -> scene -> camera path for a per-frame RGB command trace:
//   u_t = M * delta_t + b                     chromatic crosstalk + ambient offset
//   s   = cyclic steady-state EMA_alpha(u)    finite rise / fall time of the bulb
//   e   = roll(s, phase)                      integer-frame desynchronization
//   out = clamp(v + e (broadcast) + N(0, sigma^2), v_min, v_max)
// The ambient offset b is measured relative to the illumination the clean
// scene was recorded under; the default 0 is a bulb idling at mid-range.
struct ChannelModel {
  Matrix3 crosstalk{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  double rise_alpha = 1.0;  // in (0, 1]; 1 means instantaneous response
  long phase = 0;
  std::array<double, 3> ambient{};
  double noise_sigma = 0.0;

  void validate() const;
  bool is_identity() const;
};

// Cyclic steady state of s_t = alpha * u_t + (1 - alpha) * s_{t-1} over a
// T-periodic input (t-major T x 3 trace).
std::vector<double> cyclic_ema(std::span<const double> trace, std::size_t frames, double alpha);

// Per-frame M * delta_t (no ambient, no dynamics).
std::vector<double> chromatic_stage(std::span<const double> trace, const Matrix3& m);

// The noiseless per-frame offset e seen by the camera.
video::Perturbation effective_offset(const video::Perturbation& delta, const ChannelModel& ch);

// Transmits delta into the scene `v`. With the identity channel (M = I,
// alpha = 1, phase 0, b = 0, sigma = 0) the result is bit-identical to
// attack::apply_perturbation(v, delta).
video::VideoTensor transmit(const video::VideoTensor& v, const video::Perturbation& delta, const ChannelModel& ch,
                            std::uint64_t seed);

// A probe command trace and the per-channel response the camera recorded.
struct CalibrationRecord {
  std::vector<double> sent;      // T x 3
  std::vector<double> observed;  // T x 3
};

struct CalibrationResult {
  ChannelModel model;        // noise_sigma set to the residual RMS
  double residual_rms = 0.0;
};

// Least-squares fit of M, b, alpha and the integer phase. For every candidate
// phase the recurrence obs_t = alpha M sent_{t+phase} + alpha b +
// (1 - alpha) obs_{t-1} is linear in (alpha M, alpha b, 1 - alpha); the phase
// with the smallest residual wins. Throws CalibrationError when the probes do
// not excite all three channels (rank-deficient design) or records disagree
// in length.
CalibrationResult calibrate(std::span<const CalibrationRecord> records);

// One single-channel rectangular pulse per channel: frames [1, 1 + width)
// at `amplitude`, zero elsewhere.
std::vector<CalibrationRecord> pulse_probes(std::size_t frames, double amplitude, std::size_t width);

// Fills the observed trace of each record by sending its probe through `ch`
// (noise drawn from seed when ch.noise_sigma > 0).
std::vector<CalibrationRecord> observe(std::vector<CalibrationRecord> probes, const ChannelModel& ch,
                                       std::uint64_t seed);

// Command trace whose chromatic stage reproduces delta: M^-1 delta_t, then
// clipped to the bulb's command range +-(v_max - v_min) / 2. Rise time is not
// inverted. Throws CalibrationError when cond(M) >= 1e6.
video::Perturbation precompensate(const video::Perturbation& delta, const ChannelModel& estimate,
                                  bool clip_to_command_range = true);

double condition_number(const Matrix3& m);

// flicker.channel v1: {schema, version, crosstalk [[...],[...],[...]], rise_alpha, phase,
//                      ambient [r,g,b], noise_sigma}
nlohmann::json to_json(const ChannelModel& ch);
ChannelModel channel_from_json(const nlohmann::json& j);

// CSV with header "frame,sent_r,sent_g,sent_b,observed_r,observed_g,observed_b";
// a new record starts whenever frame returns to 0.
void write_calibration_csv(const std::filesystem::path& path, std::span<const CalibrationRecord> records);
std::vector<CalibrationRecord> read_calibration_csv(const std::filesystem::path& path);

}  // namespace flicker::ota
