#include "flicker/video/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "flicker/error.hpp"

namespace flicker::video {
namespace {

constexpr double kSquareHalf = 0.12;
constexpr double kTravel = 0.45;
constexpr double kBarHalfLength = 0.32;
constexpr double kBarHalfWidth = 0.06;
constexpr double kSweep = 0.8 * std::numbers::pi;
constexpr double kRadiusLow = 0.10;
constexpr double kRadiusHigh = 0.36;
constexpr double kRamp = 0.4;

double box_distance(double dx, double dy, double half_x, double half_y) {
  return std::max(std::abs(dx) - half_x, std::abs(dy) - half_y);
}

// Signed distance (pixels, negative inside) from a pixel centre to the
// object of frame t.
double object_distance(const ClipParams& p, const Dims& dims, double u, double px, double py) {
  const double side = static_cast<double>(std::min(dims.height, dims.width));
  const double w = static_cast<double>(dims.width);
  const double h = static_cast<double>(dims.height);
  double cx = p.center_x * w;
  const double cy = p.center_y * h;
  switch (p.motion) {
    case Motion::kTranslateRight:
      cx = (p.phase + kTravel * u) * w;
      return box_distance(px - cx, py - cy, kSquareHalf * side, kSquareHalf * side);
    case Motion::kTranslateLeft:
      cx = (p.phase - kTravel * u) * w;
      return box_distance(px - cx, py - cy, kSquareHalf * side, kSquareHalf * side);
    case Motion::kRotateClockwise:
    case Motion::kRotateCounterClockwise: {
      const double dir = p.motion == Motion::kRotateClockwise ? -1.0 : 1.0;
      const double angle = p.phase + dir * kSweep * u;
      const double dx = px - cx, dy = py - cy;
      const double along = dx * std::cos(angle) + dy * std::sin(angle);
      const double across = -dx * std::sin(angle) + dy * std::cos(angle);
      return box_distance(along, across, kBarHalfLength * side, kBarHalfWidth * side);
    }
    case Motion::kExpand:
    case Motion::kContract: {
      const double r = p.motion == Motion::kExpand ? kRadiusLow + p.phase + (kRadiusHigh - kRadiusLow) * u
                                                   : kRadiusHigh + p.phase - (kRadiusHigh - kRadiusLow) * u;
      return std::hypot(px - cx, py - cy) - r * side;
    }
    case Motion::kBrighten:
    case Motion::kDarken:
      return box_distance(px - cx, py - cy, kSquareHalf * side, kSquareHalf * side);
  }
  return 1e9;
}

double background_at(const ClipParams& p, double u) {
  if (p.motion == Motion::kBrighten) return p.background + kRamp * u;
  if (p.motion == Motion::kDarken) return p.background + kRamp * (1.0 - u);
  return p.background;
}

}  // namespace

const char* motion_name(Motion m) {
  switch (m) {
    case Motion::kTranslateRight: return "translate_right";
    case Motion::kTranslateLeft: return "translate_left";
    case Motion::kRotateClockwise: return "rotate_cw";
    case Motion::kRotateCounterClockwise: return "rotate_ccw";
    case Motion::kExpand: return "expand";
    case Motion::kContract: return "contract";
    case Motion::kBrighten: return "brighten";
    case Motion::kDarken: return "darken";
  }
  return "unknown";
}

void SyntheticDatasetSpec::validate() const {
  dims.validate();
  if (num_classes < 2 || num_classes > kMotionCount)
    throw ValidationError("dataset: num_classes must be in [2, " + std::to_string(kMotionCount) + "]");
  if (clips_per_class < 1) throw ValidationError("dataset: clips_per_class must be >= 1");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
    throw ValidationError("dataset: noise_sigma must be finite and >= 0");
}

ClipParams sample_clip_params(const SyntheticDatasetSpec& spec, std::size_t label, std::size_t index) {
  SplitMix64 rng = SplitMix64(spec.seed).split(label * spec.clips_per_class + index);
  ClipParams p;
  p.motion = static_cast<Motion>(label);
  switch (p.motion) {
    case Motion::kTranslateRight: p.phase = rng.uniform(0.20, 0.35); break;
    case Motion::kTranslateLeft: p.phase = rng.uniform(0.65, 0.80); break;
    case Motion::kRotateClockwise:
    case Motion::kRotateCounterClockwise: p.phase = rng.uniform(0.0, std::numbers::pi); break;
    case Motion::kExpand:
    case Motion::kContract: p.phase = rng.uniform(-0.03, 0.03); break;
    case Motion::kBrighten:
    case Motion::kDarken: p.phase = 0.0; break;
  }
  p.center_x = rng.uniform(0.40, 0.60);
  p.center_y = rng.uniform(0.30, 0.70);
  p.background = rng.uniform(-0.6, -0.2);
  p.contrast = rng.uniform(0.8, 1.2);
  for (double& t : p.tint) t = rng.uniform(-0.15, 0.15);
  p.noise_seed = rng();
  return p;
}

VideoTensor render_clip(const ClipParams& params, const Dims& dims, double noise_sigma) {
  dims.validate();
  SplitMix64 noise(params.noise_seed);
  std::vector<double> data(dims.volume());
  std::size_t i = 0;
  for (std::size_t t = 0; t < dims.frames; ++t) {
    const double u = static_cast<double>(t) / static_cast<double>(dims.frames - 1);
    const double bg = background_at(params, u);
    for (std::size_t y = 0; y < dims.height; ++y) {
      for (std::size_t x = 0; x < dims.width; ++x) {
        const double sd = object_distance(params, dims, u, x + 0.5, y + 0.5);
        const double coverage = std::clamp(0.5 - sd, 0.0, 1.0);
        for (std::size_t c = 0; c < dims.channels; ++c, ++i) {
          double v = bg + coverage * (params.contrast + params.tint[c]);
          if (noise_sigma > 0.0) v += noise_sigma * noise.normal();
          v = std::clamp(v, dims.v_min, dims.v_max);
          data[i] = static_cast<double>(static_cast<float>(v));
          // float rounding can step just outside the range; pull it back in
          if (data[i] < dims.v_min) data[i] = std::nextafter(static_cast<float>(dims.v_min), INFINITY);
          if (data[i] > dims.v_max) data[i] = std::nextafter(static_cast<float>(dims.v_max), -INFINITY);
        }
      }
    }
  }
  return VideoTensor(dims, std::move(data));
}

ClipParams jitter_params(const ClipParams& params, double amount, SplitMix64& rng) {
  ClipParams p = params;
  p.center_x += rng.uniform(-amount, amount);
  p.center_y += rng.uniform(-amount, amount);
  p.background += rng.uniform(-amount, amount);
  switch (p.motion) {
    case Motion::kTranslateRight:
    case Motion::kTranslateLeft: p.phase += rng.uniform(-amount, amount); break;
    case Motion::kRotateClockwise:
    case Motion::kRotateCounterClockwise: p.phase += std::numbers::pi * rng.uniform(-amount, amount); break;
    case Motion::kExpand:
    case Motion::kContract: p.phase += 0.5 * rng.uniform(-amount, amount); break;
    case Motion::kBrighten:
    case Motion::kDarken: break;
  }
  p.noise_seed = rng();
  return p;
}

std::vector<LabeledVideo> generate_dataset(const SyntheticDatasetSpec& spec) {
  spec.validate();
  std::vector<LabeledVideo> out;
  out.reserve(spec.num_classes * spec.clips_per_class);
  for (std::size_t k = 0; k < spec.num_classes; ++k) {
    for (std::size_t i = 0; i < spec.clips_per_class; ++i) {
      out.push_back({render_clip(sample_clip_params(spec, k, i), spec.dims, spec.noise_sigma), k});
    }
  }
  return out;
}

}  // namespace flicker::video
