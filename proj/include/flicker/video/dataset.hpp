#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "flicker/rng.hpp"
#include "flicker/video/tensor.hpp"

namespace flicker::video {

// Motion catalogue. Class k of a dataset renders motion pattern k.
enum class Motion : std::size_t {
  kTranslateRight = 0,
  kTranslateLeft = 1,
  kRotateClockwise = 2,
  kRotateCounterClockwise = 3,
  kExpand = 4,
  kContract = 5,
  kBrighten = 6,
  kDarken = 7,
};

inline constexpr std::size_t kMotionCount = 8;

const char* motion_name(Motion m);

struct SyntheticDatasetSpec {
  Dims dims{};
  std::size_t num_classes = 6;
  std::size_t clips_per_class = 20;
  double noise_sigma = 0.05;
  std::uint64_t seed = 1;

  // K in [2, 8], clips_per_class >= 1, noise_sigma >= 0, valid dims.
  void validate() const;
};

// Everything that distinguishes one rendering of a motion class from another.
// Lengths are in units of the shorter image side so a clip renders the same
// scene at any resolution.
struct ClipParams {
  Motion motion = Motion::kTranslateRight;
  double phase = 0.0;     // start offset (translation), start angle (rotation), radius offset (disc)
  double center_x = 0.5;  // object centre, fraction of width
  double center_y = 0.5;  // object centre, fraction of height
  double background = -0.4;
  double contrast = 1.0;
  std::array<double, 3> tint{};
  std::uint64_t noise_seed = 0;
};

// Draws the parameters of clip `index` of class `label`. Pure in its inputs.
ClipParams sample_clip_params(const SyntheticDatasetSpec& spec, std::size_t label, std::size_t index);

// Renders a clip: anti-aliased object over a flat background, Gaussian noise
// added before clipping to [v_min, v_max], values rounded to float32 so the
// clip survives an FLKV round trip bit-exactly.
VideoTensor render_clip(const ClipParams& params, const Dims& dims, double noise_sigma);

// A "similar scene": same motion class, object nudged by up to `amount`
// (in shorter-side units), background shifted by up to `amount`, phase
// nudged, fresh noise.
ClipParams jitter_params(const ClipParams& params, double amount, SplitMix64& rng);

// K * clips_per_class clips, class-major (all of class 0 first). Clip i uses
// the stream seed.split(i), so output is independent of evaluation order.
std::vector<LabeledVideo> generate_dataset(const SyntheticDatasetSpec& spec);

}  // namespace flicker::video
