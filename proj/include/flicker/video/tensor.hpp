#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace flicker::video {

inline constexpr std::size_t kChannels = 3;

// Shape and intensity range of a clip.
struct Dims {
  std::size_t frames = 16;
  std::size_t height = 32;
  std::size_t width = 32;
  std::size_t channels = kChannels;
  double v_min = -1.0;
  double v_max = 1.0;

  // Throws ValidationError unless frames >= 2, height/width >= 1,
  // channels == 3 and v_min < v_max (both finite).
  void validate() const;

  std::size_t frame_size() const { return height * width * channels; }
  std::size_t volume() const { return frames * frame_size(); }
  double range() const { return v_max - v_min; }

  bool operator==(const Dims&) const = default;
};

// T x H x W x C clip, stored t-major then h, w, c. Values always lie in
// [v_min, v_max].
class VideoTensor {
 public:
  VideoTensor() = default;
  explicit VideoTensor(const Dims& dims);  // filled with the mid-range level
  VideoTensor(const Dims& dims, std::vector<double> data);

  const Dims& dims() const { return dims_; }
  std::span<const double> data() const { return data_; }
  std::size_t size() const { return data_.size(); }

  std::size_t index(std::size_t t, std::size_t h, std::size_t w, std::size_t c) const {
    return ((t * dims_.height + h) * dims_.width + w) * dims_.channels + c;
  }
  double at(std::size_t t, std::size_t h, std::size_t w, std::size_t c) const {
    return data_[index(t, h, w, c)];
  }

  bool operator==(const VideoTensor&) const = default;

 private:
  Dims dims_{};
  std::vector<double> data_;
};

struct LabeledVideo {
  VideoTensor video;
  std::size_t label = 0;
  bool operator==(const LabeledVideo&) const = default;
};

// Per-frame, spatially uniform RGB offset: T x 3 reals, t-major. The dims
// carry the clip's frame count and intensity range with a 1x1 spatial
// extent.
class Perturbation {
 public:
  Perturbation() = default;
  explicit Perturbation(const Dims& clip_dims);  // all zero
  Perturbation(const Dims& clip_dims, std::vector<double> trace);

  const Dims& dims() const { return dims_; }
  std::size_t frames() const { return dims_.frames; }
  std::span<const double> trace() const { return trace_; }
  std::span<double> trace() { return trace_; }
  std::size_t size() const { return trace_.size(); }

  double operator()(std::size_t t, std::size_t c) const { return trace_[t * kChannels + c]; }
  double& operator()(std::size_t t, std::size_t c) { return trace_[t * kChannels + c]; }

  bool operator==(const Perturbation&) const = default;

 private:
  Dims dims_{};
  std::vector<double> trace_;
};

// Dims with the spatial extent collapsed to 1x1, as carried by a Perturbation.
Dims perturbation_dims(const Dims& clip_dims);

// True when a perturbation built for `pert` can be added to a clip of `clip`.
bool compatible(const Dims& pert, const Dims& clip);

}  // namespace flicker::video
