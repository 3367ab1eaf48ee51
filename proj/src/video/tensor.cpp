#include "flicker/video/tensor.hpp"

#include <cmath>
#include <string>

#include "flicker/error.hpp"

namespace flicker::video {

void Dims::validate() const {
  if (frames < 2) throw ValidationError("dims: frame count must be >= 2, got " + std::to_string(frames));
  if (height < 1 || width < 1) throw ValidationError("dims: spatial size must be >= 1");
  if (channels != kChannels)
    throw ValidationError("dims: channel count must be 3, got " + std::to_string(channels));
  if (!std::isfinite(v_min) || !std::isfinite(v_max) || !(v_min < v_max))
    throw ValidationError("dims: need finite v_min < v_max");
}

VideoTensor::VideoTensor(const Dims& dims) : dims_(dims) {
  dims_.validate();
  data_.assign(dims_.volume(), 0.5 * (dims_.v_min + dims_.v_max));
}

VideoTensor::VideoTensor(const Dims& dims, std::vector<double> data) : dims_(dims), data_(std::move(data)) {
  dims_.validate();
  if (data_.size() != dims_.volume())
    throw ShapeError("video: expected " + std::to_string(dims_.volume()) + " values, got " +
                     std::to_string(data_.size()));
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const double v = data_[i];
    if (!(v >= dims_.v_min && v <= dims_.v_max))
      throw ValidationError("video: element " + std::to_string(i) + " outside [v_min, v_max]");
  }
}

Dims perturbation_dims(const Dims& clip_dims) {
  Dims d = clip_dims;
  d.height = 1;
  d.width = 1;
  return d;
}

bool compatible(const Dims& pert, const Dims& clip) {
  return pert.frames == clip.frames && pert.channels == clip.channels && pert.v_min == clip.v_min &&
         pert.v_max == clip.v_max;
}

Perturbation::Perturbation(const Dims& clip_dims) : dims_(perturbation_dims(clip_dims)) {
  dims_.validate();
  trace_.assign(dims_.frames * kChannels, 0.0);
}

Perturbation::Perturbation(const Dims& clip_dims, std::vector<double> trace)
    : dims_(perturbation_dims(clip_dims)), trace_(std::move(trace)) {
  dims_.validate();
  if (trace_.size() != dims_.frames * kChannels)
    throw ShapeError("perturbation: expected " + std::to_string(dims_.frames * kChannels) +
                     " values, got " + std::to_string(trace_.size()));
  for (double v : trace_)
    if (!std::isfinite(v)) throw ValidationError("perturbation: non-finite value");
}

}  // namespace flicker::video
