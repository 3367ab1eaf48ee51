#pragma once

#include <cstdint>
#include <vector>

#include "flicker/diffnet/model.hpp"
#include "flicker/rng.hpp"
#include "flicker/video/tensor.hpp"

namespace flicker::testing {

inline video::Dims small_dims(std::size_t t = 6, std::size_t h = 6, std::size_t w = 6) {
  video::Dims d;
  d.frames = t;
  d.height = h;
  d.width = w;
  return d;
}

inline video::VideoTensor random_video(const video::Dims& d, std::uint64_t seed, double lo = -0.8, double hi = 0.8) {
  SplitMix64 rng(seed);
  std::vector<double> data(d.volume());
  for (double& v : data) v = rng.uniform(lo, hi);
  return video::VideoTensor(d, std::move(data));
}

inline video::Perturbation random_delta(const video::Dims& d, std::uint64_t seed, double scale) {
  SplitMix64 rng(seed);
  video::Perturbation p(d);
  for (double& v : p.trace()) v = rng.uniform(-scale, scale);
  return p;
}

// He-initialised weights plus small random biases, so some units sit on
// either side of every ReLU.
inline diffnet::ModelParams random_model(diffnet::Architecture arch, const video::Dims& d, std::size_t k,
                                         std::uint64_t seed) {
  diffnet::ModelParams p = diffnet::init_params(arch, d, k, seed);
  SplitMix64 rng = SplitMix64(seed).split(99);
  for (auto* b : {&p.conv1.bias, &p.conv2.bias, &p.head.bias})
    for (double& v : *b) v = rng.uniform(-0.1, 0.1);
  return p;
}

}  // namespace flicker::testing
