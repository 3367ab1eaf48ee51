#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "flicker/diffnet/layers.hpp"
#include "flicker/video/tensor.hpp"

namespace flicker::diffnet {

// A: conv3d(3->8, 3x3x3, same) -> ReLU -> conv3d(8->16, 3x3x3, stride 1x2x2) -> ReLU
//    -> global mean pool -> dense(16->K)
// B: conv3d(3->12, 3x5x5, same) -> ReLU -> conv3d(12->12, 3x3x3, stride 2x2x2) -> ReLU
//    -> global mean pool -> dense(12->K)
// Both see only the RGB frames; there is no optical-flow stream.
enum class Architecture : std::uint32_t { kA = 1, kB = 2 };

const char* architecture_name(Architecture a);
Architecture parse_architecture(const std::string& name);  // "A" / "B"

struct ConvLayer {
  Conv3dShape shape;
  std::vector<double> weight;
  std::vector<double> bias;
  bool operator==(const ConvLayer&) const = default;
};

struct DenseLayer {
  std::size_t in = 0, out = 0;
  std::vector<double> weight;  // [out][in]
  std::vector<double> bias;
  bool operator==(const DenseLayer&) const = default;
};

// Weights of one classifier. Parameter tensors are enumerated in a fixed
// order: conv1.weight, conv1.bias, conv2.weight, conv2.bias, head.weight,
// head.bias. The same struct doubles as the container for parameter
// gradients and optimizer moments.
struct ModelParams {
  Architecture arch = Architecture::kA;
  video::Dims dims{};
  std::size_t num_classes = 0;
  ConvLayer conv1, conv2;
  DenseLayer head;

  std::vector<std::span<double>> tensors();
  std::vector<std::span<const double>> tensors() const;
  std::size_t parameter_count() const;

  // Same shapes, every value zero.
  ModelParams zeros_like() const;

  // Throws ValidationError if layer shapes disagree with arch/dims/K or any
  // value is non-finite.
  void validate() const;

  bool operator==(const ModelParams&) const = default;
};

// He-normal weights, zero biases, drawn from SplitMix64(seed).
ModelParams init_params(Architecture arch, const video::Dims& dims, std::size_t num_classes, std::uint64_t seed);

// 64-bit FNV-1a over architecture, dims and every parameter's bit pattern.
std::uint64_t fingerprint(const ModelParams& p);

}  // namespace flicker::diffnet
