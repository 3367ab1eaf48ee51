#include "flicker/diffnet/model.hpp"

#include <bit>
#include <cmath>

#include "flicker/error.hpp"
#include "flicker/rng.hpp"

namespace flicker::diffnet {
namespace {

struct Layout {
  Conv3dShape conv1, conv2;
};

Layout layout_for(Architecture arch) {
  switch (arch) {
    case Architecture::kA:
      return {{3, 8, {3, 3, 3}, {1, 1, 1}, {1, 1, 1}}, {8, 16, {3, 3, 3}, {1, 2, 2}, {1, 1, 1}}};
    case Architecture::kB:
      return {{3, 12, {3, 5, 5}, {1, 1, 1}, {1, 2, 2}}, {12, 12, {3, 3, 3}, {2, 2, 2}, {1, 1, 1}}};
  }
  throw ValidationError("unknown architecture id " + std::to_string(static_cast<std::uint32_t>(arch)));
}

void fill_he(std::vector<double>& w, std::size_t fan_in, SplitMix64& rng) {
  const double scale = std::sqrt(2.0 / static_cast<double>(fan_in));
  for (double& v : w) v = scale * rng.normal();
}

}  // namespace

const char* architecture_name(Architecture a) { return a == Architecture::kA ? "A" : "B"; }

Architecture parse_architecture(const std::string& name) {
  if (name == "A" || name == "a") return Architecture::kA;
  if (name == "B" || name == "b") return Architecture::kB;
  throw ValidationError("unknown architecture \"" + name + "\" (expected A or B)");
}

std::vector<std::span<double>> ModelParams::tensors() {
  return {conv1.weight, conv1.bias, conv2.weight, conv2.bias, head.weight, head.bias};
}

std::vector<std::span<const double>> ModelParams::tensors() const {
  return {conv1.weight, conv1.bias, conv2.weight, conv2.bias, head.weight, head.bias};
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (auto t : tensors()) n += t.size();
  return n;
}

ModelParams ModelParams::zeros_like() const {
  ModelParams z = *this;
  for (auto t : z.tensors()) std::fill(t.begin(), t.end(), 0.0);
  return z;
}

void ModelParams::validate() const {
  dims.validate();
  if (num_classes < 2) throw ValidationError("model: need at least 2 classes");
  const Layout l = layout_for(arch);
  if (!(conv1.shape == l.conv1) || !(conv2.shape == l.conv2))
    throw ValidationError(std::string("model: conv shapes do not match architecture ") + architecture_name(arch));
  const Extent in{dims.frames, dims.height, dims.width, dims.channels};
  const Extent mid = conv2.shape.output_extent(conv1.shape.output_extent(in));
  if (conv1.weight.size() != conv1.shape.weight_count() || conv1.bias.size() != conv1.shape.out_channels ||
      conv2.weight.size() != conv2.shape.weight_count() || conv2.bias.size() != conv2.shape.out_channels)
    throw ValidationError("model: conv parameter sizes inconsistent");
  if (head.in != mid.c || head.out != num_classes || head.weight.size() != head.in * head.out ||
      head.bias.size() != head.out)
    throw ValidationError("model: head shape inconsistent");
  for (auto t : tensors())
    for (double v : t)
      if (!std::isfinite(v)) throw ValidationError("model: non-finite parameter");
}

ModelParams init_params(Architecture arch, const video::Dims& dims, std::size_t num_classes, std::uint64_t seed) {
  dims.validate();
  if (num_classes < 2) throw ValidationError("model: need at least 2 classes");
  const Layout l = layout_for(arch);
  SplitMix64 rng(seed);
  ModelParams p;
  p.arch = arch;
  p.dims = dims;
  p.num_classes = num_classes;
  p.conv1 = {l.conv1, std::vector<double>(l.conv1.weight_count()), std::vector<double>(l.conv1.out_channels)};
  p.conv2 = {l.conv2, std::vector<double>(l.conv2.weight_count()), std::vector<double>(l.conv2.out_channels)};
  p.head = {l.conv2.out_channels, num_classes, std::vector<double>(l.conv2.out_channels * num_classes),
            std::vector<double>(num_classes)};
  fill_he(p.conv1.weight, l.conv1.weight_count() / l.conv1.out_channels, rng);
  fill_he(p.conv2.weight, l.conv2.weight_count() / l.conv2.out_channels, rng);
  fill_he(p.head.weight, p.head.in, rng);
  p.validate();
  return p;
}

std::uint64_t fingerprint(const ModelParams& p) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  feed(static_cast<std::uint64_t>(p.arch));
  feed(p.dims.frames);
  feed(p.dims.height);
  feed(p.dims.width);
  feed(p.num_classes);
  for (auto t : p.tensors())
    for (double v : t) feed(std::bit_cast<std::uint64_t>(v));
  return h;
}

}  // namespace flicker::diffnet
