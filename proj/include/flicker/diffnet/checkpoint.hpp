#pragma once

#include <filesystem>
#include <optional>

#include "flicker/diffnet/model.hpp"

namespace flicker::diffnet {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// FLKM layout (little-endian):
//   "FLKM" | u32 version | u32 architecture id (1 = A, 2 = B) |
//   u32 T | u32 H | u32 W | u32 C | f64 v_min | f64 v_max | u32 K | u32 layer count (3) |
//   layer records in forward order: conv1, conv2, head.
// Conv record:  u32 kind=1 | u32 in | u32 out | 3 x u32 kernel | 3 x u32 stride | 3 x u32 padding |
//               u64 n_weight | n_weight x f64 | u64 n_bias | n_bias x f64
// Dense record: u32 kind=2 | u32 in | u32 out | u64 n_weight | f64... | u64 n_bias | f64...
void save_checkpoint(const std::filesystem::path& path, const ModelParams& params);

// When `expected` is given, a checkpoint of another architecture raises
// ArchitectureMismatch.
ModelParams load_checkpoint(const std::filesystem::path& path,
                            std::optional<Architecture> expected = std::nullopt);

}  // namespace flicker::diffnet
