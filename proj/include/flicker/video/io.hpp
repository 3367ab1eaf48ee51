#pragma once

#include <filesystem>

#include "flicker/video/tensor.hpp"

namespace flicker::video {

inline constexpr std::uint32_t kVideoFormatVersion = 1;
inline constexpr std::uint32_t kPerturbationFormatVersion = 1;

// FLKV layout (all little-endian):
//   "FLKV" | u32 version | u32 T | u32 H | u32 W | u32 C | f64 v_min | f64 v_max |
//   T*H*W*C float32 values, t-major then h, w, c.
// Values are stored as float32; a clip whose values are float32-representable
// (every generated clip is) round-trips bit-exactly.
void save_video(const std::filesystem::path& path, const VideoTensor& v);
VideoTensor load_video(const std::filesystem::path& path);

// FLKP layout: the FLKV header with magic "FLKP" and H = W = 1, followed by
// T*3 float32 values (frame-major, r g b). save_perturbation also writes the
// sidecar text file (sidecar_path) with one "r g b" line per frame.
void save_perturbation(const std::filesystem::path& path, const Perturbation& p);
Perturbation load_perturbation(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& perturbation_path);

}  // namespace flicker::video
