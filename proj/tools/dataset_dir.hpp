#pragma once

#include <filesystem>

#include "flicker/harness/experiments.hpp"

namespace flicker::cli {

// On-disk dataset: <dir>/dataset.json (spec and split sizes),
// <dir>/manifest.csv (one row per clip with its render parameters) and one
// FLKV file per clip under <dir>/train and <dir>/eval.
struct DatasetDir {
  video::SyntheticDatasetSpec spec;
  std::size_t eval_per_class = 0;
  harness::Splits splits;
};

void write_dataset_dir(const std::filesystem::path& dir, const video::SyntheticDatasetSpec& spec,
                       std::size_t eval_per_class);
DatasetDir read_dataset_dir(const std::filesystem::path& dir);

}  // namespace flicker::cli
