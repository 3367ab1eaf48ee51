#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>

#include "flicker/diffnet/model.hpp"
#include "flicker/video/tensor.hpp"

namespace flicker::diffnet {

struct TrainConfig {
  Architecture arch = Architecture::kA;
  double learning_rate = 1e-2;
  std::size_t batch_size = 8;
  std::size_t epochs = 40;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 7;

  void validate() const;
};

struct EpochStats {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
};

// Minibatch Adam on softmax cross-entropy. Initialization and the per-epoch
// shuffles derive from cfg.seed, so the result is a pure function of
// (dataset, cfg). Throws TrainingError carrying the iteration on a non-finite
// loss.
ModelParams train(std::span<const video::LabeledVideo> dataset, std::size_t num_classes, const TrainConfig& cfg,
                  const std::function<void(const EpochStats&)>& on_epoch = {});

// Continues from existing parameters (same rules as above).
ModelParams train_from(ModelParams start, std::span<const video::LabeledVideo> dataset, const TrainConfig& cfg,
                       const std::function<void(const EpochStats&)>& on_epoch = {});

}  // namespace flicker::diffnet
