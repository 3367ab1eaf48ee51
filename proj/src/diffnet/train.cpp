#include "flicker/diffnet/train.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "flicker/adam.hpp"
#include "flicker/diffnet/network.hpp"
#include "flicker/error.hpp"
#include "flicker/rng.hpp"

namespace flicker::diffnet {

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw ValidationError("train: bad learning rate");
  if (batch_size < 1) throw ValidationError("train: batch_size must be >= 1");
  if (epochs < 1) throw ValidationError("train: epochs must be >= 1");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0 && epsilon > 0.0))
    throw ValidationError("train: bad Adam constants");
}

ModelParams train(std::span<const video::LabeledVideo> dataset, std::size_t num_classes, const TrainConfig& cfg,
                  const std::function<void(const EpochStats&)>& on_epoch) {
  if (dataset.empty()) throw ValidationError("train: empty dataset");
  return train_from(init_params(cfg.arch, dataset.front().video.dims(), num_classes, cfg.seed), dataset, cfg,
                    on_epoch);
}

ModelParams train_from(ModelParams params, std::span<const video::LabeledVideo> dataset, const TrainConfig& cfg,
                       const std::function<void(const EpochStats&)>& on_epoch) {
  cfg.validate();
  if (dataset.empty()) throw ValidationError("train: empty dataset");
  for (const auto& clip : dataset) {
    if (clip.label >= params.num_classes) throw ValidationError("train: label out of range");
    if (!(clip.video.dims() == params.dims)) throw ShapeError("train: clip dims do not match the model");
  }

  std::vector<std::size_t> sizes;
  for (auto t : params.tensors()) sizes.push_back(t.size());
  Adam adam(sizes, {cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.epsilon});

  SplitMix64 shuffler = SplitMix64(cfg.seed).split(0x747261696eULL);
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<video::LabeledVideo> batch;
  std::size_t iteration = 0;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffler.below(i)]);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      batch.clear();
      for (std::size_t j = start; j < std::min(order.size(), start + cfg.batch_size); ++j)
        batch.push_back(dataset[order[j]]);
      ++iteration;
      const ParamGradient g = grad_params(params, batch, cross_entropy);
      if (!std::isfinite(g.loss)) throw TrainingError("non-finite training loss", iteration);
      adam.step(params.tensors(), g.grad.tensors());
      loss_sum += g.loss;
      ++batches;
    }
    if (on_epoch) on_epoch({epoch + 1, loss_sum / static_cast<double>(batches)});
  }
  return params;
}

}  // namespace flicker::diffnet
