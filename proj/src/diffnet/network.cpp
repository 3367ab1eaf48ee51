#include "flicker/diffnet/network.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <utility>

#include "flicker/error.hpp"

namespace flicker::diffnet {

Prediction make_prediction(std::vector<double> logits) {
  Prediction p;
  p.top_class = 0;
  double top = logits.empty() ? 0.0 : logits[0];
  for (std::size_t k = 1; k < logits.size(); ++k) {
    if (logits[k] > top) {
      top = logits[k];
      p.top_class = k;
    }
  }
  p.probabilities.resize(logits.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) sum += (p.probabilities[k] = std::exp(logits[k] - top));
  for (double& v : p.probabilities) v /= sum;
  p.logits = std::move(logits);
  return p;
}

LossGrad cross_entropy(const Prediction& pred, std::size_t label) {
  const double top = pred.logits[pred.top_class];
  double sum = 0.0;
  for (double z : pred.logits) sum += std::exp(z - top);
  LossGrad out;
  out.value = std::log(sum) + top - pred.logits[label];
  out.d_logits = pred.probabilities;
  out.d_logits[label] -= 1.0;
  return out;
}

Tape record_forward(const ModelParams& params, std::span<const double> input) {
  const auto& d = params.dims;
  if (input.size() != d.volume()) throw ShapeError("forward: input size does not match model dims");
  Tape tape;
  tape.input = {d.frames, d.height, d.width, d.channels};
  tape.hidden1 = params.conv1.shape.output_extent(tape.input);
  tape.hidden2 = params.conv2.shape.output_extent(tape.hidden1);

  tape.act1.resize(tape.hidden1.volume());
  conv3d_forward(params.conv1.shape, tape.input, input, params.conv1.weight, params.conv1.bias, tape.act1);
  relu_forward(tape.act1);

  tape.act2.resize(tape.hidden2.volume());
  conv3d_forward(params.conv2.shape, tape.hidden1, tape.act1, params.conv2.weight, params.conv2.bias, tape.act2);
  relu_forward(tape.act2);

  tape.pooled.resize(tape.hidden2.c);
  mean_pool_forward(tape.hidden2, tape.act2, tape.pooled);

  std::vector<double> logits(params.num_classes);
  dense_forward(params.head.in, params.head.out, tape.pooled, params.head.weight, params.head.bias, logits);
  tape.prediction = make_prediction(std::move(logits));
  return tape;
}

Prediction forward(const ModelParams& params, const video::VideoTensor& v) {
  if (!(v.dims() == params.dims)) throw ShapeError("forward: clip dims do not match the model");
  return record_forward(params, v.data()).prediction;
}

namespace {

// Gradient w.r.t. the conv2 output (post-ReLU masked), shared by both sweeps.
std::vector<double> head_to_hidden2(const ModelParams& params, const Tape& tape, std::span<const double> d_logits,
                                    ModelParams* grads) {
  std::vector<double> d_pooled(tape.pooled.size());
  dense_backward(params.head.in, params.head.out, tape.pooled, params.head.weight, d_logits, d_pooled,
                 grads ? std::span<double>(grads->head.weight) : std::span<double>(),
                 grads ? std::span<double>(grads->head.bias) : std::span<double>());
  std::vector<double> d_act2(tape.act2.size());
  mean_pool_backward(tape.hidden2, d_pooled, d_act2);
  relu_backward(tape.act2, d_act2);
  return d_act2;
}

}  // namespace

std::vector<double> backward_to_input(const ModelParams& params, const Tape& tape,
                                      std::span<const double> d_logits) {
  const std::vector<double> d_act2 = head_to_hidden2(params, tape, d_logits, nullptr);
  std::vector<double> d_act1(tape.act1.size(), 0.0);
  conv3d_backward_input(params.conv2.shape, tape.hidden1, d_act2, params.conv2.weight, d_act1);
  relu_backward(tape.act1, d_act1);
  std::vector<double> d_input(tape.input.volume(), 0.0);
  conv3d_backward_input(params.conv1.shape, tape.input, d_act1, params.conv1.weight, d_input);
  return d_input;
}

void backward_to_params(const ModelParams& params, const Tape& tape, std::span<const double> input,
                        std::span<const double> d_logits, ModelParams& grads) {
  const std::vector<double> d_act2 = head_to_hidden2(params, tape, d_logits, &grads);
  conv3d_backward_params(params.conv2.shape, tape.hidden1, tape.act1, d_act2, grads.conv2.weight, grads.conv2.bias);
  std::vector<double> d_act1(tape.act1.size(), 0.0);
  conv3d_backward_input(params.conv2.shape, tape.hidden1, d_act2, params.conv2.weight, d_act1);
  relu_backward(tape.act1, d_act1);
  conv3d_backward_params(params.conv1.shape, tape.input, input, d_act1, grads.conv1.weight, grads.conv1.bias);
}

InputGradient grad_input(const ModelParams& params, const video::VideoTensor& v, std::size_t label,
                         const LossFn& loss) {
  if (!(v.dims() == params.dims)) throw ShapeError("grad_input: clip dims do not match the model");
  Tape tape = record_forward(params, v.data());
  LossGrad lg = loss(tape.prediction, label);
  InputGradient out;
  out.loss = lg.value;
  out.grad = backward_to_input(params, tape, lg.d_logits);
  out.prediction = std::move(tape.prediction);
  return out;
}

std::uint64_t clip_hash(std::span<const double> data, std::size_t label) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ label;
  for (double v : data) {
    h ^= std::bit_cast<std::uint64_t>(v);
    h *= 0x100000001b3ULL;
    h ^= h >> 29;
  }
  return h;
}

std::vector<std::size_t> canonical_order(std::span<const std::uint64_t> hashes) {
  std::vector<std::size_t> order(hashes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return hashes[a] != hashes[b] ? hashes[a] < hashes[b] : a < b;
  });
  return order;
}

ParamGradient grad_params(const ModelParams& params, std::span<const video::LabeledVideo> batch,
                          const LossFn& loss) {
  if (batch.empty()) throw ValidationError("grad_params: empty batch");
  std::vector<ModelParams> per_clip;
  std::vector<double> losses;
  std::vector<std::uint64_t> hashes;
  per_clip.reserve(batch.size());
  for (const auto& clip : batch) {
    if (!(clip.video.dims() == params.dims)) throw ShapeError("grad_params: clip dims do not match the model");
    if (clip.label >= params.num_classes) throw ValidationError("grad_params: label out of range");
    const Tape tape = record_forward(params, clip.video.data());
    const LossGrad lg = loss(tape.prediction, clip.label);
    ModelParams g = params.zeros_like();
    backward_to_params(params, tape, clip.video.data(), lg.d_logits, g);
    per_clip.push_back(std::move(g));
    losses.push_back(lg.value);
    hashes.push_back(clip_hash(clip.video.data(), clip.label));
  }

  ParamGradient out;
  out.grad = params.zeros_like();
  auto sum = out.grad.tensors();
  for (std::size_t i : canonical_order(hashes)) {
    out.loss += losses[i];
    auto part = std::as_const(per_clip[i]).tensors();
    for (std::size_t t = 0; t < sum.size(); ++t)
      for (std::size_t j = 0; j < sum[t].size(); ++j) sum[t][j] += part[t][j];
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  out.loss *= inv;
  for (auto t : sum)
    for (double& v : t) v *= inv;
  return out;
}

double accuracy(const ModelParams& params, std::span<const video::LabeledVideo> data) {
  if (data.empty()) throw ValidationError("accuracy: empty data set");
  std::size_t hits = 0;
  for (const auto& clip : data) hits += forward(params, clip.video).top_class == clip.label ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

}  // namespace flicker::diffnet
