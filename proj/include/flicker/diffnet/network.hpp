#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "flicker/diffnet/model.hpp"
#include "flicker/video/tensor.hpp"

namespace flicker::diffnet {

struct Prediction {
  std::vector<double> logits;
  std::vector<double> probabilities;  // softmax(logits)
  std::size_t top_class = 0;          // argmax, lowest index on ties
};

// Numerically stable softmax + argmax.
Prediction make_prediction(std::vector<double> logits);

// Scalar loss of one prediction and its derivative w.r.t. the logits.
struct LossGrad {
  double value = 0.0;
  std::vector<double> d_logits;
};

// Loss of a prediction for a clip with the given label.
using LossFn = std::function<LossGrad(const Prediction&, std::size_t label)>;

// Softmax cross-entropy against the label.
LossGrad cross_entropy(const Prediction& pred, std::size_t label);

// Activations recorded by one forward pass; the reverse sweep replays them
// layer by layer (conv -> ReLU -> conv -> ReLU -> pool -> dense).
struct Tape {
  Extent input, hidden1, hidden2;
  std::vector<double> act1;  // post-ReLU
  std::vector<double> act2;  // post-ReLU
  std::vector<double> pooled;
  Prediction prediction;
};

// `input` is a clip laid out like VideoTensor::data() with the model's dims.
Tape record_forward(const ModelParams& params, std::span<const double> input);

Prediction forward(const ModelParams& params, const video::VideoTensor& v);

// Reverse sweep to the input; returns d(loss)/d(input) given d(loss)/d(logits).
std::vector<double> backward_to_input(const ModelParams& params, const Tape& tape, std::span<const double> d_logits);

// Reverse sweep to the weights; accumulates into `grads` (shaped like params).
void backward_to_params(const ModelParams& params, const Tape& tape, std::span<const double> input,
                        std::span<const double> d_logits, ModelParams& grads);

struct InputGradient {
  double loss = 0.0;
  Prediction prediction;
  std::vector<double> grad;  // T x H x W x C
};

// Throws ShapeError if v.dims() differs from params.dims.
InputGradient grad_input(const ModelParams& params, const video::VideoTensor& v, std::size_t label,
                         const LossFn& loss);

struct ParamGradient {
  double loss = 0.0;  // mean over the batch
  ModelParams grad;   // mean of per-clip gradients
};

// Per-clip gradients are reduced in an order fixed by clip content, so the
// result is bitwise independent of the batch order.
ParamGradient grad_params(const ModelParams& params, std::span<const video::LabeledVideo> batch,
                          const LossFn& loss);

// Content hash used to fix reduction order.
std::uint64_t clip_hash(std::span<const double> data, std::size_t label);

// Indices of `hashes` sorted by (hash, index).
std::vector<std::size_t> canonical_order(std::span<const std::uint64_t> hashes);

double accuracy(const ModelParams& params, std::span<const video::LabeledVideo> data);

}  // namespace flicker::diffnet
