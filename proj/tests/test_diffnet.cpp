#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "flicker/diffnet/checkpoint.hpp"
#include "flicker/diffnet/layers.hpp"
#include "flicker/diffnet/network.hpp"
#include "flicker/diffnet/train.hpp"
#include "flicker/error.hpp"
#include "flicker/video/dataset.hpp"
#include "support.hpp"

using namespace flicker;
using namespace flicker::diffnet;
namespace fs = std::filesystem;

namespace {

// Straight-line conv: every output element summed from scratch, no shared
// buffers or loop reordering.
std::vector<double> naive_conv(const std::vector<double>& x, long T, long H, long W, long C, const ConvLayer& l,
                               long& To, long& Ho, long& Wo) {
  const auto& s = l.shape;
  const long kt = static_cast<long>(s.kernel[0]), kh = static_cast<long>(s.kernel[1]),
             kw = static_cast<long>(s.kernel[2]);
  const long st = static_cast<long>(s.stride[0]), sh = static_cast<long>(s.stride[1]),
             sw = static_cast<long>(s.stride[2]);
  const long pt = static_cast<long>(s.padding[0]), ph = static_cast<long>(s.padding[1]),
             pw = static_cast<long>(s.padding[2]);
  const long O = static_cast<long>(s.out_channels);
  To = (T + 2 * pt - kt) / st + 1;
  Ho = (H + 2 * ph - kh) / sh + 1;
  Wo = (W + 2 * pw - kw) / sw + 1;
  std::vector<double> y(static_cast<std::size_t>(To * Ho * Wo * O));
  for (long t = 0; t < To; ++t)
    for (long h = 0; h < Ho; ++h)
      for (long w = 0; w < Wo; ++w)
        for (long o = 0; o < O; ++o) {
          double acc = l.bias[static_cast<std::size_t>(o)];
          for (long a = 0; a < kt; ++a)
            for (long b = 0; b < kh; ++b)
              for (long c = 0; c < kw; ++c)
                for (long i = 0; i < C; ++i) {
                  const long ti = t * st - pt + a, hi = h * sh - ph + b, wi = w * sw - pw + c;
                  if (ti < 0 || ti >= T || hi < 0 || hi >= H || wi < 0 || wi >= W) continue;
                  const double xv = x[static_cast<std::size_t>(((ti * H + hi) * W + wi) * C + i)];
                  const double wv = l.weight[static_cast<std::size_t>((((a * kh + b) * kw + c) * C + i) * O + o)];
                  acc += xv * wv;
                }
          y[static_cast<std::size_t>(((t * Ho + h) * Wo + w) * O + o)] = acc;
        }
  return y;
}

std::vector<double> naive_logits(const ModelParams& p, const video::VideoTensor& v) {
  std::vector<double> x(v.data().begin(), v.data().end());
  long T = static_cast<long>(p.dims.frames), H = static_cast<long>(p.dims.height),
       W = static_cast<long>(p.dims.width);
  long T1, H1, W1, T2, H2, W2;
  std::vector<double> a1 = naive_conv(x, T, H, W, 3, p.conv1, T1, H1, W1);
  for (double& e : a1) e = e > 0.0 ? e : 0.0;
  const long C1 = static_cast<long>(p.conv1.shape.out_channels);
  std::vector<double> a2 = naive_conv(a1, T1, H1, W1, C1, p.conv2, T2, H2, W2);
  for (double& e : a2) e = e > 0.0 ? e : 0.0;
  const std::size_t C2 = p.conv2.shape.out_channels;
  std::vector<double> pooled(C2, 0.0);
  for (std::size_t i = 0; i < a2.size(); ++i) pooled[i % C2] += a2[i];
  for (double& e : pooled) e /= static_cast<double>(T2 * H2 * W2);
  std::vector<double> logits(p.num_classes);
  for (std::size_t k = 0; k < p.num_classes; ++k) {
    logits[k] = p.head.bias[k];
    for (std::size_t i = 0; i < C2; ++i) logits[k] += p.head.weight[k * C2 + i] * pooled[i];
  }
  return logits;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8}); }

std::vector<video::LabeledVideo> tiny_dataset(std::size_t per_class, std::uint64_t seed) {
  video::SyntheticDatasetSpec spec;
  spec.dims = testing::small_dims(6, 8, 8);
  spec.num_classes = 3;
  spec.clips_per_class = per_class;
  spec.seed = seed;
  return video::generate_dataset(spec);
}

}  // namespace

TEST_SUITE("diffnet") {

TEST_CASE("architectures match their declared layer shapes") {
  const video::Dims d = testing::small_dims(8, 12, 12);
  const ModelParams a = init_params(Architecture::kA, d, 6, 1);
  CHECK(a.conv1.shape.in_channels == 3);
  CHECK(a.conv1.shape.out_channels == 8);
  CHECK(a.conv1.shape.kernel == std::array<std::size_t, 3>{3, 3, 3});
  CHECK(a.conv1.shape.stride == std::array<std::size_t, 3>{1, 1, 1});
  CHECK(a.conv2.shape.out_channels == 16);
  CHECK(a.conv2.shape.stride == std::array<std::size_t, 3>{1, 2, 2});
  CHECK(a.head.in == 16);
  CHECK(a.head.out == 6);

  const ModelParams b = init_params(Architecture::kB, d, 6, 1);
  CHECK(b.conv1.shape.out_channels == 12);
  CHECK(b.conv1.shape.kernel == std::array<std::size_t, 3>{3, 5, 5});
  CHECK(b.conv2.shape.out_channels == 12);
  CHECK(b.conv2.shape.stride == std::array<std::size_t, 3>{2, 2, 2});
  CHECK(b.head.in == 12);
}

TEST_CASE("forward matches a loop-nest reference") {
  for (Architecture arch : {Architecture::kA, Architecture::kB}) {
    const video::Dims d = testing::small_dims(5, 7, 6);
    const ModelParams p = testing::random_model(arch, d, 4, 11);
    const video::VideoTensor v = testing::random_video(d, 3);
    const Prediction got = forward(p, v);
    const std::vector<double> want = naive_logits(p, v);
    for (std::size_t k = 0; k < want.size(); ++k) CHECK(got.logits[k] == doctest::Approx(want[k]).epsilon(1e-12));
  }
}

TEST_CASE("softmax output") {
  const video::Dims d = testing::small_dims(4, 5, 5);
  const ModelParams p = testing::random_model(Architecture::kA, d, 5, 2);
  const Prediction pred = forward(p, testing::random_video(d, 9));
  double sum = 0.0;
  for (double y : pred.probabilities) sum += y;
  CHECK(std::abs(sum - 1.0) < 1e-9);
  CHECK(pred.top_class == static_cast<std::size_t>(std::max_element(pred.probabilities.begin(),
                                                                    pred.probabilities.end()) -
                                                   pred.probabilities.begin()));

  std::vector<double> shifted = pred.logits;
  for (double& z : shifted) z += 37.5;
  const Prediction q = make_prediction(shifted);
  for (std::size_t k = 0; k < 5; ++k) CHECK(q.probabilities[k] == doctest::Approx(pred.probabilities[k]).epsilon(1e-12));
}

TEST_CASE("zero weights give the uniform distribution and class 0") {
  const video::Dims d = testing::small_dims(4, 5, 5);
  const ModelParams z = init_params(Architecture::kA, d, 6, 1).zeros_like();
  const Prediction pred = forward(z, testing::random_video(d, 1));
  for (double y : pred.probabilities) CHECK(y == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(pred.top_class == 0);
}

TEST_CASE("ties resolve to the lowest index") {
  CHECK(make_prediction({1.0, 3.0, 3.0, 0.0}).top_class == 1);
  CHECK(make_prediction({2.0, 2.0}).top_class == 0);
}

TEST_CASE("forward rejects mismatched clips") {
  const ModelParams p = init_params(Architecture::kA, testing::small_dims(4, 5, 5), 3, 1);
  CHECK_THROWS_AS(forward(p, testing::random_video(testing::small_dims(4, 5, 6), 1)), ShapeError);
}

TEST_CASE("variants A and B disagree on the same input") {
  const video::Dims d = testing::small_dims(6, 8, 8);
  const video::VideoTensor v = testing::random_video(d, 4);
  const Prediction a = forward(init_params(Architecture::kA, d, 4, 3), v);
  const Prediction b = forward(init_params(Architecture::kB, d, 4, 3), v);
  CHECK(a.logits != b.logits);
}

TEST_CASE("input gradient matches central differences") {
  for (Architecture arch : {Architecture::kA, Architecture::kB}) {
    const video::Dims d = testing::small_dims(4, 6, 6);
    const ModelParams p = testing::random_model(arch, d, 3, 21);
    const video::VideoTensor v = testing::random_video(d, 8, -0.5, 0.5);
    const InputGradient g = grad_input(p, v, 1, cross_entropy);
    SplitMix64 pick(5);
    const double h = 1e-4;
    int checked = 0;
    for (int trial = 0; trial < 60 && checked < 25; ++trial) {
      const std::size_t i = pick.below(v.size());
      auto loss_at = [&](double step) {
        std::vector<double> x(v.data().begin(), v.data().end());
        x[i] += step;
        return cross_entropy(forward(p, video::VideoTensor(d, x)), 1).value;
      };
      const double fd = (loss_at(h) - loss_at(-h)) / (2 * h);
      const double fd_narrow = (loss_at(h / 10) - loss_at(-h / 10)) / (h / 5);
      if (rel_err(fd, fd_narrow) > 1e-6) continue;  // straddles a ReLU kink
      CHECK(rel_err(g.grad[i], fd) < 1e-5);
      ++checked;
    }
    CHECK(checked == 25);
  }
}

TEST_CASE("parameter gradient matches central differences") {
  const video::Dims d = testing::small_dims(4, 6, 6);
  ModelParams p = testing::random_model(Architecture::kA, d, 3, 5);
  std::vector<video::LabeledVideo> batch;
  for (std::size_t n = 0; n < 3; ++n) batch.push_back({testing::random_video(d, 40 + n), n % 3});
  const ParamGradient g = grad_params(p, batch, cross_entropy);
  auto tensors = p.tensors();
  const auto grads = g.grad.tensors();
  SplitMix64 pick(6);
  int checked = 0;
  for (std::size_t k = 0; k < tensors.size(); ++k) {
    for (int trial = 0; trial < 12 && checked < 5 * static_cast<int>(k + 1); ++trial) {
      const std::size_t i = pick.below(tensors[k].size());
      const double saved = tensors[k][i];
      auto loss_at = [&](double step) {
        tensors[k][i] = saved + step;
        double total = 0.0;
        for (const auto& c : batch) total += cross_entropy(forward(p, c.video), c.label).value;
        tensors[k][i] = saved;
        return total / static_cast<double>(batch.size());
      };
      const double fd = (loss_at(1e-4) - loss_at(-1e-4)) / 2e-4;
      const double fd_narrow = (loss_at(1e-5) - loss_at(-1e-5)) / 2e-5;
      if (rel_err(fd, fd_narrow) > 1e-6) continue;
      CHECK(rel_err(grads[k][i], fd) < 1e-5);
      ++checked;
    }
  }
  CHECK(checked >= 25);
}

TEST_CASE("linear pooled head has a spatially uniform input gradient") {
  // logits = W * mean_pool(x) + b; d(sum logits)/dx[t,h,w,c] = sum_k W[k][c] / (T H W)
  const Extent e{3, 4, 5, 3};
  const std::size_t k = 4;
  SplitMix64 rng(1);
  std::vector<double> weight(k * 3);
  for (double& w : weight) w = rng.uniform(-1, 1);
  std::vector<double> x(e.volume());
  for (double& v : x) v = rng.uniform(-1, 1);
  std::vector<double> pooled(3);
  mean_pool_forward(e, x, pooled);
  std::vector<double> d_pooled(3, 0.0);
  const std::vector<double> ones(k, 1.0);
  dense_backward(3, k, pooled, weight, ones, d_pooled, {}, {});
  std::vector<double> d_x(e.volume(), 0.0);
  mean_pool_backward(e, d_pooled, d_x);
  for (std::size_t i = 0; i < d_x.size(); ++i) {
    const std::size_t c = i % 3;
    double want = 0.0;
    for (std::size_t j = 0; j < k; ++j) want += weight[j * 3 + c];
    CHECK(d_x[i] == doctest::Approx(want / 60.0).epsilon(1e-14));
  }
}

TEST_CASE("batch gradient does not depend on batch order") {
  const video::Dims d = testing::small_dims(4, 5, 5);
  const ModelParams p = testing::random_model(Architecture::kA, d, 3, 7);
  std::vector<video::LabeledVideo> batch;
  for (std::size_t n = 0; n < 5; ++n) batch.push_back({testing::random_video(d, 100 + n), n % 3});
  const ParamGradient a = grad_params(p, batch, cross_entropy);
  std::reverse(batch.begin(), batch.end());
  std::swap(batch[0], batch[2]);
  const ParamGradient b = grad_params(p, batch, cross_entropy);
  CHECK(a.loss == b.loss);
  CHECK(a.grad == b.grad);
}

TEST_CASE("training is deterministic and reduces the loss") {
  const auto data = tiny_dataset(4, 3);
  TrainConfig cfg;
  cfg.epochs = 4;
  cfg.batch_size = 4;
  std::vector<double> losses;
  const ModelParams a = train(data, 3, cfg, [&](const EpochStats& s) { losses.push_back(s.mean_loss); });
  const ModelParams b = train(data, 3, cfg);
  CHECK(a == b);
  CHECK(fingerprint(a) == fingerprint(b));
  REQUIRE(losses.size() == 4);
  CHECK(losses.back() < losses.front());
  cfg.seed = 8;
  CHECK_FALSE(train(data, 3, cfg) == a);
}

TEST_CASE("diverging training raises a training error") {
  const auto data = tiny_dataset(2, 4);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.learning_rate = 1e200;
  CHECK_THROWS_AS(train(data, 3, cfg), TrainingError);
}

TEST_CASE("train config validation") {
  TrainConfig cfg;
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = TrainConfig{};
  cfg.epochs = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("checkpoint round trip") {
  const fs::path dir = fs::temp_directory_path() / "flicker_test_diffnet";
  fs::create_directories(dir);
  const fs::path path = dir / "m.flkm";
  const ModelParams p = testing::random_model(Architecture::kB, testing::small_dims(4, 6, 6), 5, 3);
  save_checkpoint(path, p);
  CHECK(load_checkpoint(path) == p);
  CHECK(load_checkpoint(path, Architecture::kB) == p);
  CHECK_THROWS_AS(load_checkpoint(path, Architecture::kA), ArchitectureMismatch);

  std::ifstream in(path, std::ios::binary);
  std::vector<char> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  in.close();
  bytes.resize(bytes.size() / 2);
  std::ofstream(path, std::ios::binary | std::ios::trunc).write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  CHECK_THROWS_AS(load_checkpoint(path), FormatError);
}

TEST_CASE("accuracy counts top-class hits") {
  const video::Dims d = testing::small_dims(4, 5, 5);
  const ModelParams z = init_params(Architecture::kA, d, 3, 1).zeros_like();
  std::vector<video::LabeledVideo> data;
  for (std::size_t n = 0; n < 6; ++n) data.push_back({testing::random_video(d, n), n % 3});
  CHECK(accuracy(z, data) == doctest::Approx(2.0 / 6.0));
}

}  // TEST_SUITE
