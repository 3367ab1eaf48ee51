#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>

#include "flicker/attack/objective.hpp"
#include "flicker/attack/temporal.hpp"
#include "flicker/error.hpp"
#include "flicker/ota/channel.hpp"
#include "support.hpp"

using namespace flicker;
using namespace flicker::ota;

namespace {

ChannelModel sample_channel() {
  ChannelModel ch;
  ch.crosstalk = {{{0.9, 0.07, 0.03}, {0.04, 0.88, 0.08}, {0.01, 0.06, 0.93}}};
  ch.rise_alpha = 0.6;
  ch.phase = 2;
  ch.ambient = {0.02, -0.01, 0.03};
  return ch;
}

// Steady state reached by running the plain recurrence for many periods.
std::vector<double> ema_by_iteration(const std::vector<double>& u, std::size_t frames, double alpha) {
  std::vector<double> s(3, 0.0);
  std::vector<double> out(u.size());
  for (std::size_t period = 0; period < 400; ++period)
    for (std::size_t t = 0; t < frames; ++t)
      for (std::size_t c = 0; c < 3; ++c) {
        s[c] = alpha * u[t * 3 + c] + (1 - alpha) * s[c];
        out[t * 3 + c] = s[c];
      }
  return out;
}

}  // namespace

TEST_SUITE("ota") {

TEST_CASE("identity channel is bit-identical to digital application") {
  const video::Dims d = testing::small_dims(8, 4, 5);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const video::VideoTensor v = testing::random_video(d, s, -1.0, 1.0);
    const video::Perturbation delta = testing::random_delta(d, 100 + s, 0.4);
    const video::VideoTensor a = transmit(v, delta, ChannelModel{}, s);
    const video::VideoTensor b = attack::apply_perturbation(v, delta);
    REQUIRE(a.size() == b.size());
    CHECK(std::memcmp(a.data().data(), b.data().data(), a.size() * sizeof(double)) == 0);
  }
  CHECK(ChannelModel{}.is_identity());
  CHECK_FALSE(sample_channel().is_identity());
}

TEST_CASE("a zero command leaves the scene unchanged without ambient or noise") {
  const video::Dims d = testing::small_dims(6, 3, 3);
  ChannelModel ch = sample_channel();
  ch.ambient = {};
  const video::VideoTensor v = testing::random_video(d, 5);
  CHECK(transmit(v, video::Perturbation(d), ch, 1) == v);
}

TEST_CASE("cyclic EMA matches the recurrence run to convergence") {
  const std::size_t T = 10;
  std::vector<double> step(T * 3, 0.0);
  for (std::size_t t = 3; t < T; ++t) step[t * 3] = 1.0;
  for (double alpha : {0.5, 0.2, 1.0}) {
    const auto got = cyclic_ema(step, T, alpha);
    const auto want = ema_by_iteration(step, T, alpha);
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - want[i]) < 1e-12);
  }
  // mean is preserved and the rise is monotone after the step
  const auto s = cyclic_ema(step, T, 0.5);
  double mean_in = 0.0, mean_out = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    mean_in += step[t * 3];
    mean_out += s[t * 3];
  }
  CHECK(std::abs(mean_in - mean_out) < 1e-12);
  for (std::size_t t = 4; t < T; ++t) CHECK(s[t * 3] > s[(t - 1) * 3]);
}

TEST_CASE("effective offset composes crosstalk, ambient, lag and phase") {
  const video::Dims d = testing::small_dims(7, 1, 1);
  const video::Perturbation delta = testing::random_delta(d, 8, 0.3);
  const ChannelModel ch = sample_channel();
  std::vector<double> u = chromatic_stage(delta.trace(), ch.crosstalk);
  for (std::size_t t = 0; t < 7; ++t)
    for (std::size_t c = 0; c < 3; ++c) u[t * 3 + c] += ch.ambient[c];
  const auto want = attack::roll(cyclic_ema(u, 7, ch.rise_alpha), 7, ch.phase);
  const video::Perturbation got = effective_offset(delta, ch);
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(std::abs(got.trace()[i] - want[i]) < 1e-14);
}

TEST_CASE("roughness never increases through a noiseless lag channel") {
  const video::Dims d = testing::small_dims(16, 1, 1);
  SplitMix64 rng(77);
  int violations = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    ChannelModel ch;
    ch.rise_alpha = rng.uniform(0.05, 1.0);
    ch.phase = static_cast<long>(rng.below(16));
    ch.ambient = {rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1)};
    const video::Perturbation delta = testing::random_delta(d, 1000 + s, rng.uniform(0.01, 0.5));
    if (attack::metric_roughness(effective_offset(delta, ch)) > attack::metric_roughness(delta) + 1e-12) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("noise is reproducible from the seed") {
  const video::Dims d = testing::small_dims(4, 3, 3);
  ChannelModel ch;
  ch.noise_sigma = 0.05;
  const video::VideoTensor v = testing::random_video(d, 1, -0.5, 0.5);
  const video::Perturbation delta = testing::random_delta(d, 2, 0.1);
  CHECK(transmit(v, delta, ch, 9) == transmit(v, delta, ch, 9));
  CHECK_FALSE(transmit(v, delta, ch, 9) == transmit(v, delta, ch, 10));
}

TEST_CASE("channel validation") {
  ChannelModel ch;
  ch.rise_alpha = 0.0;
  CHECK_THROWS_AS(ch.validate(), ValidationError);
  ch.rise_alpha = 1.5;
  CHECK_THROWS_AS(ch.validate(), ValidationError);
  ch = ChannelModel{};
  ch.noise_sigma = -0.1;
  CHECK_THROWS_AS(ch.validate(), ValidationError);
  ch = ChannelModel{};
  ch.crosstalk[1][2] = std::nan("");
  CHECK_THROWS_AS(ch.validate(), ValidationError);
}

TEST_CASE("calibration recovers a synthetic channel") {
  for (long phase : {0L, 2L, 9L}) {
    ChannelModel truth = sample_channel();
    truth.phase = phase;
    const auto records = observe(pulse_probes(12, 0.5, 4), truth, 3);
    const CalibrationResult fit = calibrate(records);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(fit.model.crosstalk[i][j] - truth.crosstalk[i][j]) < 1e-6);
    for (std::size_t c = 0; c < 3; ++c) CHECK(std::abs(fit.model.ambient[c] - truth.ambient[c]) < 1e-6);
    CHECK(std::abs(fit.model.rise_alpha - truth.rise_alpha) < 1e-6);
    CHECK(fit.model.phase == phase);
    CHECK(fit.residual_rms < 1e-9);
  }
}

TEST_CASE("calibrating the identity channel gives the identity") {
  const CalibrationResult fit = calibrate(observe(pulse_probes(8, 0.4, 3), ChannelModel{}, 0));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(fit.model.crosstalk[i][j] - (i == j ? 1.0 : 0.0)) < 1e-9);
  CHECK(std::abs(fit.model.rise_alpha - 1.0) < 1e-9);
  CHECK(fit.model.phase == 0);
}

TEST_CASE("noisy calibration stays close and reports the noise level") {
  ChannelModel truth = sample_channel();
  truth.noise_sigma = 0.005;
  std::vector<CalibrationRecord> probes;
  for (int rep = 0; rep < 8; ++rep)
    for (auto& r : pulse_probes(16, 0.5, 5)) probes.push_back(r);
  const CalibrationResult fit = calibrate(observe(probes, truth, 11));
  CHECK(fit.model.phase == truth.phase);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(fit.model.crosstalk[i][j] - truth.crosstalk[i][j]) < 0.05);
  CHECK(fit.residual_rms > 0.5 * truth.noise_sigma);
  CHECK(fit.residual_rms < 2.0 * truth.noise_sigma);
  CHECK(fit.model.noise_sigma == fit.residual_rms);
}

TEST_CASE("calibration errors") {
  auto probes = pulse_probes(8, 0.5, 3);
  REQUIRE(probes.size() == 3);
  probes.pop_back();  // blue never excited
  CHECK_THROWS_AS(calibrate(observe(probes, sample_channel(), 0)), CalibrationError);
  CHECK_THROWS_AS(calibrate(std::vector<CalibrationRecord>{}), CalibrationError);
  auto uneven = observe(pulse_probes(8, 0.5, 3), sample_channel(), 0);
  uneven[1].observed.pop_back();
  CHECK_THROWS_AS(calibrate(uneven), CalibrationError);
}

TEST_CASE("pulse probes") {
  const auto p = pulse_probes(6, 0.3, 2);
  REQUIRE(p.size() == 3);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t t = 0; t < 6; ++t)
      for (std::size_t k = 0; k < 3; ++k) {
        const double want = (k == c && t >= 1 && t < 3) ? 0.3 : 0.0;
        CHECK(p[c].sent[t * 3 + k] == want);
      }
}

TEST_CASE("precompensation") {
  const video::Dims d = testing::small_dims(8, 1, 1);
  const video::Perturbation delta = testing::random_delta(d, 12, 0.3);
  CHECK(precompensate(delta, ChannelModel{}) == delta);

  ChannelModel twice;
  twice.crosstalk = {{{2, 0, 0}, {0, 2, 0}, {0, 0, 2}}};
  const video::Perturbation half = precompensate(delta, twice);
  for (std::size_t i = 0; i < delta.size(); ++i) CHECK(half.trace()[i] == doctest::Approx(delta.trace()[i] / 2).epsilon(1e-15));
  CHECK(condition_number(twice.crosstalk) == doctest::Approx(1.0));

  SplitMix64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    ChannelModel est;
    for (auto& row : est.crosstalk)
      for (double& v : row) v = rng.uniform(-0.3, 0.3);
    for (std::size_t i = 0; i < 3; ++i) est.crosstalk[i][i] += 1.0;
    const video::Perturbation cmd = precompensate(delta, est, false);
    const auto back = chromatic_stage(cmd.trace(), est.crosstalk);
    for (std::size_t i = 0; i < back.size(); ++i) CHECK(std::abs(back[i] - delta.trace()[i]) < 1e-9);
  }

  ChannelModel dim;
  dim.crosstalk = {{{0.1, 0, 0}, {0, 0.1, 0}, {0, 0, 0.1}}};
  video::Perturbation strong(d);
  strong(0, 0) = 0.5;
  strong(1, 1) = -0.5;
  const video::Perturbation clipped = precompensate(strong, dim);
  CHECK(clipped(0, 0) == 1.0);
  CHECK(clipped(1, 1) == -1.0);
  CHECK(precompensate(strong, dim, false)(0, 0) == doctest::Approx(5.0));

  ChannelModel singular;
  singular.crosstalk = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1e-7}}};
  CHECK_THROWS_AS(precompensate(delta, singular), CalibrationError);
}

TEST_CASE("channel JSON round trip") {
  ChannelModel ch = sample_channel();
  ch.noise_sigma = 0.0123;
  const ChannelModel back = channel_from_json(nlohmann::json::parse(to_json(ch).dump()));
  CHECK(back.crosstalk == ch.crosstalk);
  CHECK(back.rise_alpha == ch.rise_alpha);
  CHECK(back.phase == ch.phase);
  CHECK(back.ambient == ch.ambient);
  CHECK(back.noise_sigma == ch.noise_sigma);
  nlohmann::json bad = to_json(ch);
  bad["rise_alpha"] = 2.0;
  CHECK_THROWS_AS(channel_from_json(bad), ValidationError);
}

TEST_CASE("calibration CSV round trip") {
  const auto records = observe(pulse_probes(9, 0.45, 3), sample_channel(), 0);
  const std::filesystem::path p = std::filesystem::temp_directory_path() / "flicker_test_calibration.csv";
  write_calibration_csv(p, records);
  const auto back = read_calibration_csv(p);
  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].sent == records[i].sent);
    CHECK(back[i].observed == records[i].observed);
  }
}

}  // TEST_SUITE
