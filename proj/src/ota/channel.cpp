#include "flicker/ota/channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "flicker/attack/temporal.hpp"
#include "flicker/error.hpp"
#include "flicker/rng.hpp"

namespace flicker::ota {

using video::kChannels;

void ChannelModel::validate() const {
  if (!(rise_alpha > 0.0 && rise_alpha <= 1.0)) throw ValidationError("channel: rise_alpha must lie in (0, 1]");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw ValidationError("channel: noise_sigma must be >= 0");
  for (const auto& row : crosstalk)
    for (double v : row)
      if (!std::isfinite(v)) throw ValidationError("channel: crosstalk matrix must be finite");
  for (double v : ambient)
    if (!std::isfinite(v)) throw ValidationError("channel: ambient offset must be finite");
}

bool ChannelModel::is_identity() const {
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      if (crosstalk[i][j] != (i == j ? 1.0 : 0.0)) return false;
  return rise_alpha == 1.0 && phase == 0 && ambient == std::array<double, 3>{} && noise_sigma == 0.0;
}

std::vector<double> cyclic_ema(std::span<const double> trace, std::size_t frames, double alpha) {
  if (alpha == 1.0) return {trace.begin(), trace.end()};
  const double keep = 1.0 - alpha;
  // s_t = alpha / (1 - keep^T) * sum_{k<T} keep^k u_{t-k}
  const double norm = alpha / (1.0 - std::pow(keep, static_cast<double>(frames)));
  std::vector<double> out(trace.size(), 0.0);
  for (std::size_t t = 0; t < frames; ++t) {
    double weight = norm;
    for (std::size_t k = 0; k < frames; ++k, weight *= keep) {
      const std::size_t src = (t + frames - k) % frames;
      for (std::size_t c = 0; c < kChannels; ++c) out[t * kChannels + c] += weight * trace[src * kChannels + c];
    }
  }
  return out;
}

std::vector<double> chromatic_stage(std::span<const double> trace, const Matrix3& m) {
  std::vector<double> out(trace.size());
  for (std::size_t t = 0; t < trace.size() / kChannels; ++t) {
    const double* d = trace.data() + t * kChannels;
    for (std::size_t c = 0; c < kChannels; ++c) out[t * kChannels + c] = m[c][0] * d[0] + m[c][1] * d[1] + m[c][2] * d[2];
  }
  return out;
}

video::Perturbation effective_offset(const video::Perturbation& delta, const ChannelModel& ch) {
  ch.validate();
  std::vector<double> u(delta.trace().begin(), delta.trace().end());
  if (!(ch.crosstalk == ChannelModel{}.crosstalk)) u = chromatic_stage(u, ch.crosstalk);
  if (ch.ambient != std::array<double, 3>{})
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += ch.ambient[i % kChannels];
  u = cyclic_ema(u, delta.frames(), ch.rise_alpha);
  if (ch.phase != 0) u = attack::roll(u, delta.frames(), ch.phase);
  return video::Perturbation(delta.dims(), std::move(u));
}

video::VideoTensor transmit(const video::VideoTensor& v, const video::Perturbation& delta, const ChannelModel& ch,
                            std::uint64_t seed) {
  if (!video::compatible(delta.dims(), v.dims())) throw ShapeError("transmit: perturbation does not fit the scene");
  const video::Perturbation e = effective_offset(delta, ch);
  const video::Dims& d = v.dims();
  SplitMix64 noise(seed);
  std::vector<double> out(v.size());
  const std::size_t pixels = d.height * d.width;
  std::size_t i = 0;
  for (std::size_t t = 0; t < d.frames; ++t) {
    for (std::size_t p = 0; p < pixels; ++p) {
      for (std::size_t c = 0; c < kChannels; ++c, ++i) {
        double x = v.data()[i] + e(t, c);
        if (ch.noise_sigma > 0.0) x += ch.noise_sigma * noise.normal();
        out[i] = std::clamp(x, d.v_min, d.v_max);
      }
    }
  }
  return video::VideoTensor(d, std::move(out));
}

std::vector<CalibrationRecord> pulse_probes(std::size_t frames, double amplitude, std::size_t width) {
  if (frames < 3 || width < 1 || width + 1 >= frames) throw ValidationError("pulse_probes: pulse does not fit");
  std::vector<CalibrationRecord> out;
  for (std::size_t c = 0; c < kChannels; ++c) {
    CalibrationRecord r;
    r.sent.assign(frames * kChannels, 0.0);
    for (std::size_t t = 1; t < 1 + width; ++t) r.sent[t * kChannels + c] = amplitude;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CalibrationRecord> observe(std::vector<CalibrationRecord> probes, const ChannelModel& ch,
                                       std::uint64_t seed) {
  ch.validate();
  SplitMix64 rng(seed);
  ChannelModel noiseless = ch;
  noiseless.noise_sigma = 0.0;
  for (CalibrationRecord& r : probes) {
    if (r.sent.empty() || r.sent.size() % kChannels != 0) throw ValidationError("observe: bad probe length");
    video::Dims d;
    d.frames = r.sent.size() / kChannels;
    d.height = d.width = 1;
    const video::Perturbation e = effective_offset(video::Perturbation(d, r.sent), noiseless);
    r.observed.assign(e.trace().begin(), e.trace().end());
    if (ch.noise_sigma > 0.0)
      for (double& v : r.observed) v += ch.noise_sigma * rng.normal();
  }
  return probes;
}

nlohmann::json to_json(const ChannelModel& ch) {
  nlohmann::json m = nlohmann::json::array();
  for (const auto& row : ch.crosstalk) m.push_back({row[0], row[1], row[2]});
  return {{"schema", "flicker.channel"},
          {"version", 1},
          {"crosstalk", m},
          {"rise_alpha", ch.rise_alpha},
          {"phase", ch.phase},
          {"ambient", {ch.ambient[0], ch.ambient[1], ch.ambient[2]}},
          {"noise_sigma", ch.noise_sigma}};
}

ChannelModel channel_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("schema", "") != "flicker.channel" || j.value("version", 0) != 1)
    throw ValidationError("expected a flicker.channel v1 document");
  ChannelModel ch;
  const auto& m = j.at("crosstalk");
  if (!m.is_array() || m.size() != 3) throw ValidationError("channel: crosstalk must be 3x3");
  for (std::size_t i = 0; i < 3; ++i) {
    if (!m[i].is_array() || m[i].size() != 3) throw ValidationError("channel: crosstalk must be 3x3");
    for (std::size_t k = 0; k < 3; ++k) ch.crosstalk[i][k] = m[i][k].get<double>();
  }
  ch.rise_alpha = j.at("rise_alpha").get<double>();
  ch.phase = j.at("phase").get<long>();
  const auto& b = j.at("ambient");
  if (!b.is_array() || b.size() != 3) throw ValidationError("channel: ambient must have 3 entries");
  for (std::size_t c = 0; c < 3; ++c) ch.ambient[c] = b[c].get<double>();
  ch.noise_sigma = j.at("noise_sigma").get<double>();
  ch.validate();
  return ch;
}

void write_calibration_csv(const std::filesystem::path& path, std::span<const CalibrationRecord> records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "frame,sent_r,sent_g,sent_b,observed_r,observed_g,observed_b\n";
  char line[256];
  for (const CalibrationRecord& r : records) {
    for (std::size_t t = 0; t < r.sent.size() / kChannels; ++t) {
      const double* s = r.sent.data() + t * kChannels;
      const double* o = r.observed.data() + t * kChannels;
      std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", t, s[0], s[1], s[2], o[0], o[1],
                    o[2]);
      out << line;
    }
  }
}

std::vector<CalibrationRecord> read_calibration_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (line.rfind("frame,", 0) != 0) throw ValidationError(path.string() + ": missing calibration CSV header");
  std::vector<CalibrationRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::size_t frame;
    double v[6];
    if (!(fields >> frame >> v[0] >> v[1] >> v[2] >> v[3] >> v[4] >> v[5]))
      throw ValidationError(path.string() + ": malformed row at line " + std::to_string(line_no));
    if (frame == 0) out.emplace_back();
    if (out.empty() || frame != out.back().sent.size() / kChannels)
      throw ValidationError(path.string() + ": frames out of order at line " + std::to_string(line_no));
    out.back().sent.insert(out.back().sent.end(), v, v + 3);
    out.back().observed.insert(out.back().observed.end(), v + 3, v + 6);
  }
  return out;
}

}  // namespace flicker::ota
