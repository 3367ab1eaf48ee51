#include "flicker/attack/temporal.hpp"

#include <algorithm>
#include <cmath>

#include "flicker/error.hpp"

namespace flicker::attack {
namespace {

std::size_t wrap(long i, std::size_t n) {
  const long m = static_cast<long>(n);
  return static_cast<std::size_t>(((i % m) + m) % m);
}

void require_frames(std::size_t frames, std::size_t need, const char* what) {
  if (frames < need)
    throw ValidationError(std::string(what) + " needs at least " + std::to_string(need) + " frames, got " +
                          std::to_string(frames));
}

double sum_squares(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

double sum_abs(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::abs(v);
  return s;
}

double per_element(const video::Perturbation& d) { return 1.0 / static_cast<double>(3 * d.frames()); }

}  // namespace

std::vector<double> roll(std::span<const double> x, std::size_t frames, long tau) {
  if (frames == 0 || x.size() % frames != 0) throw ShapeError("roll: buffer is not a whole number of frames");
  const std::size_t frame = x.size() / frames;
  const std::size_t shift = wrap(tau, frames);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < frames; ++i) {
    const std::size_t src = (i + shift) % frames;
    std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(src * frame), frame,
                out.begin() + static_cast<std::ptrdiff_t>(i * frame));
  }
  return out;
}

video::Perturbation roll(const video::Perturbation& p, long tau) {
  return video::Perturbation(p.dims(), roll(p.trace(), p.frames(), tau));
}

video::VideoTensor roll(const video::VideoTensor& v, long tau) {
  return video::VideoTensor(v.dims(), roll(v.data(), v.dims().frames, tau));
}

std::vector<double> temporal_diff1(std::span<const double> x, std::size_t frames) {
  require_frames(frames, 2, "temporal_diff1");
  std::vector<double> out = roll(x, frames, 1);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= x[i];
  return out;
}

std::vector<double> temporal_diff2(std::span<const double> x, std::size_t frames) {
  require_frames(frames, 3, "temporal_diff2");
  const std::vector<double> back = roll(x, frames, -1);
  std::vector<double> out = roll(x, frames, 1);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = back[i] - 2.0 * x[i] + out[i];
  return out;
}

video::Perturbation temporal_diff1(const video::Perturbation& p) {
  return video::Perturbation(p.dims(), temporal_diff1(p.trace(), p.frames()));
}

video::Perturbation temporal_diff2(const video::Perturbation& p) {
  return video::Perturbation(p.dims(), temporal_diff2(p.trace(), p.frames()));
}

double p_norm(std::span<const double> x, double p) {
  if (!(p >= 1.0)) throw ValidationError("p_norm: p must be >= 1");
  double s = 0.0;
  for (double v : x) s += std::pow(std::abs(v), p);
  return std::pow(s, 1.0 / p);
}

double thickness_reg(const video::Perturbation& delta) { return sum_squares(delta.trace()) * per_element(delta); }

std::vector<double> thickness_reg_grad(const video::Perturbation& delta) {
  std::vector<double> g(delta.trace().begin(), delta.trace().end());
  const double scale = 2.0 * per_element(delta);
  for (double& v : g) v *= scale;
  return g;
}

double roughness_reg(const video::Perturbation& delta) {
  require_frames(delta.frames(), 3, "roughness_reg");
  const auto d1 = temporal_diff1(delta.trace(), delta.frames());
  const auto d2 = temporal_diff2(delta.trace(), delta.frames());
  return (sum_squares(d1) + sum_squares(d2)) * per_element(delta);
}

std::vector<double> roughness_reg_grad(const video::Perturbation& delta) {
  require_frames(delta.frames(), 3, "roughness_reg");
  const std::size_t T = delta.frames();
  const auto d1 = temporal_diff1(delta.trace(), T);
  const auto d2 = temporal_diff2(delta.trace(), T);
  // Adjoint of diff1 is roll(., -1) - id; diff2 is self-adjoint.
  const auto d1_back = roll(d1, T, -1);
  const auto d2_fwd = roll(d2, T, 1);
  const auto d2_back = roll(d2, T, -1);
  const double scale = 2.0 * per_element(delta);
  std::vector<double> g(d1.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    g[i] = scale * ((d1_back[i] - d1[i]) + (d2_fwd[i] - 2.0 * d2[i] + d2_back[i]));
  return g;
}

double metric_thickness(const video::Perturbation& delta) { return sum_abs(delta.trace()) * per_element(delta); }

double metric_roughness(const video::Perturbation& delta) {
  return sum_abs(temporal_diff1(delta.trace(), delta.frames())) * per_element(delta);
}

double metric_linf(const video::Perturbation& delta) {
  double m = 0.0;
  for (double v : delta.trace()) m = std::max(m, std::abs(v));
  return m;
}

double to_percent(double gray_level, const video::Dims& dims) { return gray_level / dims.range() * 100.0; }

MetricsReport metrics(const video::Perturbation& delta) {
  return {to_percent(metric_thickness(delta), delta.dims()), to_percent(metric_roughness(delta), delta.dims()),
          to_percent(metric_linf(delta), delta.dims())};
}

video::Perturbation project_linf(const video::Perturbation& delta, double zeta) {
  if (!(zeta > 0.0) || !std::isfinite(zeta)) throw ValidationError("project_linf: zeta must be finite and > 0");
  std::vector<double> t(delta.trace().begin(), delta.trace().end());
  for (double& v : t) v = std::clamp(v, -zeta, zeta);
  return video::Perturbation(delta.dims(), std::move(t));
}

double zeta_from_percent(double linf_pct, const video::Dims& dims) {
  if (!(linf_pct > 0.0) || !std::isfinite(linf_pct)) throw ValidationError("l-infinity budget must be > 0 percent");
  return linf_pct / 100.0 * dims.range();
}

}  // namespace flicker::attack
