#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "flicker/error.hpp"
#include "flicker/ota/channel.hpp"

namespace flicker::ota {

using video::kChannels;

namespace {

constexpr Eigen::Index kUnknowns = 13;  // alpha*M (9), alpha*b (3), 1 - alpha

struct Fit {
  Eigen::VectorXd coef;
  double rms = 0.0;
  Eigen::Index rank = 0;
};

// rank < kUnknowns leaves coef empty.
Fit fit_phase(std::span<const CalibrationRecord> records, std::size_t frames, std::size_t phase) {
  const Eigen::Index rows = static_cast<Eigen::Index>(records.size() * frames * kChannels);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(rows, kUnknowns);
  Eigen::VectorXd y(rows);
  Eigen::Index row = 0;
  for (const CalibrationRecord& r : records) {
    for (std::size_t t = 0; t < frames; ++t) {
      const double* sent = r.sent.data() + ((t + phase) % frames) * kChannels;
      const double* prev = r.observed.data() + ((t + frames - 1) % frames) * kChannels;
      for (std::size_t c = 0; c < kChannels; ++c, ++row) {
        for (std::size_t j = 0; j < kChannels; ++j) x(row, static_cast<Eigen::Index>(c * 3 + j)) = sent[j];
        x(row, static_cast<Eigen::Index>(9 + c)) = 1.0;
        x(row, 12) = prev[c];
        y(row) = r.observed[t * kChannels + c];
      }
    }
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  Fit f;
  f.rank = qr.rank();
  if (f.rank < kUnknowns) return f;
  f.coef = qr.solve(y);
  f.rms = std::sqrt((x * f.coef - y).squaredNorm() / static_cast<double>(rows));
  return f;
}

}  // namespace

CalibrationResult calibrate(std::span<const CalibrationRecord> records) {
  if (records.empty()) throw CalibrationError("calibration needs at least one probe record");
  const std::size_t n = records.front().sent.size();
  if (n == 0 || n % kChannels != 0) throw CalibrationError("calibration record has a malformed trace");
  for (const CalibrationRecord& r : records)
    if (r.sent.size() != n || r.observed.size() != n)
      throw CalibrationError("calibration records must share one length with matching sent/observed traces");
  const std::size_t frames = n / kChannels;
  if (frames < 3) throw CalibrationError("calibration records need at least 3 frames");

  // A lag-free channel makes the design for one shift collinear with the
  // previous observation; such shifts are skipped rather than fatal.
  Fit best;
  std::size_t best_phase = 0;
  Eigen::Index top_rank = 0;
  best.rms = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < frames; ++p) {
    Fit f = fit_phase(records, frames, p);
    top_rank = std::max(top_rank, f.rank);
    if (f.rank == kUnknowns && f.rms < best.rms) {
      best = std::move(f);
      best_phase = p;
    }
  }
  if (best.coef.size() == 0)
    throw CalibrationError("calibration probes are rank-deficient (rank " + std::to_string(top_rank) +
                           " of 13); every colour channel must be excited");

  double alpha = 1.0 - best.coef(12);
  if (!(alpha > 1e-6)) throw CalibrationError("fitted rise response is not a stable first-order lag");
  alpha = std::min(alpha, 1.0);

  CalibrationResult out;
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t j = 0; j < 3; ++j) out.model.crosstalk[c][j] = best.coef(static_cast<Eigen::Index>(c * 3 + j)) / alpha;
    out.model.ambient[c] = best.coef(static_cast<Eigen::Index>(9 + c)) / alpha;
  }
  out.model.rise_alpha = alpha;
  out.model.phase = static_cast<long>(best_phase);
  out.model.noise_sigma = best.rms;
  out.residual_rms = best.rms;
  return out;
}

double condition_number(const Matrix3& m) {
  Eigen::Matrix3d e;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) e(i, j) = m[i][j];
  const Eigen::Vector3d s = e.jacobiSvd().singularValues();
  if (s(2) <= 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / s(2);
}

video::Perturbation precompensate(const video::Perturbation& delta, const ChannelModel& estimate,
                                  bool clip_to_command_range) {
  estimate.validate();
  const double cond = condition_number(estimate.crosstalk);
  if (!(cond < 1e6)) throw CalibrationError("crosstalk matrix is ill-conditioned (cond = " + std::to_string(cond) + ")");
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = estimate.crosstalk[i][j];
  const Eigen::Matrix3d inv = m.inverse();
  Matrix3 inv_a;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) inv_a[i][j] = inv(i, j);
  std::vector<double> cmd = chromatic_stage(delta.trace(), inv_a);
  if (clip_to_command_range) {
    const double half = delta.dims().range() / 2.0;
    for (double& v : cmd) v = std::clamp(v, -half, half);
  }
  return video::Perturbation(delta.dims(), std::move(cmd));
}

}  // namespace flicker::ota
