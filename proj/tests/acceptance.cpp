// Acceptance run: one PASS/FAIL line per criterion. Criteria share one
// trained model and one sweep, computed on first use.
//
//   flicker_acceptance [--config FILE] [--out DIR] [--strict] [criteria...]

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "flicker/attack/baselines.hpp"
#include "flicker/attack/evaluation.hpp"
#include "flicker/attack/loss.hpp"
#include "flicker/attack/objective.hpp"
#include "flicker/attack/serialize.hpp"
#include "flicker/attack/temporal.hpp"
#include "flicker/diffnet/checkpoint.hpp"
#include "flicker/diffnet/network.hpp"
#include "flicker/diffnet/train.hpp"
#include "flicker/error.hpp"
#include "flicker/harness/config.hpp"
#include "flicker/harness/experiments.hpp"
#include "flicker/harness/report.hpp"
#include "flicker/ota/channel.hpp"
#include "support.hpp"

using namespace flicker;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned thresholds.
constexpr double kGradTol = 1e-5;
constexpr double kGradMaxSeconds = 120.0;
constexpr int kKinkRetries = 8;
constexpr double kExactTol = 1e-12;
constexpr double kTrainAccuracy = 0.95;
constexpr double kTrainMaxSeconds = 600.0;
constexpr std::size_t kSingleClips = 50;
constexpr double kSingleThicknessCap = 10.0;  // percent
constexpr double kSingleMaxSeconds = 1200.0;
constexpr std::size_t kSingleIterations = 600;
constexpr double kSingleLearningRate = 0.01;
constexpr double kTimeInvariantMaxDrop = 0.20;
constexpr double kTransferBudget = 20.0;
constexpr std::size_t kRoughnessTrials = 1000;
constexpr double kCalibrationTol = 1e-6;
constexpr double kOtaSuccess = 0.80;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void note(const std::string& s) { std::cerr << "  .. " << s << std::endl; }

struct MeanStd {
  double mean = 0.0, std = 0.0;
};

MeanStd fooling_stats(const std::vector<attack::EvalReport>& reps) {
  MeanStd m;
  for (const auto& r : reps) m.mean += r.fooling_ratio;
  m.mean /= static_cast<double>(reps.size());
  if (reps.size() > 1) {
    for (const auto& r : reps) m.std += (r.fooling_ratio - m.mean) * (r.fooling_ratio - m.mean);
    m.std = std::sqrt(m.std / static_cast<double>(reps.size() - 1));
  }
  return m;
}

const attack::Baseline kBaselines[] = {attack::Baseline::kUniform, attack::Baseline::kMinMax,
                                       attack::Baseline::kShuffle};

struct Verdict {
  bool pass = false;
  std::string detail;
};

// Shared experiment state, built lazily so any subset of criteria can run.
class Context {
 public:
  Context(harness::ExperimentConfig x, fs::path out) : x_(std::move(x)), out_(std::move(out)) {
    fs::create_directories(out_);
  }

  const harness::ExperimentConfig& config() const { return x_; }
  const fs::path& out() const { return out_; }

  const harness::Splits& splits() {
    if (!splits_) splits_ = harness::make_splits(x_.dataset, x_.eval_per_class);
    return *splits_;
  }

  const diffnet::ModelParams& model_a() {
    if (!a_) {
      note("training architecture A");
      const auto t = Clock::now();
      diffnet::TrainConfig tc = x_.train;
      tc.arch = diffnet::Architecture::kA;
      a_ = diffnet::train(splits().train, x_.dataset.num_classes, tc);
      train_seconds_ = seconds_since(t);
      diffnet::save_checkpoint(out_ / "A.flkm", *a_);
    }
    return *a_;
  }
  double train_seconds() const { return train_seconds_; }

  const diffnet::ModelParams& model_b() {
    if (!b_) {
      note("training architecture B");
      diffnet::TrainConfig tc = x_.train;
      tc.arch = diffnet::Architecture::kB;
      b_ = diffnet::train(splits().train, x_.dataset.num_classes, tc);
      diffnet::save_checkpoint(out_ / "B.flkm", *b_);
    }
    return *b_;
  }

  const harness::Filtered& clean_a() {
    if (!clean_a_) clean_a_ = harness::clean_filter(model_a(), splits().eval);
    return *clean_a_;
  }

  const std::vector<harness::SweepPoint>& sweep() {
    if (!sweep_) sweep_ = run_sweep();
    return *sweep_;
  }

  std::vector<harness::SweepPoint> run_sweep() {
    note("universal sweep over " + std::to_string(x_.sweep_linf_pct.size()) + " budgets");
    return harness::baseline_sweep(model_a(), splits().train, clean_a().kept, x_.attack, x_.sweep_linf_pct,
                                   x_.repeats, note);
  }

  const harness::SweepPoint& sweep_at(double budget) {
    for (const auto& p : sweep())
      if (p.budget_pct == budget) return p;
    throw flicker::ValidationError(fmt("budget %.3g%% is not part of the sweep", budget));
  }

  harness::OtaOutcome run_ota() {
    const harness::Filtered& f = clean_a();
    std::vector<video::ClipParams> params;
    for (std::size_t i : f.indices) params.push_back(splits().eval_params[i]);
    return harness::scene_ota(model_a(), f.kept, params, x_.dataset, x_.channel, x_.ota, x_.attack, note);
  }

  const harness::OtaOutcome& ota() {
    if (!ota_) ota_ = run_ota();
    return *ota_;
  }

 private:
  harness::ExperimentConfig x_;
  fs::path out_;
  std::optional<harness::Splits> splits_;
  std::optional<diffnet::ModelParams> a_, b_;
  double train_seconds_ = 0.0;
  std::optional<harness::Filtered> clean_a_;
  std::optional<std::vector<harness::SweepPoint>> sweep_;
  std::optional<harness::OtaOutcome> ota_;
};

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << s;
}

// Serialized outputs of the sweep and the OTA experiment, file name -> bytes.
std::vector<std::pair<std::string, std::string>> artifacts(const std::vector<harness::SweepPoint>& sweep,
                                                           const harness::OtaOutcome& ota,
                                                           const diffnet::ModelParams& model) {
  std::vector<std::pair<std::string, std::string>> out;
  const auto rows = harness::sweep_rows(sweep, "A");
  out.emplace_back("baseline_sweep.csv", harness::to_csv(rows));
  out.emplace_back("plot_data.json", harness::plot_data(rows).dump(2) + "\n");
  for (const auto& p : sweep) {
    const std::string tag = fmt("%g", p.budget_pct);
    out.emplace_back("universal_b" + tag + ".json", attack::to_json(p.universal.result).dump(2) + "\n");
    out.emplace_back("universal_b" + tag + "_eval.json",
                     harness::eval_artifact(p.universal.report, model.dims, "universal", "A", p.budget_pct).dump(2) +
                         "\n");
  }
  out.emplace_back("ota_trials.csv", harness::ota_trials_csv(ota));
  out.emplace_back("channel_estimate.json", ota::to_json(ota.calibration.model).dump(2) + "\n");
  return out;
}

// ------------------------------------------------------------------ 1

Verdict gradient_suite(Context&) {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::size_t checked = 0, total = 0, resampled = 0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    SplitMix64 rng = SplitMix64(0x67726164).split(i);
    const auto arch = i % 2 == 0 ? diffnet::Architecture::kA : diffnet::Architecture::kB;
    const video::Dims d = testing::small_dims(16, 8, 8);
    const std::size_t k = 6;
    const diffnet::ModelParams p = testing::random_model(arch, d, k, rng());

    std::vector<video::LabeledVideo> batch;
    for (int n = 0; n < 2; ++n) {
      video::VideoTensor v = testing::random_video(d, rng(), -0.95, 0.95);
      const std::size_t label = diffnet::forward(p, v).top_class;
      batch.push_back({std::move(v), label});
    }
    attack::MarginSpec spec;
    spec.margin = rng.uniform(0.02, 0.3);
    if (i % 4 == 3) {
      spec.direction = attack::Direction::kTargeted;
      spec.cls = (batch[0].label + 1) % k;
    }
    const attack::RegWeights w{rng.uniform(0.5, 2.0), rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
    std::optional<std::vector<long>> taus;
    if (i % 3 == 2) taus = std::vector<long>{static_cast<long>(rng.below(16)), static_cast<long>(rng.below(16))};
    const auto tau_span = taus ? std::optional<std::span<const long>>(*taus) : std::nullopt;
    const video::Perturbation delta = testing::random_delta(d, rng(), 0.15);

    const attack::ObjectiveValue obj = attack::objective(delta, batch, p, w, spec, tau_span);
    for (std::size_t j = 0; j < delta.size(); ++j) {
      ++total;
      // A ReLU kink, a runner-up switch or a pixel crossing the clamp inside
      // the stencil shows up as disagreement between two step sizes. Such a
      // coordinate is re-drawn a little further along its own axis.
      video::Perturbation base = delta;
      double analytic = obj.grad[j];
      for (int attempt = 0; attempt < kKinkRetries; ++attempt) {
        if (attempt > 0) {
          base.trace()[j] = delta.trace()[j] + rng.uniform(-1e-3, 1e-3);
          analytic = attack::objective(base, batch, p, w, spec, tau_span).grad[j];
        }
        auto at = [&](double h) {
          video::Perturbation x = base;
          x.trace()[j] += h;
          return attack::objective(x, batch, p, w, spec, tau_span, false).loss;
        };
        const double fd = (at(1e-4) - at(-1e-4)) / 2e-4;
        const double fd_narrow = (at(1e-5) - at(-1e-5)) / 2e-5;
        const double scale = std::max({std::abs(fd), std::abs(fd_narrow), 1e-8});
        if (std::abs(fd - fd_narrow) / scale > 1e-6) continue;
        ++checked;
        resampled += attempt > 0 ? 1 : 0;
        worst = std::max(worst, std::abs(analytic - fd) / std::max({std::abs(analytic), std::abs(fd), 1e-8}));
        break;
      }
    }
  }
  const double secs = seconds_since(t0);
  return {worst < kGradTol && secs < kGradMaxSeconds && checked == total,
          fmt("max rel err %.2e, %zu/%zu coordinates checked (%zu resampled near a kink), 20 instances, %.1f s", worst,
              checked, total, resampled, secs)};
}

// ------------------------------------------------------------------ 2

Verdict formula_suite(Context&) {
  double worst = 0.0;
  bool exact = true;
  auto dev = [&](double got, double want) { worst = std::max(worst, std::abs(got - want)); };

  const video::Dims d = testing::small_dims(16, 1, 1);
  const video::Perturbation x = testing::random_delta(d, 5, 0.3);
  exact = exact && attack::roll(x, 0) == x && attack::roll(x, 16) == x;
  for (long a : {-20L, -1L, 3L, 7L})
    for (long b : {-5L, 2L, 17L}) exact = exact && attack::roll(attack::roll(x, a), b) == attack::roll(x, a + b);
  for (long tau : {1L, 9L}) {
    dev(attack::roughness_reg(attack::roll(x, tau)), attack::roughness_reg(x));
    dev(attack::metric_thickness(attack::roll(x, tau)), attack::metric_thickness(x));
  }

  video::Perturbation flat(d);
  for (double& v : flat.trace()) v = 0.1;
  dev(attack::roughness_reg(flat), 0.0);
  dev(attack::metrics(flat).thickness_pct, 5.0);
  dev(attack::metrics(flat).roughness_pct, 0.0);

  const double a = 0.4;
  video::Perturbation spike(d);
  spike(5, 2) = a;
  const auto d1 = attack::temporal_diff1(spike);
  const auto d2 = attack::temporal_diff2(spike);
  for (std::size_t t = 0; t < 16; ++t) {
    const double w1 = t == 4 ? a : t == 5 ? -a : 0.0;
    const double w2 = t == 4 || t == 6 ? a : t == 5 ? -2 * a : 0.0;
    dev(d1(t, 2), w1);
    dev(d2(t, 2), w2);
    dev(d1(t, 0), 0.0);
  }
  dev(attack::roughness_reg(spike), 8 * a * a / 48.0);
  dev(attack::metric_roughness(spike), 2 * a / 48.0);

  auto probs = [](std::vector<double> y) {
    diffnet::Prediction p;
    p.probabilities = std::move(y);
    return p;
  };
  attack::MarginSpec m;  // untargeted, class 0, m = 0.05
  dev(attack::margin_loss(probs({0.6, 0.3, 0.1}), m), 0.35);
  dev(attack::margin_loss(probs({0.32, 0.35, 0.33}), m), 0.008);
  dev(attack::margin_loss(probs({0.2, 0.5, 0.3}), m), 0.0);
  dev(attack::margin_loss(probs({0.4, 0.4, 0.2}), m), 0.05);  // gap = m: both pieces meet
  const double below = attack::margin_loss(probs({0.4, 0.4 + 1e-9, 0.2 - 1e-9}), m);
  const double above = attack::margin_loss(probs({0.4 + 1e-9, 0.4, 0.2 - 1e-9}), m);
  dev(std::abs(above - below) < 1e-8 ? 0.0 : 1.0, 0.0);

  return {exact && worst <= kExactTol, fmt("max deviation %.1e, roll group laws %s", worst, exact ? "exact" : "BROKEN")};
}

// ------------------------------------------------------------------ 3

Verdict classifier_gate(Context& ctx) {
  const harness::Splits& s = ctx.splits();
  const diffnet::ModelParams& a = ctx.model_a();
  const double acc = diffnet::accuracy(a, s.eval);

  diffnet::TrainConfig brief = ctx.config().train;
  brief.epochs = 2;
  const auto k = ctx.config().dataset.num_classes;
  const bool same = diffnet::fingerprint(diffnet::train(s.train, k, brief)) ==
                    diffnet::fingerprint(diffnet::train(s.train, k, brief));
  const auto& dims = ctx.config().dataset.dims;
  return {acc >= kTrainAccuracy && ctx.train_seconds() < kTrainMaxSeconds && same,
          fmt("held-out accuracy %.1f%% (%zu train / %zu eval, K=%zu, T=%zu, %zux%zu), %.0f s, rerun %s", 100 * acc,
              s.train.size(), s.eval.size(), k, dims.frames, dims.height, dims.width, ctx.train_seconds(),
              same ? "bit-identical" : "DIFFERS")};
}

// ------------------------------------------------------------------ 4

Verdict single_video(Context& ctx) {
  const auto& kept = ctx.clean_a().kept;
  if (kept.size() < kSingleClips) return {false, fmt("only %zu clean clips", kept.size())};
  std::vector<video::LabeledVideo> clips;
  for (std::size_t i = 0; i < kSingleClips; ++i) clips.push_back(kept[i * kept.size() / kSingleClips]);

  attack::AttackConfig cfg = attack::AttackConfig::defaults(attack::AttackMode::kSingleVideo);
  cfg.margin = ctx.config().attack.margin;
  cfg.learning_rate = kSingleLearningRate;
  cfg.iterations = kSingleIterations;
  cfg.eval_every = 10;
  cfg.seed = ctx.config().attack.seed;

  const auto t0 = Clock::now();
  std::size_t n = 0;
  const auto outs = harness::run_single_video(ctx.model_a(), clips, cfg, [&](const std::string& s) {
    if (++n % 10 == 0) note(s);
  });
  const double secs = seconds_since(t0);

  std::size_t fooled = 0;
  double thick = 0.0, rough = 0.0;
  std::string csv = "clip,label,fooled,thickness_pct,roughness_pct,best_iteration\n";
  for (std::size_t i = 0; i < outs.size(); ++i) {
    fooled += outs[i].report.fooling_ratio == 1.0 ? 1 : 0;
    thick += outs[i].report.thickness_pct;
    rough += outs[i].report.roughness_pct;
    csv += fmt("%zu,%zu,%d,%.6f,%.6f,%zu\n", i, clips[i].label, outs[i].report.fooling_ratio == 1.0 ? 1 : 0,
               outs[i].report.thickness_pct, outs[i].report.roughness_pct, outs[i].result.best_iteration);
  }
  write_text(ctx.out() / "single_video.csv", csv);
  thick /= static_cast<double>(outs.size());
  rough /= static_cast<double>(outs.size());
  return {fooled == kSingleClips && thick <= kSingleThicknessCap && secs < kSingleMaxSeconds,
          fmt("%zu/%zu fooled, mean thickness %.2f%% (cap %.0f%%), mean roughness %.2f%%, %.0f s", fooled,
              kSingleClips, thick, kSingleThicknessCap, rough, secs)};
}

// ------------------------------------------------------------------ 5

Verdict universal_vs_random(Context& ctx) {
  const auto& sweep = ctx.sweep();
  bool pass = true;
  std::string detail;
  double prev = -1.0;
  for (const auto& p : sweep) {
    const double u = p.universal.report.fooling_ratio;
    double worst_bar = 0.0;
    for (attack::Baseline b : kBaselines) {
      const MeanStd s = fooling_stats(p.baselines[static_cast<std::size_t>(b)]);
      worst_bar = std::max(worst_bar, s.mean + 2 * s.std);
    }
    const bool beats = u > worst_bar;
    const bool monotone = u >= prev;
    pass = pass && beats && monotone;
    prev = u;
    detail += fmt("%s%g%%: %.1f%% vs max baseline mean+2sd %.1f%%%s%s", detail.empty() ? "" : "; ", p.budget_pct,
                  100 * u, 100 * worst_bar, beats ? "" : " (not above)", monotone ? "" : " (not monotone)");
  }
  const auto rows = harness::sweep_rows(sweep, "A");
  harness::write_csv(ctx.out() / "baseline_sweep.csv", rows);
  attack::write_json(ctx.out() / "plot_data.json", harness::plot_data(rows));
  return {pass, detail};
}

// ------------------------------------------------------------------ 6

Verdict time_invariance(Context& ctx) {
  const auto& kept = ctx.clean_a().kept;
  attack::AttackConfig cfg = ctx.config().attack;
  cfg.time_invariant = true;
  cfg.zeta = attack::zeta_from_percent(kTransferBudget, ctx.model_a().dims);
  note("time-invariant universal attack");
  const harness::Outcome ti =
      harness::run_attack(ctx.model_a(), ctx.splits().train, kept, cfg, attack::TauMode::sweep_all());
  attack::write_json(ctx.out() / "time_invariant.json", attack::to_json(ti.result));
  const double ti_sweep = ti.report.fooling_ratio;
  const double ti_sync = attack::fooling_ratio(ctx.model_a(), kept, ti.result.delta, attack::TauMode::synchronized());
  const video::Perturbation& sync_delta = ctx.sweep_at(kTransferBudget).universal.result.delta;
  const double sync_sweep = attack::fooling_ratio(ctx.model_a(), kept, sync_delta, attack::TauMode::sweep_all());
  const double drop = ti_sync - ti_sweep;
  return {drop <= kTimeInvariantMaxDrop && ti_sweep > sync_sweep,
          fmt("at %g%%: time-invariant %.1f%% synchronized -> %.1f%% all shifts (drop %.1f pp); synchronized-trained "
              "%.1f%% over all shifts",
              kTransferBudget, 100 * ti_sync, 100 * ti_sweep, 100 * drop, 100 * sync_sweep)};
}

// ------------------------------------------------------------------ 7

Verdict transferability(Context& ctx) {
  const video::Perturbation& delta_a = ctx.sweep_at(kTransferBudget).universal.result.delta;
  const diffnet::ModelParams& b = ctx.model_b();
  const harness::Filtered kept_b = harness::clean_filter(b, ctx.splits().eval);
  const auto mode = attack::TauMode::synchronized();
  const attack::EvalReport on_b = attack::transfer_eval(delta_a, b, kept_b.kept, mode);
  const std::uint64_t seed = SplitMix64(ctx.config().attack.seed).split(0x7472616e)();
  bool pass = true;
  std::string bars;
  for (attack::Baseline kind : kBaselines) {
    const MeanStd s =
        fooling_stats(harness::baseline_reports(kind, delta_a, b, kept_b.kept, ctx.config().repeats, seed, mode));
    pass = pass && on_b.fooling_ratio > s.mean + 2 * s.std;
    bars += fmt(", %s %.1f+-%.1f%%", attack::baseline_name(kind), 100 * s.mean, 100 * s.std);
  }
  const double acc_b = diffnet::accuracy(b, ctx.splits().eval);
  attack::write_json(ctx.out() / "transfer_A_on_B.json",
                     harness::eval_artifact(on_b, b.dims, "universal@A", "B", kTransferBudget));
  return {pass, fmt("delta_A at %g%% on B (accuracy %.1f%%, %zu clean clips): %.1f%%%s", kTransferBudget, 100 * acc_b,
                    kept_b.kept.size(), 100 * on_b.fooling_ratio, bars.c_str())};
}

// ------------------------------------------------------------------ 8

Verdict ota_channel(Context& ctx) {
  const video::Dims d = ctx.config().dataset.dims;
  bool identity = true;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const video::VideoTensor v = testing::random_video(d, 7000 + s, -1.0, 1.0);
    const video::Perturbation delta = testing::random_delta(d, 8000 + s, 0.5);
    const video::VideoTensor a = ota::transmit(v, delta, ota::ChannelModel{}, s);
    const video::VideoTensor b = attack::apply_perturbation(v, delta);
    identity = identity && std::memcmp(a.data().data(), b.data().data(), a.size() * sizeof(double)) == 0;
  }

  SplitMix64 rng(0x726f7567);
  std::size_t violations = 0;
  for (std::size_t i = 0; i < kRoughnessTrials; ++i) {
    ota::ChannelModel ch;
    ch.rise_alpha = rng.uniform(0.02, 1.0);
    ch.phase = static_cast<long>(rng.below(d.frames));
    const video::Perturbation delta = testing::random_delta(d, rng(), rng.uniform(0.01, 0.5));
    if (attack::metric_roughness(ota::effective_offset(delta, ch)) > attack::metric_roughness(delta) + 1e-12)
      ++violations;
  }

  ota::ChannelModel truth = ctx.config().channel;
  truth.noise_sigma = 0.0;
  const ota::CalibrationResult fit = ota::calibrate(ota::observe(
      ota::pulse_probes(d.frames, ctx.config().ota.probe_amplitude, ctx.config().ota.probe_width), truth, 0));
  double m_err = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) m_err = std::max(m_err, std::abs(fit.model.crosstalk[i][j] - truth.crosstalk[i][j]));

  const harness::OtaOutcome& o = ctx.ota();
  std::size_t digital = 0;
  for (const auto& t : o.trials) digital += t.digital_fooled ? 1 : 0;
  write_text(ctx.out() / "ota_trials.csv", harness::ota_trials_csv(o));
  const bool pass = identity && violations == 0 && m_err <= kCalibrationTol && !o.trials.empty() &&
                    o.success_rate() >= kOtaSuccess;
  return {pass, fmt("identity transmit %s; roughness violations %zu/%zu; calibrated M error %.1e; scene OTA %.0f%% "
                    "(%zu trials, %zu skipped, digital %zu/%zu, noisy calibration rms %.1e)",
                    identity ? "bit-identical" : "DIFFERS", violations, kRoughnessTrials, m_err,
                    100 * o.success_rate(), o.trials.size(), o.skipped, digital, o.trials.size(),
                    o.calibration.residual_rms)};
}

// ------------------------------------------------------------------ 9

Verdict determinism(Context& ctx) {
  const auto first = artifacts(ctx.sweep(), ctx.ota(), ctx.model_a());
  for (const auto& [name, bytes] : first) write_text(ctx.out() / name, bytes);
  note("re-running the sweep and the OTA experiment");
  const auto second = artifacts(ctx.run_sweep(), ctx.run_ota(), ctx.model_a());
  std::size_t differ = 0;
  std::string which;
  for (std::size_t i = 0; i < first.size(); ++i)
    if (i >= second.size() || first[i] != second[i]) {
      ++differ;
      which += " " + first[i].first;
    }
  return {differ == 0 && first.size() == second.size(),
          fmt("%zu CSV/JSON artifacts compared byte for byte, %zu differ%s", first.size(), differ, which.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance run for the flickering attack library"};
  std::string config_path, out_dir = "acceptance_out";
  bool strict = false;
  std::vector<int> only;
  app.add_option("--config", config_path, "Experiment config")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Directory for artifacts and the results file");
  app.add_flag("--strict", strict, "Exit with status 1 when any criterion fails");
  app.add_option("criteria", only, "Subset of criteria to run (1-9)")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);

  harness::ExperimentConfig x;
  if (!config_path.empty()) {
    x = harness::ExperimentConfig::load(config_path);
  } else {
    x.apply_seed(x.seed);
  }
  x.validate();
  Context ctx(x, out_dir);

  const std::vector<std::pair<const char*, std::function<Verdict(Context&)>>> criteria{
      {"gradient suite", gradient_suite},
      {"formula suite", formula_suite},
      {"classifier gate", classifier_gate},
      {"single-video attack", single_video},
      {"universal vs random baselines", universal_vs_random},
      {"time invariance", time_invariance},
      {"transferability A -> B", transferability},
      {"over-the-air channel", ota_channel},
      {"determinism", determinism},
  };
  const std::set<int> wanted(only.begin(), only.end());

  std::ofstream results(fs::path(out_dir) / "acceptance_results.txt", std::ios::trunc);
  std::size_t failed = 0;
  const auto t0 = Clock::now();
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!wanted.empty() && !wanted.count(id)) continue;
    std::cerr << "criterion " << id << ": " << criteria[i].first << std::endl;
    const auto t = Clock::now();
    Verdict v;
    try {
      v = criteria[i].second(ctx);
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const std::string line = fmt("[%s] %d %s: %s (%.0f s)", v.pass ? "PASS" : "FAIL", id, criteria[i].first,
                                 v.detail.c_str(), seconds_since(t));
    std::cout << line << std::endl;
    results << line << "\n";
    failed += v.pass ? 0 : 1;
  }
  const std::string summary = fmt("%zu failed, total %.0f s", failed, seconds_since(t0));
  std::cout << summary << std::endl;
  results << summary << "\n";
  return strict && failed > 0 ? 1 : 0;
}
