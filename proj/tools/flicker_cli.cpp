// flicker: command-line front end for dataset generation, classifier training,
// flickering attacks, baselines, transfer, OTA simulation and reports.
//
// Exit codes: 0 success, 1 usage or validation error, 2 runtime error.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "dataset_dir.hpp"
#include "flicker/attack/serialize.hpp"
#include "flicker/attack/temporal.hpp"
#include "flicker/diffnet/checkpoint.hpp"
#include "flicker/diffnet/network.hpp"
#include "flicker/error.hpp"
#include "flicker/harness/report.hpp"
#include "flicker/video/io.hpp"

namespace fs = std::filesystem;
using namespace flicker;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "Experiment config (key = value with [sections])")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "Global seed; re-derives dataset, training and attack streams");
}

harness::ExperimentConfig load_config(const Common& c) {
  harness::ExperimentConfig x;
  if (!c.config.empty()) {
    x = harness::ExperimentConfig::load(c.config);
  } else {
    x.apply_seed(x.seed);
    x.validate();
  }
  if (c.seed) x.apply_seed(*c.seed);
  return x;
}

void log(const std::string& line) { std::cerr << line << "\n"; }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<double> parse_list(const std::string& text) {
  harness::Config c = harness::Config::parse("v = " + text, "--linf-pct");
  return c.reals("v", {});
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string model_name(const diffnet::ModelParams& m) { return diffnet::architecture_name(m.arch); }

harness::Filtered filtered_eval(const diffnet::ModelParams& model, const cli::DatasetDir& data) {
  if (!(model.dims == data.spec.dims)) throw ValidationError("model and dataset have different clip dims");
  if (model.num_classes != data.spec.num_classes)
    throw ValidationError("model and dataset have different class counts");
  harness::Filtered f = harness::clean_filter(model, data.splits.eval);
  log("clean filter: kept " + std::to_string(f.kept.size()) + " of " + std::to_string(f.total) + " eval clips");
  if (f.kept.empty()) throw ValidationError("no eval clip is classified correctly; nothing to attack");
  return f;
}

// A perturbation from an attack-result JSON (full precision) or an FLKP file.
video::Perturbation load_delta(const fs::path& path) {
  if (path.extension() == ".json") return attack::attack_result_from_json(attack::read_json(path)).delta;
  return video::load_perturbation(path);
}

std::string budget_tag(double pct) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", pct);
  return buf;
}

// ---------------------------------------------------------------- gen-data

struct GenData {
  Common common;
  std::string out;
};

void run_gen_data(const GenData& o) {
  const harness::ExperimentConfig x = load_config(o.common);
  cli::write_dataset_dir(o.out, x.dataset, x.eval_per_class);
  std::cout << "wrote " << x.dataset.num_classes * x.dataset.clips_per_class << " train and "
            << x.dataset.num_classes * x.eval_per_class << " eval clips to " << o.out << "\n";
}

// ---------------------------------------------------------------- train

struct Train {
  Common common;
  std::string data, out, arch;
  std::optional<std::size_t> epochs;
};

void run_train(const Train& o) {
  harness::ExperimentConfig x = load_config(o.common);
  if (!o.arch.empty()) x.train.arch = diffnet::parse_architecture(o.arch);
  if (o.epochs) x.train.epochs = *o.epochs;
  const cli::DatasetDir data = cli::read_dataset_dir(o.data);
  nlohmann::json losses = nlohmann::json::array();
  const diffnet::ModelParams model =
      diffnet::train(data.splits.train, data.spec.num_classes, x.train, [&](const diffnet::EpochStats& e) {
        losses.push_back(e.mean_loss);
        log("epoch " + std::to_string(e.epoch) + " loss " + fmt("%.5f", e.mean_loss));
      });
  diffnet::save_checkpoint(o.out, model);
  const double train_acc = diffnet::accuracy(model, data.splits.train);
  const double eval_acc = diffnet::accuracy(model, data.splits.eval);
  attack::write_json(o.out + ".json", {{"schema", "flicker.train_summary"},
                                       {"version", 1},
                                       {"architecture", model_name(model)},
                                       {"fingerprint", attack::hex64(diffnet::fingerprint(model))},
                                       {"epochs", x.train.epochs},
                                       {"learning_rate", x.train.learning_rate},
                                       {"batch_size", x.train.batch_size},
                                       {"seed", attack::hex64(x.train.seed)},
                                       {"epoch_loss", losses},
                                       {"train_accuracy", train_acc},
                                       {"eval_accuracy", eval_acc}});
  std::cout << "model " << model_name(model) << ": train accuracy " << fmt("%.4f", train_acc)
            << ", held-out accuracy " << fmt("%.4f", eval_acc) << " -> " << o.out << "\n";
}

// ---------------------------------------------------------------- attack

struct Attack {
  Common common;
  std::string model, data, out, mode;
  std::optional<std::size_t> cls, iterations, clips;
  std::optional<double> linf_pct, lr;
  bool time_invariant = false;
};

void run_attack(const Attack& o) {
  harness::ExperimentConfig x = load_config(o.common);
  attack::AttackConfig cfg = x.attack;
  if (!o.mode.empty()) cfg.mode = attack::parse_mode(o.mode);
  if (o.cls) cfg.attacked_class = *o.cls;
  if (o.iterations) cfg.iterations = *o.iterations;
  if (o.lr) cfg.learning_rate = *o.lr;
  if (o.time_invariant) cfg.time_invariant = true;
  std::optional<double> budget = o.linf_pct ? o.linf_pct : x.linf_pct;

  const diffnet::ModelParams model = diffnet::load_checkpoint(o.model);
  if (budget) cfg.zeta = attack::zeta_from_percent(*budget, model.dims);
  cfg.validate();
  const cli::DatasetDir data = cli::read_dataset_dir(o.data);
  const harness::Filtered eval = filtered_eval(model, data);
  fs::create_directories(o.out);
  const fs::path out(o.out);
  const std::string mname = model_name(model);
  const attack::TauMode mode = cfg.time_invariant ? attack::TauMode::sweep_all() : attack::TauMode::synchronized();

  std::vector<harness::ReportRow> rows;
  if (cfg.mode == attack::AttackMode::kSingleVideo) {
    const std::size_t n = std::min(o.clips.value_or(eval.kept.size()), eval.kept.size());
    const auto outcomes =
        harness::run_single_video(model, std::span(eval.kept).subspan(0, n), cfg, [](const std::string& s) { log(s); });
    fs::create_directories(out / "single");
    std::vector<attack::EvalReport> reports;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      char stem[32];
      std::snprintf(stem, sizeof stem, "clip_%04zu", i);
      attack::write_json(out / "single" / (std::string(stem) + ".json"), attack::to_json(outcomes[i].result));
      attack::write_json(out / "single" / (std::string(stem) + "_eval.json"),
                         harness::eval_artifact(outcomes[i].report, model.dims, "single_video", mname, budget));
      reports.push_back(outcomes[i].report);
    }
    const double linf = budget.value_or(0.0);
    harness::ReportRow row = harness::aggregate("single_video", mname, linf, reports);
    if (!budget) {
      double mean = 0.0;
      for (const auto& r : reports) mean += r.linf_pct;
      row.linf_pct = mean / static_cast<double>(reports.size());
    }
    rows.push_back(row);
  } else {
    const std::string name = cfg.mode == attack::AttackMode::kSingleClass
                                 ? "single_class_" + std::to_string(cfg.attacked_class)
                                 : (cfg.time_invariant ? "time_invariant" : "universal");
    const harness::Outcome r = harness::run_attack(model, data.splits.train, eval.kept, cfg, mode);
    video::save_perturbation(out / "delta.flkp", r.result.delta);
    attack::write_json(out / "attack_result.json", attack::to_json(r.result, "delta.flkp"));
    attack::write_json(out / "eval_report.json", harness::eval_artifact(r.report, model.dims, name, mname, budget));
    const attack::EvalReport& rep = r.report;
    rows.push_back(harness::aggregate(name, mname, budget.value_or(rep.linf_pct), std::span(&rep, 1)));
  }
  harness::write_csv(out / "report.csv", rows);
  const harness::ReportRow& row = rows.front();
  std::cout << row.attack << " on " << row.model << ": fooling " << fmt("%.1f%%", row.fooling_pct) << ", thickness "
            << fmt("%.2f%%", row.thickness_pct) << ", roughness " << fmt("%.2f%%", row.roughness_pct) << " (n="
            << row.n << ") -> " << o.out << "\n";
}

// ---------------------------------------------------------------- baseline-sweep

struct Sweep {
  Common common;
  std::string model, data, out, budgets;
  std::optional<std::size_t> repeats, iterations;
};

void run_sweep(const Sweep& o) {
  harness::ExperimentConfig x = load_config(o.common);
  if (!o.budgets.empty()) x.sweep_linf_pct = parse_list(o.budgets);
  if (o.repeats) x.repeats = *o.repeats;
  if (o.iterations) x.attack.iterations = *o.iterations;
  x.attack.mode = attack::AttackMode::kUniversal;
  x.validate();

  const diffnet::ModelParams model = diffnet::load_checkpoint(o.model);
  const cli::DatasetDir data = cli::read_dataset_dir(o.data);
  const harness::Filtered eval = filtered_eval(model, data);
  const auto points = harness::baseline_sweep(model, data.splits.train, eval.kept, x.attack, x.sweep_linf_pct,
                                              x.repeats, [](const std::string& s) { log(s); });

  const fs::path out(o.out);
  fs::create_directories(out / "evals");
  const std::string mname = model_name(model);
  for (const harness::SweepPoint& p : points) {
    const std::string tag = budget_tag(p.budget_pct);
    for (attack::Baseline kind : {attack::Baseline::kUniform, attack::Baseline::kMinMax, attack::Baseline::kShuffle}) {
      const auto& reps = p.baselines[static_cast<std::size_t>(kind)];
      for (std::size_t r = 0; r < reps.size(); ++r)
        attack::write_json(out / "evals" / (std::string(attack::baseline_name(kind)) + "_b" + tag + "_r" +
                                            std::to_string(r) + ".json"),
                           harness::eval_artifact(reps[r], model.dims, attack::baseline_name(kind), mname,
                                                  p.budget_pct));
    }
    attack::write_json(out / ("universal_b" + tag + ".json"), attack::to_json(p.universal.result));
    attack::write_json(out / "evals" / ("universal_b" + tag + ".json"),
                       harness::eval_artifact(p.universal.report, model.dims, "universal", mname, p.budget_pct));
  }
  const std::vector<harness::ReportRow> rows = harness::sweep_rows(points, mname);
  harness::write_csv(out / "baseline_sweep.csv", rows);
  attack::write_json(out / "plot_data.json", harness::plot_data(rows));
  std::cout << harness::to_csv(rows);
}

// ---------------------------------------------------------------- eval

struct Eval {
  Common common;
  std::string model, data, delta, out, tau_mode = "synchronized", name = "flickering";
};

void run_eval(const Eval& o) {
  const diffnet::ModelParams model = diffnet::load_checkpoint(o.model);
  const cli::DatasetDir data = cli::read_dataset_dir(o.data);
  const harness::Filtered eval = filtered_eval(model, data);
  const video::Perturbation delta = load_delta(o.delta);
  const attack::EvalReport r = attack::evaluate(model, eval.kept, delta, attack::parse_tau_mode(o.tau_mode));
  attack::write_json(o.out, harness::eval_artifact(r, model.dims, o.name, model_name(model), std::nullopt));
  std::cout << o.name << " on " << model_name(model) << " (" << o.tau_mode << "): fooling "
            << fmt("%.1f%%", 100.0 * r.fooling_ratio) << " over " << r.eval_size << " clips, thickness "
            << fmt("%.2f%%", r.thickness_pct) << ", roughness " << fmt("%.2f%%", r.roughness_pct) << "\n";
}

// ---------------------------------------------------------------- transfer-matrix

struct Transfer {
  Common common;
  std::vector<std::string> models, deltas;
  std::string data, out, tau_mode = "synchronized";
};

void run_transfer(const Transfer& o) {
  if (o.models.size() != 2 || o.deltas.size() != 2)
    throw ValidationError("transfer-matrix takes exactly two models and two perturbations");
  const std::array<diffnet::ModelParams, 2> models = {diffnet::load_checkpoint(o.models[0]),
                                                      diffnet::load_checkpoint(o.models[1])};
  const std::array<video::Perturbation, 2> deltas = {load_delta(o.deltas[0]), load_delta(o.deltas[1])};
  const cli::DatasetDir data = cli::read_dataset_dir(o.data);
  const std::array<std::vector<video::LabeledVideo>, 2> evals = {filtered_eval(models[0], data).kept,
                                                                 filtered_eval(models[1], data).kept};
  const auto m = harness::transfer_matrix({&models[0], &models[1]}, deltas, evals, attack::parse_tau_mode(o.tau_mode));
  std::array<std::string, 2> names = {model_name(models[0]), model_name(models[1])};
  if (names[0] == names[1]) names = {names[0] + "0", names[1] + "1"};
  const fs::path out(o.out);
  fs::create_directories(out / "evals");
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      attack::write_json(out / "evals" / ("from_" + names[i] + "_on_" + names[j] + ".json"),
                         harness::eval_artifact(m[i][j], models[j].dims, "universal@" + names[i], names[j],
                                                std::nullopt));
  const std::string csv = harness::transfer_csv(names, m);
  write_text(out / "transfer.csv", csv);
  std::cout << csv;
}

// ---------------------------------------------------------------- ota-sim

struct OtaSim {
  Common common;
  std::string model, data, out;
  std::optional<std::size_t> trials;
};

void run_ota(const OtaSim& o) {
  harness::ExperimentConfig x = load_config(o.common);
  if (o.trials) x.ota.trials = *o.trials;
  x.validate();
  const diffnet::ModelParams model = diffnet::load_checkpoint(o.model);
  const cli::DatasetDir data = cli::read_dataset_dir(o.data);
  const harness::Filtered eval = filtered_eval(model, data);
  std::vector<video::ClipParams> params;
  for (std::size_t i : eval.indices) params.push_back(data.splits.eval_params[i]);
  video::SyntheticDatasetSpec spec = data.spec;

  const fs::path out(o.out);
  fs::create_directories(out);
  const SplitMix64 root(x.attack.seed);
  const auto probes = ota::pulse_probes(model.dims.frames, x.ota.probe_amplitude, x.ota.probe_width);
  ota::write_calibration_csv(out / "calibration.csv", ota::observe(probes, x.channel, root.split(0x63616c)()));

  const harness::OtaOutcome r = harness::scene_ota(model, eval.kept, params, spec, x.channel, x.ota, x.attack,
                                                   [](const std::string& s) { log(s); });
  attack::write_json(out / "channel_true.json", ota::to_json(x.channel));
  attack::write_json(out / "channel_estimate.json", ota::to_json(r.calibration.model));
  write_text(out / "ota_trials.csv", harness::ota_trials_csv(r));
  attack::write_json(out / "ota_summary.json", {{"schema", "flicker.ota_summary"},
                                                {"version", 1},
                                                {"model", model_name(model)},
                                                {"trials", r.trials.size()},
                                                {"skipped", r.skipped},
                                                {"success_rate", r.success_rate()},
                                                {"calibration_residual_rms", r.calibration.residual_rms}});
  std::cout << "scene OTA: " << fmt("%.1f%%", 100.0 * r.success_rate()) << " of " << r.trials.size()
            << " trials fooled (calibration residual " << fmt("%.2e", r.calibration.residual_rms) << ")\n";
}

// ---------------------------------------------------------------- report

struct Report {
  std::string kind;
  std::vector<std::string> inputs;
  std::string out, plot;
};

bool kind_matches(harness::TableKind kind, const std::string& attack) {
  auto starts = [&](const char* p) { return attack.rfind(p, 0) == 0; };
  switch (kind) {
    case harness::TableKind::kSingle: return starts("single_video");
    case harness::TableKind::kClass: return starts("single_class");
    case harness::TableKind::kUniversal: return starts("universal");
    case harness::TableKind::kTimeInvariant: return starts("time_invariant");
    case harness::TableKind::kBaseline: return true;
    case harness::TableKind::kTransfer: return attack.find('@') != std::string::npos;
  }
  return false;
}

void run_report(const Report& o) {
  const harness::TableKind kind = harness::parse_table_kind(o.kind);
  std::vector<nlohmann::json> artifacts;
  for (const std::string& path : o.inputs) {
    nlohmann::json j = attack::read_json(path);
    if (j.value("schema", "") != "flicker.eval_report")
      throw ValidationError(path + ": expected a flicker.eval_report document");
    if (kind_matches(kind, j.at("attack").get<std::string>())) artifacts.push_back(std::move(j));
  }
  if (artifacts.empty()) throw ValidationError("no input matches table kind " + o.kind);

  if (kind == harness::TableKind::kTransfer) {
    std::vector<std::string> names;
    for (const auto& j : artifacts) {
      const std::string target = j.at("model").get<std::string>();
      if (std::find(names.begin(), names.end(), target) == names.end()) names.push_back(target);
    }
    std::sort(names.begin(), names.end());
    if (names.size() != 2 || artifacts.size() != 4)
      throw ValidationError("transfer report needs the four cells of a 2 x 2 matrix");
    harness::TransferMatrix m;
    std::array<std::array<bool, 2>, 2> seen{};
    for (const auto& j : artifacts) {
      const std::string a = j.at("attack").get<std::string>();
      const std::string src = a.substr(a.find('@') + 1);
      const auto i = std::find(names.begin(), names.end(), src) - names.begin();
      const auto k = std::find(names.begin(), names.end(), j.at("model").get<std::string>()) - names.begin();
      if (i >= 2) throw ValidationError("transfer source " + src + " is not one of the target models");
      m[i][k] = attack::eval_report_from_json(j);
      seen[i][k] = true;
    }
    for (const auto& r : seen)
      for (bool s : r)
        if (!s) throw ValidationError("transfer report is missing a cell");
    const std::string csv = harness::transfer_csv({names[0], names[1]}, m);
    write_text(o.out, csv);
    std::cout << csv;
    return;
  }

  const std::vector<harness::ReportRow> rows = harness::rows_from_artifacts(artifacts);
  harness::write_csv(o.out, rows);
  if (!o.plot.empty()) attack::write_json(o.plot, harness::plot_data(rows));
  std::cout << harness::to_csv(rows);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flicker: flickering adversarial attacks on a toy video classifier"};
  app.require_subcommand(1);

  GenData gen;
  auto* c_gen = app.add_subcommand("gen-data", "Render the synthetic train/eval dataset");
  add_common(c_gen, gen.common);
  c_gen->add_option("--out", gen.out, "Dataset directory to create")->required();
  c_gen->callback([&] { run_gen_data(gen); });

  Train tr;
  auto* c_tr = app.add_subcommand("train", "Train a classifier; writes OUT and OUT.json");
  add_common(c_tr, tr.common);
  c_tr->add_option("--data", tr.data, "Dataset directory")->required();
  c_tr->add_option("--arch", tr.arch, "Architecture A or B (overrides the config)");
  c_tr->add_option("--epochs", tr.epochs, "Epochs (overrides the config)");
  c_tr->add_option("--out", tr.out, "Checkpoint path (FLKM)")->required();
  c_tr->callback([&] { run_train(tr); });

  Attack at;
  auto* c_at = app.add_subcommand("attack", "Optimize a flickering perturbation");
  add_common(c_at, at.common);
  c_at->add_option("--model", at.model, "Checkpoint")->required()->check(CLI::ExistingFile);
  c_at->add_option("--data", at.data, "Dataset directory")->required();
  c_at->add_option("--mode", at.mode, "single_video | single_class | universal");
  c_at->add_option("--class", at.cls, "Attacked class (single_class)");
  c_at->add_flag("--time-invariant", at.time_invariant, "Train under random cyclic shifts");
  c_at->add_option("--linf-pct", at.linf_pct, "l-infinity budget in percent of the intensity range");
  c_at->add_option("--iterations", at.iterations, "Adam iterations");
  c_at->add_option("--lr", at.lr, "Adam learning rate");
  c_at->add_option("--clips", at.clips, "single_video: number of clean eval clips to attack");
  c_at->add_option("--out", at.out, "Output directory")->required();
  c_at->callback([&] { run_attack(at); });

  Sweep sw;
  auto* c_sw = app.add_subcommand("baseline-sweep", "Universal attack vs random flickers over l-infinity budgets");
  add_common(c_sw, sw.common);
  c_sw->add_option("--model", sw.model, "Checkpoint")->required()->check(CLI::ExistingFile);
  c_sw->add_option("--data", sw.data, "Dataset directory")->required();
  c_sw->add_option("--linf-pct", sw.budgets, "Comma-separated budgets in percent, e.g. 5,10,15,20");
  c_sw->add_option("--repeats", sw.repeats, "Random draws per baseline and budget");
  c_sw->add_option("--iterations", sw.iterations, "Adam iterations per universal attack");
  c_sw->add_option("--out", sw.out, "Output directory")->required();
  c_sw->callback([&] { run_sweep(sw); });

  Eval ev;
  auto* c_ev = app.add_subcommand("eval", "Fooling ratio of a perturbation on the clean-filtered eval set");
  add_common(c_ev, ev.common);
  c_ev->add_option("--model", ev.model, "Checkpoint")->required()->check(CLI::ExistingFile);
  c_ev->add_option("--data", ev.data, "Dataset directory")->required();
  c_ev->add_option("--delta", ev.delta, "Attack-result JSON or FLKP file")->required()->check(CLI::ExistingFile);
  c_ev->add_option("--tau-mode", ev.tau_mode, "synchronized | random:<seed> | sweep-all");
  c_ev->add_option("--name", ev.name, "Attack name recorded in the report");
  c_ev->add_option("--out", ev.out, "Eval-report JSON")->required();
  c_ev->callback([&] { run_eval(ev); });

  Transfer tf;
  auto* c_tf = app.add_subcommand("transfer-matrix", "2 x 2 fooling ratios of each model's perturbation on each model");
  add_common(c_tf, tf.common);
  c_tf->add_option("--models", tf.models, "Two checkpoints")->required()->delimiter(',')->check(CLI::ExistingFile);
  c_tf->add_option("--deltas", tf.deltas, "Two perturbations, developed on the models in order")
      ->required()
      ->delimiter(',')
      ->check(CLI::ExistingFile);
  c_tf->add_option("--data", tf.data, "Dataset directory")->required();
  c_tf->add_option("--tau-mode", tf.tau_mode, "synchronized | random:<seed> | sweep-all");
  c_tf->add_option("--out", tf.out, "Output directory")->required();
  c_tf->callback([&] { run_transfer(tf); });

  OtaSim ot;
  auto* c_ot = app.add_subcommand("ota-sim", "Scene-based over-the-air attack through the simulated channel");
  add_common(c_ot, ot.common);
  c_ot->add_option("--model", ot.model, "Checkpoint")->required()->check(CLI::ExistingFile);
  c_ot->add_option("--data", ot.data, "Dataset directory")->required();
  c_ot->add_option("--trials", ot.trials, "Scenes to attack");
  c_ot->add_option("--out", ot.out, "Output directory")->required();
  c_ot->callback([&] { run_ota(ot); });

  Report rp;
  auto* c_rp = app.add_subcommand("report", "Rebuild report rows from eval-report JSON artifacts");
  c_rp->add_option("--kind", rp.kind, "single | class | universal | time_invariant | baseline | transfer")
      ->required();
  c_rp->add_option("--inputs", rp.inputs, "Eval-report JSON files")->required()->check(CLI::ExistingFile);
  c_rp->add_option("--out", rp.out, "CSV to write")->required();
  c_rp->add_option("--plot", rp.plot, "Plot-data JSON to write");
  c_rp->callback([&] { run_report(rp); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
