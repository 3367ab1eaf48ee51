#include "dataset_dir.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "flicker/attack/serialize.hpp"
#include "flicker/error.hpp"
#include "flicker/video/io.hpp"

namespace flicker::cli {
namespace {

constexpr const char* kManifestHeader =
    "file,split,label,motion,phase,center_x,center_y,background,contrast,tint_r,tint_g,tint_b,noise_seed";

std::string clip_name(const char* split, std::size_t n) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s/clip_%05zu.flkv", split, n);
  return buf;
}

}  // namespace

void write_dataset_dir(const std::filesystem::path& dir, const video::SyntheticDatasetSpec& spec,
                       std::size_t eval_per_class) {
  const harness::Splits s = harness::make_splits(spec, eval_per_class);
  std::filesystem::create_directories(dir / "train");
  std::filesystem::create_directories(dir / "eval");

  nlohmann::json meta = {{"schema", "flicker.dataset"},
                         {"version", 1},
                         {"dims", attack::dims_to_json(spec.dims)},
                         {"num_classes", spec.num_classes},
                         {"train_per_class", spec.clips_per_class},
                         {"eval_per_class", eval_per_class},
                         {"noise_sigma", spec.noise_sigma},
                         {"seed", attack::hex64(spec.seed)}};
  attack::write_json(dir / "dataset.json", meta);

  std::ofstream manifest(dir / "manifest.csv", std::ios::binary | std::ios::trunc);
  if (!manifest) throw std::runtime_error("cannot write " + (dir / "manifest.csv").string());
  manifest << kManifestHeader << "\n";
  char row[512];
  for (std::size_t n = 0; n < s.train.size(); ++n) {
    const std::string name = clip_name("train", n);
    video::save_video(dir / name, s.train[n].video);
    // training clips are never re-rendered, so their parameters are left blank
    std::snprintf(row, sizeof row, "%s,train,%zu,%s,,,,,,,,,\n", name.c_str(), s.train[n].label,
                  video::motion_name(static_cast<video::Motion>(s.train[n].label)));
    manifest << row;
  }
  for (std::size_t n = 0; n < s.eval.size(); ++n) {
    const std::string name = clip_name("eval", n);
    video::save_video(dir / name, s.eval[n].video);
    const video::ClipParams& p = s.eval_params[n];
    std::snprintf(row, sizeof row, "%s,eval,%zu,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%llu\n",
                  name.c_str(), s.eval[n].label, video::motion_name(p.motion), p.phase, p.center_x, p.center_y,
                  p.background, p.contrast, p.tint[0], p.tint[1], p.tint[2],
                  static_cast<unsigned long long>(p.noise_seed));
    manifest << row;
  }
}

DatasetDir read_dataset_dir(const std::filesystem::path& dir) {
  DatasetDir d;
  const nlohmann::json meta = attack::read_json(dir / "dataset.json");
  if (meta.value("schema", "") != "flicker.dataset" || meta.value("version", 0) != 1)
    throw ValidationError((dir / "dataset.json").string() + ": not a flicker.dataset v1 document");
  d.spec.dims = attack::dims_from_json(meta.at("dims"));
  d.spec.num_classes = meta.at("num_classes").get<std::size_t>();
  d.spec.clips_per_class = meta.at("train_per_class").get<std::size_t>();
  d.spec.noise_sigma = meta.at("noise_sigma").get<double>();
  d.spec.seed = std::stoull(meta.at("seed").get<std::string>(), nullptr, 16);
  d.eval_per_class = meta.at("eval_per_class").get<std::size_t>();
  d.spec.validate();

  std::ifstream in(dir / "manifest.csv");
  if (!in) throw ValidationError("cannot read " + (dir / "manifest.csv").string());
  std::string line;
  std::getline(in, line);
  if (line != kManifestHeader) throw ValidationError((dir / "manifest.csv").string() + ": unexpected header");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    while (f.size() < 13) f.emplace_back();
    const std::string where = (dir / "manifest.csv").string() + ":" + std::to_string(line_no);
    try {
      video::LabeledVideo clip{video::load_video(dir / f[0]), std::stoul(f[2])};
      if (!(clip.video.dims() == d.spec.dims)) throw ValidationError(where + ": clip dims differ from dataset.json");
      if (clip.label >= d.spec.num_classes) throw ValidationError(where + ": label out of range");
      if (f[1] == "train") {
        d.splits.train.push_back(std::move(clip));
      } else if (f[1] == "eval") {
        video::ClipParams p;
        p.motion = static_cast<video::Motion>(clip.label);
        p.phase = std::stod(f[4]);
        p.center_x = std::stod(f[5]);
        p.center_y = std::stod(f[6]);
        p.background = std::stod(f[7]);
        p.contrast = std::stod(f[8]);
        p.tint = {std::stod(f[9]), std::stod(f[10]), std::stod(f[11])};
        p.noise_seed = std::stoull(f[12]);
        d.splits.eval.push_back(std::move(clip));
        d.splits.eval_params.push_back(p);
      } else {
        throw ValidationError(where + ": split must be train or eval");
      }
    } catch (const ValidationError&) {
      throw;
    } catch (const std::invalid_argument&) {
      throw ValidationError(where + ": malformed row");
    } catch (const std::out_of_range&) {
      throw ValidationError(where + ": malformed row");
    }
  }
  if (d.splits.train.empty() || d.splits.eval.empty())
    throw ValidationError(dir.string() + ": dataset needs both train and eval clips");
  return d;
}

}  // namespace flicker::cli
