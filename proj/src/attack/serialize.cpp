#include "flicker/attack/serialize.hpp"

#include <cstdio>
#include <fstream>

#include "flicker/attack/temporal.hpp"
#include "flicker/error.hpp"

namespace flicker::attack {

using nlohmann::json;

namespace {

void expect_schema(const json& j, const char* schema) {
  if (!j.is_object() || j.value("schema", "") != schema)
    throw ValidationError(std::string("expected a ") + schema + " document");
  if (j.value("version", 0) != 1) throw ValidationError(std::string(schema) + ": unsupported version");
}

const char* space_name(MarginSpace s) { return s == MarginSpace::kProbability ? "probability" : "logit"; }

}  // namespace

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json dims_to_json(const video::Dims& d) {
  return {{"frames", d.frames}, {"height", d.height}, {"width", d.width},
          {"channels", d.channels}, {"v_min", d.v_min}, {"v_max", d.v_max}};
}

video::Dims dims_from_json(const json& j) {
  video::Dims d;
  d.frames = j.at("frames").get<std::size_t>();
  d.height = j.at("height").get<std::size_t>();
  d.width = j.at("width").get<std::size_t>();
  d.channels = j.at("channels").get<std::size_t>();
  d.v_min = j.at("v_min").get<double>();
  d.v_max = j.at("v_max").get<double>();
  d.validate();
  return d;
}

json to_json(const AttackConfig& c) {
  json j = {{"mode", mode_name(c.mode)},
            {"attacked_class", c.attacked_class},
            {"time_invariant", c.time_invariant},
            {"margin", {{"m", c.margin.margin},
                        {"space", space_name(c.margin.space)},
                        {"direction", c.margin.direction == Direction::kUntargeted ? "untargeted" : "targeted"},
                        {"class", c.margin.cls}}},
            {"weights", {{"lambda", c.weights.lambda}, {"beta1", c.weights.beta1}, {"beta2", c.weights.beta2}}},
            {"zeta", c.zeta ? json(*c.zeta) : json(nullptr)},
            {"iterations", c.iterations},
            {"batch_size", c.batch_size},
            {"learning_rate", c.learning_rate},
            {"adam", {{"beta1", c.adam_beta1}, {"beta2", c.adam_beta2}, {"epsilon", c.adam_epsilon}}},
            {"seed", c.seed},
            {"eval_every", c.eval_every}};
  return j;
}

AttackConfig attack_config_from_json(const json& j) {
  AttackConfig c;
  c.mode = parse_mode(j.at("mode").get<std::string>());
  c.attacked_class = j.at("attacked_class").get<std::size_t>();
  c.time_invariant = j.at("time_invariant").get<bool>();
  const json& m = j.at("margin");
  c.margin.margin = m.at("m").get<double>();
  c.margin.space = m.at("space").get<std::string>() == "logit" ? MarginSpace::kLogit : MarginSpace::kProbability;
  c.margin.direction = m.at("direction").get<std::string>() == "targeted" ? Direction::kTargeted : Direction::kUntargeted;
  c.margin.cls = m.at("class").get<std::size_t>();
  const json& w = j.at("weights");
  c.weights = {w.at("lambda").get<double>(), w.at("beta1").get<double>(), w.at("beta2").get<double>()};
  if (!j.at("zeta").is_null()) c.zeta = j.at("zeta").get<double>();
  c.iterations = j.at("iterations").get<std::size_t>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.learning_rate = j.at("learning_rate").get<double>();
  const json& a = j.at("adam");
  c.adam_beta1 = a.at("beta1").get<double>();
  c.adam_beta2 = a.at("beta2").get<double>();
  c.adam_epsilon = a.at("epsilon").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.eval_every = j.at("eval_every").get<std::size_t>();
  return c;
}

json to_json(const AttackResult& r, const std::string& delta_file) {
  json trace = json::array();
  for (std::size_t t = 0; t < r.delta.frames(); ++t) trace.push_back({r.delta(t, 0), r.delta(t, 1), r.delta(t, 2)});
  json delta = {{"trace", trace}};
  if (!delta_file.empty()) delta["file"] = delta_file;

  json history = json::array();
  for (const HistoryRecord& h : r.history) {
    history.push_back({{"iteration", h.iteration},
                       {"loss", h.loss},
                       {"data_term", h.data_term},
                       {"reg_term", h.reg_term},
                       {"top_probability", h.top_probability},
                       {"original_probability", h.original_probability},
                       {"thickness_pct", h.thickness_pct},
                       {"roughness_pct", h.roughness_pct},
                       {"linf_pct", h.linf_pct},
                       {"fooling_ratio", h.fooling_ratio}});
  }
  const MetricsReport m = metrics(r.delta);
  return {{"schema", "flicker.attack_result"},
          {"version", 1},
          {"dims", dims_to_json(r.delta.dims())},
          {"model_fingerprint", hex64(r.model_fingerprint)},
          {"config", to_json(r.config)},
          {"best_iteration", r.best_iteration},
          {"metrics", {{"thickness_pct", m.thickness_pct}, {"roughness_pct", m.roughness_pct}, {"linf_pct", m.linf_pct}}},
          {"delta", delta},
          {"history", history}};
}

AttackResult attack_result_from_json(const json& j) {
  expect_schema(j, "flicker.attack_result");
  AttackResult r;
  const video::Dims d = dims_from_json(j.at("dims"));
  std::vector<double> trace;
  for (const json& row : j.at("delta").at("trace"))
    for (const json& v : row) trace.push_back(v.get<double>());
  r.delta = video::Perturbation(d, std::move(trace));
  r.model_fingerprint = std::stoull(j.at("model_fingerprint").get<std::string>(), nullptr, 16);
  r.config = attack_config_from_json(j.at("config"));
  r.best_iteration = j.at("best_iteration").get<std::size_t>();
  for (const json& h : j.at("history")) {
    HistoryRecord rec;
    rec.iteration = h.at("iteration").get<std::size_t>();
    rec.loss = h.at("loss").get<double>();
    rec.data_term = h.at("data_term").get<double>();
    rec.reg_term = h.at("reg_term").get<double>();
    rec.top_probability = h.at("top_probability").get<double>();
    rec.original_probability = h.at("original_probability").get<double>();
    rec.thickness_pct = h.at("thickness_pct").get<double>();
    rec.roughness_pct = h.at("roughness_pct").get<double>();
    rec.linf_pct = h.at("linf_pct").get<double>();
    rec.fooling_ratio = h.at("fooling_ratio").get<double>();
    r.history.push_back(rec);
  }
  return r;
}

json to_json(const EvalReport& r, const video::Dims& dims, const std::string& attack_name,
             const std::string& model_name) {
  json per_class = json::array();
  for (const ClassTally& t : r.per_class) per_class.push_back({{"label", t.label}, {"total", t.total}, {"fooled", t.fooled}});
  return {{"schema", "flicker.eval_report"},
          {"version", 1},
          {"attack", attack_name},
          {"model", model_name},
          {"dims", dims_to_json(dims)},
          {"fooling_ratio", r.fooling_ratio},
          {"thickness_pct", r.thickness_pct},
          {"roughness_pct", r.roughness_pct},
          {"linf_pct", r.linf_pct},
          {"tau_mode", to_string(r.tau_mode)},
          {"eval_size", r.eval_size},
          {"per_class", per_class},
          {"per_shift", r.per_shift}};
}

EvalReport eval_report_from_json(const json& j) {
  expect_schema(j, "flicker.eval_report");
  EvalReport r;
  r.fooling_ratio = j.at("fooling_ratio").get<double>();
  r.thickness_pct = j.at("thickness_pct").get<double>();
  r.roughness_pct = j.at("roughness_pct").get<double>();
  r.linf_pct = j.at("linf_pct").get<double>();
  r.tau_mode = parse_tau_mode(j.at("tau_mode").get<std::string>());
  r.eval_size = j.at("eval_size").get<std::size_t>();
  for (const json& t : j.at("per_class"))
    r.per_class.push_back({t.at("label").get<std::size_t>(), t.at("total").get<std::size_t>(), t.at("fooled").get<double>()});
  r.per_shift = j.at("per_shift").get<std::vector<double>>();
  return r;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what(), e.byte);
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

}  // namespace flicker::attack
