#include "flicker/harness/report.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "flicker/attack/serialize.hpp"
#include "flicker/error.hpp"

namespace flicker::harness {
namespace {

struct Moments {
  double mean = 0.0;
  double std = 0.0;
};

Moments moments(const std::vector<double>& xs) {
  Moments m;
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return m;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string opt(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::optional<double> parse_opt(const std::string& s, const std::string& where) {
  if (s.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(where + ": not a number: '" + s + "'");
  }
}

}  // namespace

ReportRow aggregate(const std::string& attack, const std::string& model, double linf_pct,
                    std::span<const attack::EvalReport> reports) {
  if (reports.empty()) throw ValidationError("aggregate: no reports");
  std::vector<double> fool, thick, rough;
  for (const auto& r : reports) {
    fool.push_back(100.0 * r.fooling_ratio);
    thick.push_back(r.thickness_pct);
    rough.push_back(r.roughness_pct);
  }
  ReportRow row;
  row.attack = attack;
  row.model = model;
  row.linf_pct = linf_pct;
  row.n = reports.size();
  const Moments f = moments(fool), t = moments(thick), g = moments(rough);
  row.fooling_pct = f.mean;
  row.thickness_pct = t.mean;
  row.roughness_pct = g.mean;
  if (reports.size() > 1) {
    row.fooling_std = f.std;
    row.thickness_std = t.std;
    row.roughness_std = g.std;
  }
  return row;
}

void sort_rows(std::vector<ReportRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    return std::tie(a.model, a.linf_pct, a.attack) < std::tie(b.model, b.linf_pct, b.attack);
  });
}

std::string to_csv(std::span<const ReportRow> rows) {
  std::string out = std::string(kReportHeader) + "\n";
  for (const ReportRow& r : rows) {
    out += r.attack + "," + r.model + "," + num(r.linf_pct) + "," + num(r.fooling_pct) + "," + opt(r.fooling_std) +
           "," + num(r.thickness_pct) + "," + opt(r.thickness_std) + "," + num(r.roughness_pct) + "," +
           opt(r.roughness_std) + "," + std::to_string(r.n) + "\n";
  }
  return out;
}

void write_csv(const std::filesystem::path& path, std::span<const ReportRow> rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_csv(rows);
}

std::vector<ReportRow> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != kReportHeader) throw ValidationError(path.string() + ": unexpected report header");
  std::vector<ReportRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (f.size() != 10) throw ValidationError(where + ": expected 10 columns");
    ReportRow r;
    r.attack = f[0];
    r.model = f[1];
    r.linf_pct = *parse_opt(f[2], where);
    r.fooling_pct = *parse_opt(f[3], where);
    r.fooling_std = parse_opt(f[4], where);
    r.thickness_pct = *parse_opt(f[5], where);
    r.thickness_std = parse_opt(f[6], where);
    r.roughness_pct = *parse_opt(f[7], where);
    r.roughness_std = parse_opt(f[8], where);
    r.n = static_cast<std::size_t>(*parse_opt(f[9], where));
    rows.push_back(std::move(r));
  }
  return rows;
}

nlohmann::json eval_artifact(const attack::EvalReport& r, const video::Dims& dims, const std::string& attack,
                             const std::string& model, std::optional<double> budget_pct) {
  nlohmann::json j = attack::to_json(r, dims, attack, model);
  j["budget_pct"] = budget_pct ? nlohmann::json(*budget_pct) : nlohmann::json(nullptr);
  return j;
}

TableKind parse_table_kind(const std::string& name) {
  for (TableKind k : {TableKind::kSingle, TableKind::kClass, TableKind::kUniversal, TableKind::kTimeInvariant,
                      TableKind::kBaseline, TableKind::kTransfer})
    if (name == table_kind_name(k)) return k;
  throw ValidationError("unknown table kind '" + name + "'");
}

const char* table_kind_name(TableKind k) {
  switch (k) {
    case TableKind::kSingle: return "single";
    case TableKind::kClass: return "class";
    case TableKind::kUniversal: return "universal";
    case TableKind::kTimeInvariant: return "time_invariant";
    case TableKind::kBaseline: return "baseline";
    case TableKind::kTransfer: return "transfer";
  }
  return "unknown";
}

std::vector<ReportRow> rows_from_artifacts(std::span<const nlohmann::json> artifacts) {
  struct Group {
    std::string attack, model;
    double budget = 0.0;
    bool has_budget = false;
    std::vector<attack::EvalReport> reports;
  };
  std::vector<Group> groups;
  std::optional<video::Dims> dims;
  for (const nlohmann::json& j : artifacts) {
    const attack::EvalReport r = attack::eval_report_from_json(j);
    const video::Dims d = attack::dims_from_json(j.at("dims"));
    if (dims && !(*dims == d)) throw ValidationError("report: artifacts mix different clip dims");
    dims = d;
    const std::string a = j.at("attack").get<std::string>();
    const std::string m = j.at("model").get<std::string>();
    const bool has_budget = j.contains("budget_pct") && !j["budget_pct"].is_null();
    const double budget = has_budget ? j["budget_pct"].get<double>() : r.linf_pct;
    Group* g = nullptr;
    for (Group& candidate : groups)
      if (candidate.attack == a && candidate.model == m && candidate.has_budget == has_budget &&
          (!has_budget || candidate.budget == budget))
        g = &candidate;
    if (!g) {
      groups.push_back({a, m, budget, has_budget, {}});
      g = &groups.back();
    }
    g->reports.push_back(r);
  }
  std::vector<ReportRow> rows;
  for (const Group& g : groups) {
    double linf = g.budget;
    if (!g.has_budget) {
      linf = 0.0;
      for (const auto& r : g.reports) linf += r.linf_pct;
      linf /= static_cast<double>(g.reports.size());
    }
    rows.push_back(aggregate(g.attack, g.model, linf, g.reports));
  }
  sort_rows(rows);
  return rows;
}

nlohmann::json plot_data(std::span<const ReportRow> rows) {
  nlohmann::json series = nlohmann::json::array();
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  for (const ReportRow& r : rows) {
    const auto key = std::make_pair(r.attack, r.model);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, series.size()).first;
      series.push_back({{"attack", r.attack}, {"model", r.model}, {"points", nlohmann::json::array()}});
    }
    series[it->second]["points"].push_back(
        {{"x", r.linf_pct}, {"y", r.fooling_pct}, {"band", r.fooling_std.value_or(0.0)}});
  }
  return {{"schema", "flicker.plot_data"}, {"version", 1}, {"series", series}};
}

std::vector<ReportRow> sweep_rows(std::span<const SweepPoint> points, const std::string& model) {
  std::vector<ReportRow> rows;
  for (const SweepPoint& p : points) {
    for (attack::Baseline kind : {attack::Baseline::kUniform, attack::Baseline::kMinMax, attack::Baseline::kShuffle})
      rows.push_back(aggregate(attack::baseline_name(kind), model, p.budget_pct,
                               p.baselines[static_cast<std::size_t>(kind)]));
    rows.push_back(aggregate("universal", model, p.budget_pct, std::span(&p.universal.report, 1)));
  }
  sort_rows(rows);
  return rows;
}

std::string ota_trials_csv(const OtaOutcome& r) {
  std::string csv = "trial,label,predicted,fooled,digital_fooled,thickness_pct,roughness_pct\n";
  for (const OtaTrial& t : r.trials) {
    char line[160];
    std::snprintf(line, sizeof line, "%zu,%zu,%zu,%d,%d,%.6f,%.6f\n", t.clip, t.label, t.predicted, t.fooled ? 1 : 0,
                  t.digital_fooled ? 1 : 0, t.thickness_pct, t.roughness_pct);
    csv += line;
  }
  return csv;
}

std::string transfer_csv(const std::array<std::string, 2>& names, const TransferMatrix& m) {
  std::string out = "source," + names[0] + "," + names[1] + "\n";
  for (std::size_t i = 0; i < 2; ++i)
    out += names[i] + "," + num(100.0 * m[i][0].fooling_ratio) + "," + num(100.0 * m[i][1].fooling_ratio) + "\n";
  return out;
}

}  // namespace flicker::harness
