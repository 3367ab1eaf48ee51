#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "flicker/attack/evaluation.hpp"
#include "flicker/harness/experiments.hpp"

namespace flicker::harness {

// One Table-1/Table-2 style line. Std columns are filled only for rows
// aggregated over several randomized runs (sample standard deviation).
struct ReportRow {
  std::string attack;
  std::string model;
  double linf_pct = 0.0;  // budget when one was set, otherwise the measured l-infinity
  double fooling_pct = 0.0;
  std::optional<double> fooling_std;
  double thickness_pct = 0.0;
  std::optional<double> thickness_std;
  double roughness_pct = 0.0;
  std::optional<double> roughness_std;
  std::size_t n = 0;  // runs aggregated into the row
};

inline constexpr const char* kReportHeader =
    "attack,model,linf_pct,fooling_pct,fooling_std,thickness_pct,thickness_std,roughness_pct,roughness_std,n";

// Mean over reports; std columns only when there is more than one.
ReportRow aggregate(const std::string& attack, const std::string& model, double linf_pct,
                    std::span<const attack::EvalReport> reports);

// Canonical row order: model, then budget, then attack name.
void sort_rows(std::vector<ReportRow>& rows);

std::string to_csv(std::span<const ReportRow> rows);
void write_csv(const std::filesystem::path& path, std::span<const ReportRow> rows);
std::vector<ReportRow> read_csv(const std::filesystem::path& path);

// Eval-report JSON (flicker.eval_report) plus the budget the report belongs to.
nlohmann::json eval_artifact(const attack::EvalReport& r, const video::Dims& dims, const std::string& attack,
                             const std::string& model, std::optional<double> budget_pct);

enum class TableKind { kSingle, kClass, kUniversal, kTimeInvariant, kBaseline, kTransfer };
TableKind parse_table_kind(const std::string& name);
const char* table_kind_name(TableKind k);

// Rebuilds rows from eval-report artifacts: reports sharing (attack, model,
// budget) are aggregated. Rows come out in canonical order. Mixed dims
// raise ValidationError.
std::vector<ReportRow> rows_from_artifacts(std::span<const nlohmann::json> artifacts);

// {schema: flicker.plot_data, version 1, series: [{attack, model, points: [{x, y, band}]}]}
// with x = l-infinity %, y = fooling %, band = std (0 when absent).
nlohmann::json plot_data(std::span<const ReportRow> rows);

// Rows of a baseline sweep: the universal attack plus each baseline per
// budget, in canonical order.
std::vector<ReportRow> sweep_rows(std::span<const SweepPoint> points, const std::string& model);

// "trial,label,predicted,fooled,digital_fooled,thickness_pct,roughness_pct" lines.
std::string ota_trials_csv(const OtaOutcome& r);

// "source,<m0>,<m1>" then one line per source model, fooling %.
std::string transfer_csv(const std::array<std::string, 2>& names, const TransferMatrix& m);

}  // namespace flicker::harness
