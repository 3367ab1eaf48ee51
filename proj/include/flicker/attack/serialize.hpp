#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "flicker/attack/driver.hpp"
#include "flicker/attack/evaluation.hpp"

namespace flicker::attack {

// JSON documents, versioned through their "schema" and "version" keys.
//
// flicker.attack_result v1:
//   { schema, version, dims{...}, model_fingerprint (hex), config{...}, best_iteration,
//     metrics{thickness_pct, roughness_pct, linf_pct},
//     delta{ file (optional, FLKP path relative to the JSON), trace [[r,g,b], ...] },
//     history [ {iteration, loss, data_term, reg_term, top_probability,
//                original_probability, thickness_pct, roughness_pct, linf_pct, fooling_ratio}, ... ] }
// The inline trace keeps full double precision; the FLKP file holds float32.
//
// flicker.eval_report v1:
//   { schema, version, attack, model, dims{...}, fooling_ratio, thickness_pct, roughness_pct,
//     linf_pct, tau_mode, eval_size, per_class [{label, total, fooled}], per_shift [...] }

nlohmann::json dims_to_json(const video::Dims& d);
video::Dims dims_from_json(const nlohmann::json& j);

nlohmann::json to_json(const AttackConfig& cfg);
AttackConfig attack_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const AttackResult& r, const std::string& delta_file = {});
AttackResult attack_result_from_json(const nlohmann::json& j);

nlohmann::json to_json(const EvalReport& r, const video::Dims& dims, const std::string& attack_name,
                       const std::string& model_name);
EvalReport eval_report_from_json(const nlohmann::json& j);

nlohmann::json read_json(const std::filesystem::path& path);
// Pretty-printed with a trailing newline; byte-stable for equal documents.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

std::string hex64(std::uint64_t v);

}  // namespace flicker::attack
