#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "qin/audit.hpp"
#include "qin/branching.hpp"
#include "qin/montecarlo.hpp"
#include "qin/offspring.hpp"
#include "qin/reward_table.hpp"

namespace qin {

// 17 significant digits: enough to round-trip any double exactly.
std::string format_real17(double value);

// RFC 4180 field quoting.
std::string csv_field(const std::string& value);
std::string csv_row(const std::vector<std::string>& fields);

OffspringDistribution distribution_from_json(const nlohmann::json& j);
nlohmann::json distribution_to_json(const OffspringDistribution& dist);

// {"h": .., "kind": .., "entries": [[i, s, r], ...], "aux": {..}} with
// entries sorted by (i, s) and reals printed with 17 significant digits.
std::string reward_table_to_json(const RewardTable& table);
RewardTable reward_table_from_json(const nlohmann::json& j);

nlohmann::json landmarks_to_json(const Landmarks& lm);
nlohmann::json property_report_to_json(const PropertyReport& report);
nlohmann::json audit_report_to_json(const AuditReport& report);
nlohmann::json estimate_to_json(const EstimateResult& result);

std::string witness_csv(const std::vector<Witness>& rows);
std::string estimate_blocks_csv(const EstimateResult& result);
std::string cost_scaling_csv(const std::vector<CostScalingRow>& rows);

void write_text_file(const std::string& path, const std::string& content);
nlohmann::json read_json_file(const std::string& path);

}  // namespace qin
