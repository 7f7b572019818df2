#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "agentbench/bench_runner.hpp"
#include "agentbench/react_trace.hpp"

namespace agentbench {

enum class ReportFormat { Markdown, Csv, Json };

std::optional<ReportFormat> report_format_from_string(std::string_view name);

std::string emit_report(const RunReport& report, ReportFormat format);

nlohmann::json to_json(const RunReport& report);
/// Inverse of to_json. Throws ValidationError.
RunReport report_from_json(const nlohmann::json& doc);

/// Long-format "model,category,pass_rate" CSV. Throws ValidationError when a
/// report lacks one of the six categories.
std::string emit_radar_data(const std::vector<RunReport>& reports);

nlohmann::json to_json(const SolutionPath& path);
SolutionPath solution_path_from_json(const nlohmann::json& doc);

/// Reads a JSON-lines file of solution paths. Throws IoError / ValidationError.
std::vector<SolutionPath> load_paths(const std::string& file);

}  // namespace agentbench
