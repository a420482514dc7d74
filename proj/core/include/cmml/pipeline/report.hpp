#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "cmml/constraints/evaluator.hpp"
#include "cmml/constraints/scorecard.hpp"
#include "cmml/pipeline/runner.hpp"
#include "cmml/tabular.hpp"

namespace cmml::pipeline {

inline constexpr const char* kReportSchema = "cmml.run_report/1";
inline constexpr const char* kTimestampKey = "generated_at";

nlohmann::ordered_json to_json(const DescriptiveStats& stats);
nlohmann::ordered_json to_json(const constraints::ViolationReport& report);
// Rows in the fixed criterion order, one column per feature.
nlohmann::ordered_json to_json(const constraints::QualityScorecard& card);

// Authoritative machine format; key order is fixed.
nlohmann::ordered_json to_json(const RunReport& report);

// Human-readable rendering of a report document (as produced by to_json).
std::string render_markdown(const nlohmann::ordered_json& report);
std::string render_stats_markdown(const DescriptiveStats& stats);
std::string render_violations_markdown(const constraints::ViolationReport& report);

// Writes whichever paths are set; throws Error when a file cannot be written.
void emit_report(const RunReport& report, const std::optional<std::filesystem::path>& json_path,
                 const std::optional<std::filesystem::path>& markdown_path);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace cmml::pipeline
