#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "guiwb/harness/evaluation.hpp"

namespace guiwb::harness {

std::string report_json(const MetricsReport& m);
MetricsReport parse_report_json(std::string_view text);

/// Header plus one row per episode.
std::string report_csv(const MetricsReport& m);

/// Method x SR table, then the per-difficulty breakdown of each report.
std::string report_markdown(const std::vector<MetricsReport>& reports);

/// Writes report.json, report.csv and report.md into dir (created if
/// missing). Throws IoError.
void report_emit(const MetricsReport& m, const std::string& dir);

/// Paired emission for the interface ablation: both reports side by side plus
/// ablation.json with the delta.
void ablation_emit(const AblationReport& a, const std::string& dir);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace guiwb::harness
