#pragma once

#include <string>

#include <json.hpp>

namespace intona::report_text {

// Human-readable rendering of a stat report: phonation-time summary,
// correlation table, regression fits, Wilcoxon grid and detection summary.
std::string render(const nlohmann::ordered_json& report);

} // namespace intona::report_text
