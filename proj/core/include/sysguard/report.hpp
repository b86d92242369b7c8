#pragma once

#include <string>
#include <vector>

#include "sysguard/harness.hpp"

namespace sysguard {

enum class ReportFormat { Table, Machine };

ReportFormat report_format_from_string(std::string_view name);  // throws ConfigError

// Table format mirrors the protocol report columns (Detection/Defense
// Mechanism, Type, Attack Tested, DR). Machine format is one JSON record per
// cell, including per-attempt booleans and transcript references, and
// round-trips through parse_machine_report. Table rendering of an empty
// result set throws EmptyReportError.
std::string render_report(const std::vector<CellResult>& results, ReportFormat format);

std::vector<CellResult> parse_machine_report(const std::string& text);

}  // namespace sysguard
