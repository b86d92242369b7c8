#include "sysguard/report.hpp"

#include <array>
#include <sstream>

#include <json.hpp>

#include "sysguard/errors.hpp"

namespace sysguard {

ReportFormat report_format_from_string(std::string_view name) {
  if (name == "table") return ReportFormat::Table;
  if (name == "machine") return ReportFormat::Machine;
  throw ConfigError("unknown report format: '" + std::string(name) + "' (use table|machine)");
}

namespace {

std::string render_table(const std::vector<CellResult>& results) {
  if (results.empty()) {
    throw EmptyReportError("cannot render a table report for zero cells");
  }

  const std::array<std::string, 4> header{"Detection/Defense Mechanism", "Type", "Attack Tested",
                                          "DR"};
  std::vector<std::array<std::string, 4>> rows;
  rows.reserve(results.size());
  for (const CellResult& result : results) {
    rows.push_back({std::string(mechanism_display_name(result.spec.mechanism)),
                    std::string(mechanism_type_name(result.spec.mechanism)),
                    std::string(attack_display_name(result.spec.attack)),
                    std::string(to_string(result.dr))});
  }

  std::array<std::size_t, 4> widths{};
  for (std::size_t c = 0; c < 4; ++c) widths[c] = header[c].size();
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < 4; ++c) widths[c] = std::max(widths[c], row[c].size());
  }

  const auto render_row = [&](const std::array<std::string, 4>& cells) {
    std::string line = "|";
    for (std::size_t c = 0; c < 4; ++c) {
      line += " " + cells[c] + std::string(widths[c] - cells[c].size(), ' ') + " |";
    }
    return line + "\n";
  };

  std::string out = render_row(header);
  std::string rule = "|";
  for (std::size_t c = 0; c < 4; ++c) rule += std::string(widths[c] + 2, '-') + "|";
  out += rule + "\n";
  for (const auto& row : rows) out += render_row(row);
  return out;
}

std::string render_machine(const std::vector<CellResult>& results) {
  std::string out;
  for (const CellResult& result : results) {
    nlohmann::json record;
    record["mechanism"] = std::string(to_string(result.spec.mechanism));
    record["attack"] = std::string(to_string(result.spec.attack));
    record["dr"] = std::string(to_string(result.dr));
    nlohmann::json attempts = nlohmann::json::array();
    for (const AttemptResult& attempt : result.per_attempt) {
      attempts.push_back({{"attack_succeeded", attempt.attack_succeeded},
                          {"mechanism_countered", attempt.mechanism_countered},
                          {"transcript_ref", attempt.transcript_ref}});
    }
    record["attempts"] = std::move(attempts);
    out += record.dump();
    out += '\n';
  }
  return out;
}

}  // namespace

std::string render_report(const std::vector<CellResult>& results, ReportFormat format) {
  return format == ReportFormat::Table ? render_table(results) : render_machine(results);
}

std::vector<CellResult> parse_machine_report(const std::string& text) {
  std::vector<CellResult> results;
  std::istringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) {
    if (line.empty()) continue;
    const nlohmann::json record = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (record.is_discarded() || !record.is_object()) {
      throw ConfigError("machine report line is not a JSON object: " + line);
    }
    try {
      CellResult result;
      result.spec.mechanism = mechanism_from_string(record.at("mechanism").get<std::string>());
      result.spec.attack = attack_from_string(record.at("attack").get<std::string>());
      result.dr = dr_from_string(record.at("dr").get<std::string>());
      for (const auto& attempt : record.at("attempts")) {
        AttemptResult attempt_result;
        attempt_result.attack_succeeded = attempt.at("attack_succeeded").get<bool>();
        attempt_result.mechanism_countered = attempt.at("mechanism_countered").get<bool>();
        attempt_result.transcript_ref = attempt.at("transcript_ref").get<std::string>();
        result.per_attempt.push_back(std::move(attempt_result));
      }
      result.spec.attempts = static_cast<int>(result.per_attempt.size());
      results.push_back(std::move(result));
    } catch (const nlohmann::json::exception& error) {
      throw ConfigError(std::string("malformed machine report record: ") + error.what());
    }
  }
  return results;
}

}  // namespace sysguard
