#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>

#include "sysguard/backend.hpp"
#include "sysguard/harness.hpp"
#include "sysguard/report.hpp"
#include "sysguard/session.hpp"

namespace sysguard {

enum class BackendKind { Mock, Remote };

BackendKind backend_kind_from_string(std::string_view name);  // throws ConfigError

/// Configuration shared by `serve` and `redteam`, loaded from a JSON file.
/// Every field has a default; an absent file section keeps the defaults.
struct AppConfig {
  BackendKind backend = BackendKind::Mock;
  std::set<std::string> mock_topic_keywords{"xbox"};
  RemoteBackendConfig remote;
  CompletionParams params;

  // redteam / harness
  GuardPolicy policy;  // defaults to default_policy()
  std::vector<CellSpec> cells;  // empty -> the ten default cells
  int attempts = 5;
  std::string probe = std::string(kDefaultProbe);
  ReportFormat format = ReportFormat::Table;

  // serve
  GatewayOptions gateway;
  std::string audit_dir;  // empty -> in-memory audit log
  bool fsync_audit = false;

  HarnessConfig harness_config() const;
  std::shared_ptr<ChatBackend> make_backend() const;
};

// Parses the JSON config text / file. Unknown mechanism or attack names
// throw ConfigError, as do malformed fields.
AppConfig parse_config(const std::string& json_text);
AppConfig load_config(const std::string& path);

}  // namespace sysguard
