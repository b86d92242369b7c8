#include "sysguard/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "json_detail.hpp"
#include "sysguard/errors.hpp"

namespace sysguard {

BackendKind backend_kind_from_string(std::string_view name) {
  if (name == "mock") return BackendKind::Mock;
  if (name == "remote") return BackendKind::Remote;
  throw ConfigError("unknown backend kind: '" + std::string(name) + "' (use mock|remote)");
}

HarnessConfig AppConfig::harness_config() const {
  HarnessConfig config;
  config.policy = policy;
  config.cells = cells;
  config.attempts = attempts;
  config.probe = probe;
  config.params = params;
  return config;
}

std::shared_ptr<ChatBackend> AppConfig::make_backend() const {
  if (backend == BackendKind::Mock) {
    return std::make_shared<MockBackend>(mock_topic_keywords);
  }
  return std::make_shared<RemoteBackend>(remote);
}

namespace {

void require_known_keys(const nlohmann::json& object, std::initializer_list<const char*> known,
                        const char* section) {
  for (const auto& [key, value] : object.items()) {
    bool found = false;
    for (const char* name : known) {
      if (key == name) {
        found = true;
        break;
      }
    }
    if (!found) {
      throw ConfigError("unknown config key '" + key + "' in " + section);
    }
  }
}

RemoteBackendConfig parse_remote(const nlohmann::json& object) {
  require_known_keys(object,
                     {"base_url", "path", "model", "api_key_env", "max_retries",
                      "initial_backoff_ms", "timeout_seconds"},
                     "remote");
  RemoteBackendConfig remote;
  if (object.contains("base_url")) remote.base_url = object.at("base_url").get<std::string>();
  if (object.contains("path")) remote.path = object.at("path").get<std::string>();
  if (object.contains("model")) remote.model = object.at("model").get<std::string>();
  if (object.contains("api_key_env")) {
    remote.api_key_env = object.at("api_key_env").get<std::string>();
  }
  if (object.contains("max_retries")) remote.max_retries = object.at("max_retries").get<int>();
  if (object.contains("initial_backoff_ms")) {
    remote.initial_backoff_ms = object.at("initial_backoff_ms").get<int>();
  }
  if (object.contains("timeout_seconds")) {
    remote.timeout_seconds = object.at("timeout_seconds").get<int>();
  }
  return remote;
}

CompletionParams parse_params(const nlohmann::json& object) {
  require_known_keys(object, {"temperature", "top_p"}, "params");
  CompletionParams params;
  if (object.contains("temperature")) params.temperature = object.at("temperature").get<double>();
  if (object.contains("top_p")) params.top_p = object.at("top_p").get<double>();
  return params;
}

GatewayOptions parse_gateway(const nlohmann::json& object) {
  require_known_keys(object, {"per_turn_detection", "fail_open"}, "gateway");
  GatewayOptions options;
  if (object.contains("per_turn_detection")) {
    options.per_turn_detection = object.at("per_turn_detection").get<bool>();
  }
  if (object.contains("fail_open")) options.fail_open = object.at("fail_open").get<bool>();
  return options;
}

std::vector<CellSpec> parse_cells(const nlohmann::json& array, int default_attempts) {
  if (!array.is_array()) throw ConfigError("config 'cells' must be an array");
  std::vector<CellSpec> cells;
  for (const auto& entry : array) {
    require_known_keys(entry, {"mechanism", "attack", "attempts"}, "cells[]");
    CellSpec spec;
    spec.mechanism = mechanism_from_string(entry.at("mechanism").get<std::string>());
    spec.attack = attack_from_string(entry.at("attack").get<std::string>());
    spec.attempts = entry.contains("attempts") ? entry.at("attempts").get<int>()
                                               : default_attempts;
    if (spec.attempts < 1) throw ConfigError("cell attempts must be >= 1");
    cells.push_back(spec);
  }
  return cells;
}

}  // namespace

AppConfig parse_config(const std::string& json_text) {
  const nlohmann::json parsed =
      nlohmann::json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded() || !parsed.is_object()) {
    throw ConfigError("config is not a JSON object");
  }

  AppConfig config;
  config.policy = default_policy();

  try {
    require_known_keys(parsed,
                       {"backend", "mock_topic_keywords", "remote", "params", "policy", "cells",
                        "attempts", "probe", "format", "gateway", "audit_dir", "fsync_audit"},
                       "config");

    if (parsed.contains("backend")) {
      config.backend = backend_kind_from_string(parsed.at("backend").get<std::string>());
    }
    if (parsed.contains("mock_topic_keywords")) {
      config.mock_topic_keywords =
          parsed.at("mock_topic_keywords").get<std::set<std::string>>();
      if (config.mock_topic_keywords.empty()) {
        throw ConfigError("mock_topic_keywords must not be empty");
      }
    }
    if (parsed.contains("remote")) config.remote = parse_remote(parsed.at("remote"));
    if (parsed.contains("params")) config.params = parse_params(parsed.at("params"));
    if (parsed.contains("policy")) {
      config.policy = detail::policy_from_json_obj(parsed.at("policy"));
    }
    if (parsed.contains("attempts")) {
      config.attempts = parsed.at("attempts").get<int>();
      if (config.attempts < 1) throw ConfigError("attempts must be >= 1");
    }
    if (parsed.contains("cells")) {
      config.cells = parse_cells(parsed.at("cells"), config.attempts);
    }
    if (parsed.contains("probe")) {
      config.probe = parsed.at("probe").get<std::string>();
      if (config.probe.empty()) throw ConfigError("probe must be non-empty");
    }
    if (parsed.contains("format")) {
      config.format = report_format_from_string(parsed.at("format").get<std::string>());
    }
    if (parsed.contains("gateway")) config.gateway = parse_gateway(parsed.at("gateway"));
    if (parsed.contains("audit_dir")) config.audit_dir = parsed.at("audit_dir").get<std::string>();
    if (parsed.contains("fsync_audit")) {
      config.fsync_audit = parsed.at("fsync_audit").get<bool>();
    }
  } catch (const nlohmann::json::exception& error) {
    throw ConfigError(std::string("malformed config: ") + error.what());
  }
  return config;
}

AppConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StorageError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace sysguard
