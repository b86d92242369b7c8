#include <chrono>
#include <cstdlib>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "sysguard/backend.hpp"
#include "sysguard/errors.hpp"

namespace sysguard {

namespace {

std::string extract_completion_text(const std::string& body) {
  const nlohmann::json parsed = nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded()) {
    throw BackendError("completion response is not valid JSON");
  }
  try {
    return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw BackendError("completion response missing choices[0].message.content");
  }
}

std::string snippet(const std::string& body) {
  constexpr std::size_t kMax = 200;
  if (body.size() <= kMax) return body;
  return body.substr(0, kMax) + "...";
}

}  // namespace

RemoteBackend::RemoteBackend(RemoteBackendConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) throw ConfigError("remote backend: base_url must be set");
  if (config_.path.empty()) throw ConfigError("remote backend: path must be set");
  if (config_.api_key_env.empty()) throw ConfigError("remote backend: api_key_env must be set");
  if (config_.max_retries < 0) throw ConfigError("remote backend: max_retries must be >= 0");
  if (config_.initial_backoff_ms < 0) {
    throw ConfigError("remote backend: initial_backoff_ms must be >= 0");
  }
  if (config_.timeout_seconds <= 0) {
    throw ConfigError("remote backend: timeout_seconds must be > 0");
  }
}

std::string RemoteBackend::chat_complete(const BackendRequest& request) {
  // The credential is read from the environment on every call and is never
  // logged or echoed into error messages.
  const char* api_key = std::getenv(config_.api_key_env.c_str());
  if (api_key == nullptr || *api_key == '\0') {
    throw BackendError("remote backend credential environment variable '" + config_.api_key_env +
                       "' is not set");
  }

  const std::string body = request_wire_json(request, config_.model);
  const httplib::Headers headers{{"Authorization", "Bearer " + std::string(api_key)}};

  const int attempts = 1 + config_.max_retries;
  int backoff_ms = config_.initial_backoff_ms;
  std::string last_transient_error;

  for (int attempt = 1; attempt <= attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
      backoff_ms *= 2;
    }

    httplib::Client client(config_.base_url);
    client.set_connection_timeout(config_.timeout_seconds, 0);
    client.set_read_timeout(config_.timeout_seconds, 0);
    client.set_write_timeout(config_.timeout_seconds, 0);

    httplib::Result result = client.Post(config_.path, headers, body, "application/json");
    if (!result) {
      last_transient_error = "connection failed: " + httplib::to_string(result.error());
      continue;  // connect errors and timeouts are transient
    }
    const int status = result->status;
    if (status >= 200 && status < 300) {
      return extract_completion_text(result->body);
    }
    if (status >= 500) {
      last_transient_error = "server error " + std::to_string(status);
      continue;  // 5xx is transient
    }
    throw BackendError("remote backend request failed with status " + std::to_string(status) +
                           ": " + snippet(result->body),
                       /*transient=*/false, attempt);
  }

  throw BackendError("remote backend unavailable after " + std::to_string(attempts) +
                         " attempts (" + last_transient_error + ")",
                     /*transient=*/true, attempts);
}

}  // namespace sysguard
