#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "sysguard/conversation.hpp"
#include "sysguard/mock_assistant.hpp"

namespace sysguard {

/// One chat-completion request: ordered role/content pairs plus sampling
/// parameters. When a policy is installed the first message has role System.
struct BackendRequest {
  struct Turn {
    Role role = Role::User;
    std::string content;

    bool operator==(const Turn&) const = default;
  };

  std::vector<Turn> messages;
  double temperature = 0.7;
  double top_p = 0.95;

  static BackendRequest from_conversation(const Conversation& conversation,
                                          const CompletionParams& params = {});

  bool operator==(const BackendRequest&) const = default;
};

// OpenAI-style chat-completions wire body for the request; temperature and
// top_p are serialized unchanged. Stable bytes (sorted keys).
std::string request_wire_json(const BackendRequest& request, const std::string& model);

/// Backend client contract: one completion exchange, returning the assistant
/// text verbatim. Throws BackendError.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;

  virtual std::string chat_complete(const BackendRequest& request) = 0;

  // True when replies follow the mock "[TAG] body" grammar.
  virtual bool mock_grammar() const { return false; }
};

/// Deterministic offline backend. Stateless: every call replays the request's
/// full history through the mock assistant state machine (fresh state from
/// the System message, fold over the User turns), so identical requests give
/// identical replies regardless of session or thread.
class MockBackend final : public ChatBackend {
 public:
  // Keywords define the mock's support topic (its "world knowledge").
  // Throws ConfigError when empty.
  explicit MockBackend(std::set<std::string> topic_keywords);

  std::string chat_complete(const BackendRequest& request) override;
  bool mock_grammar() const override { return true; }

  // Replay helper: the state after folding every user turn of the request.
  MockAssistantState replay_state(const BackendRequest& request) const;

 private:
  std::set<std::string> topic_keywords_;
};

struct RemoteBackendConfig {
  std::string base_url;                         // e.g. "https://api.example.com"
  std::string path = "/v1/chat/completions";
  std::string model = "gpt-3.5-turbo";
  std::string api_key_env = "SYSGUARD_API_KEY";  // env var NAME; value never logged
  int max_retries = 3;                           // retries after the first attempt
  int initial_backoff_ms = 200;                  // doubled per retry
  int timeout_seconds = 30;

  bool operator==(const RemoteBackendConfig&) const = default;
};

/// Chat-completion client for a remote endpoint. Retries transient failures
/// (connect errors, timeouts, 5xx) with exponential backoff; 4xx-class
/// responses are permanent and never retried.
class RemoteBackend final : public ChatBackend {
 public:
  explicit RemoteBackend(RemoteBackendConfig config);

  std::string chat_complete(const BackendRequest& request) override;

  const RemoteBackendConfig& config() const { return config_; }

 private:
  RemoteBackendConfig config_;
};

}  // namespace sysguard
