#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "sysguard/audit.hpp"
#include "sysguard/backend.hpp"
#include "sysguard/conversation.hpp"
#include "sysguard/guard.hpp"
#include "sysguard/policy.hpp"

namespace sysguard {

struct GatewayOptions {
  bool per_turn_detection = false;  // run active detectors after every turn
  bool fail_open = false;           // detector errors pass the turn instead of rejecting it
};

struct ChatOutcome {
  std::string assistant_text;
  std::vector<Verdict> verdicts;

  bool operator==(const ChatOutcome&) const = default;
};

/// One guarded conversation. Turns within a session are strictly serialized
/// (a second concurrent request queues on the turn mutex); distinct sessions
/// are independent.
///
/// handle_chat pipeline: wrap the prompt when SelfReminder is active, send
/// the full history to the backend, run per-turn detectors when enabled,
/// commit the turn, and append audit events (UserTurn carries both the sent
/// and the unwrapped text). On backend failure nothing is committed. Detector
/// errors fail closed by default: a Blocked verdict is audited and the turn
/// is rejected without assistant text; with fail_open the turn passes and a
/// Passed verdict records the detector failure.
class Session {
 public:
  Session(std::string id, GuardPolicy policy, std::shared_ptr<ChatBackend> backend,
          std::shared_ptr<AuditLog> audit, GatewayOptions options = {},
          CompletionParams params = {}, Clock clock = system_clock_ms(),
          std::shared_ptr<DriftEvaluator> evaluator = nullptr);

  const std::string& id() const { return id_; }
  const GuardPolicy& policy() const { return policy_; }
  Conversation conversation() const;

  ChatOutcome handle_chat(const std::string& user_text);

  // On-demand guard checks. Probe exchanges are audited as GuardProbe +
  // Verdict pairs and never appear as user-visible turns. Throw PolicyError
  // when the session's policy does not activate the mechanism.
  KeyVerdict key_probe();
  DriftVerdict drift_check();

 private:
  ChatOutcome handle_chat_locked(const std::string& user_text);
  KeyVerdict key_probe_locked(std::vector<AuditEvent>& events, const Conversation& history);
  DriftVerdict drift_check_locked(std::vector<AuditEvent>& events, const Conversation& history);
  AuditEvent event(AuditKind kind, std::string payload, bool visible) const;

  std::string id_;
  GuardPolicy policy_;
  std::shared_ptr<ChatBackend> backend_;
  std::shared_ptr<AuditLog> audit_;
  GatewayOptions options_;
  CompletionParams params_;
  Clock clock_;
  std::shared_ptr<DriftEvaluator> evaluator_;

  mutable std::mutex turn_mutex_;
  Conversation conversation_;
};

/// Creates and looks up sessions; ids are process-unique ("sess-<n>").
class SessionManager {
 public:
  SessionManager(std::shared_ptr<ChatBackend> backend, std::shared_ptr<AuditLog> audit,
                 GatewayOptions options = {}, CompletionParams params = {},
                 Clock clock = system_clock_ms());

  // Validates the policy, creates the session (conversation initialized per
  // new_conversation) and records a SessionCreated audit event.
  std::string create_session(const GuardPolicy& policy);
  std::string create_session(const GuardPolicy& policy, const GatewayOptions& options);

  std::shared_ptr<Session> get(const std::string& session_id) const;  // throws NotFoundError

  std::shared_ptr<AuditLog> audit() const { return audit_; }

 private:
  std::shared_ptr<ChatBackend> backend_;
  std::shared_ptr<AuditLog> audit_;
  GatewayOptions options_;
  CompletionParams params_;
  Clock clock_;

  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::atomic<std::uint64_t> next_id_{1};
};

}  // namespace sysguard
