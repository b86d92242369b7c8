#include "sysguard/session.hpp"

#include <utility>

#include <json.hpp>

#include "sysguard/errors.hpp"
#include "sysguard/json_io.hpp"

namespace sysguard {

namespace {

std::string user_turn_payload(const std::string& sent, const std::string& unwrapped) {
  return nlohmann::json{{"text", sent}, {"unwrapped", unwrapped}}.dump();
}

std::string assistant_turn_payload(const std::string& text) {
  return nlohmann::json{{"text", text}}.dump();
}

std::string probe_payload(const char* check, std::string_view probe_text) {
  return nlohmann::json{{"check", check}, {"probe", std::string(probe_text)}}.dump();
}

Verdict to_verdict(const KeyVerdict& key_verdict) {
  const VerdictOutcome outcome = key_verdict.outcome == KeyVerdict::Outcome::Match
                                     ? VerdictOutcome::NotManipulated
                                     : VerdictOutcome::Manipulated;
  return make_verdict(Mechanism::ReferenceKey, outcome, key_verdict_to_json(key_verdict));
}

Verdict to_verdict(const DriftVerdict& drift_verdict) {
  const VerdictOutcome outcome = drift_verdict.manipulated ? VerdictOutcome::Manipulated
                                                           : VerdictOutcome::NotManipulated;
  return make_verdict(Mechanism::LlmEvaluator, outcome, drift_verdict_to_json(drift_verdict),
                      drift_verdict.rating);
}

}  // namespace

Session::Session(std::string id, GuardPolicy policy, std::shared_ptr<ChatBackend> backend,
                 std::shared_ptr<AuditLog> audit, GatewayOptions options, CompletionParams params,
                 Clock clock, std::shared_ptr<DriftEvaluator> evaluator)
    : id_(std::move(id)),
      policy_(std::move(policy)),
      backend_(std::move(backend)),
      audit_(std::move(audit)),
      options_(options),
      params_(params),
      clock_(std::move(clock)),
      evaluator_(std::move(evaluator)) {
  if (!backend_) throw ConfigError("session requires a backend");
  if (!audit_) throw ConfigError("session requires an audit log");
  if (!clock_) throw ConfigError("session requires a clock");
  if (!evaluator_) evaluator_ = std::make_shared<MockDriftEvaluator>();
  policy_.validate();
  conversation_ = new_conversation(policy_, id_, id_);
}

Conversation Session::conversation() const {
  const std::lock_guard<std::mutex> lock(turn_mutex_);
  return conversation_;
}

AuditEvent Session::event(AuditKind kind, std::string payload, bool visible) const {
  AuditEvent out;
  out.timestamp = clock_();
  out.session_id = id_;
  out.kind = kind;
  out.payload = std::move(payload);
  out.visible_to_user = visible;
  return out;
}

ChatOutcome Session::handle_chat(const std::string& user_text) {
  const std::lock_guard<std::mutex> lock(turn_mutex_);
  return handle_chat_locked(user_text);
}

ChatOutcome Session::handle_chat_locked(const std::string& user_text) {
  if (user_text.empty()) throw ContentError("user message must be non-empty");

  std::string sent_text = user_text;
  if (policy_.has(Mechanism::SelfReminder)) {
    sent_text = wrap_self_reminder(policy_, user_text);
  }

  const Conversation candidate = conversation_.append(Role::User, sent_text);
  const std::string assistant_text =
      backend_->chat_complete(BackendRequest::from_conversation(candidate, params_));
  const Conversation after = candidate.append(Role::Assistant, assistant_text);

  std::vector<Verdict> verdicts;
  std::vector<AuditEvent> detection_events;
  bool blocked = false;

  if (options_.per_turn_detection) {
    const auto attempt = [&](Mechanism mechanism, auto&& probe) {
      try {
        verdicts.push_back(probe());
      } catch (const std::exception& error) {
        const VerdictOutcome outcome =
            options_.fail_open ? VerdictOutcome::Passed : VerdictOutcome::Blocked;
        const Verdict verdict = make_verdict(mechanism, outcome, error.what());
        verdicts.push_back(verdict);
        detection_events.push_back(event(AuditKind::Verdict, verdict_to_json(verdict), false));
        if (outcome == VerdictOutcome::Blocked) blocked = true;
      }
    };
    if (policy_.has(Mechanism::ReferenceKey)) {
      attempt(Mechanism::ReferenceKey,
              [&] { return to_verdict(key_probe_locked(detection_events, after)); });
    }
    if (policy_.has(Mechanism::LlmEvaluator)) {
      attempt(Mechanism::LlmEvaluator,
              [&] { return to_verdict(drift_check_locked(detection_events, after)); });
    }
  }

  std::vector<AuditEvent> events;
  events.push_back(event(AuditKind::UserTurn, user_turn_payload(sent_text, user_text), true));
  if (!blocked) {
    events.push_back(
        event(AuditKind::AssistantTurn, assistant_turn_payload(assistant_text), true));
  }
  for (AuditEvent& detection_event : detection_events) {
    events.push_back(std::move(detection_event));
  }
  for (const AuditEvent& audit_event : events) audit_->append(audit_event);

  if (blocked) {
    return ChatOutcome{"", verdicts};  // turn rejected: conversation unchanged
  }
  conversation_ = after;
  return ChatOutcome{assistant_text, verdicts};
}

KeyVerdict Session::key_probe() {
  const std::lock_guard<std::mutex> lock(turn_mutex_);
  std::vector<AuditEvent> events;
  const KeyVerdict verdict = key_probe_locked(events, conversation_);
  for (const AuditEvent& audit_event : events) audit_->append(audit_event);
  return verdict;
}

KeyVerdict Session::key_probe_locked(std::vector<AuditEvent>& events,
                                     const Conversation& history) {
  if (!policy_.has(Mechanism::ReferenceKey)) {
    throw PolicyError("session policy does not activate the ReferenceKey mechanism");
  }
  events.push_back(
      event(AuditKind::GuardProbe, probe_payload("reference_key", kKeyProbeText), false));
  const KeyVerdict key_verdict =
      probe_reference_key(*backend_, history, *policy_.reference_key, params_);
  events.push_back(event(AuditKind::Verdict, verdict_to_json(to_verdict(key_verdict)), false));
  return key_verdict;
}

DriftVerdict Session::drift_check() {
  const std::lock_guard<std::mutex> lock(turn_mutex_);
  std::vector<AuditEvent> events;
  const DriftVerdict verdict = drift_check_locked(events, conversation_);
  for (const AuditEvent& audit_event : events) audit_->append(audit_event);
  return verdict;
}

DriftVerdict Session::drift_check_locked(std::vector<AuditEvent>& events,
                                         const Conversation& history) {
  if (!policy_.has(Mechanism::LlmEvaluator)) {
    throw PolicyError("session policy does not activate the LlmEvaluator mechanism");
  }
  events.push_back(
      event(AuditKind::GuardProbe, probe_payload("drift", kDirectiveProbeText), false));
  const DriftVerdict drift_verdict =
      evaluate_drift(policy_.original_system_message, *backend_, history, *evaluator_,
                     policy_.drift_threshold, params_);
  events.push_back(event(AuditKind::Verdict, verdict_to_json(to_verdict(drift_verdict)), false));
  return drift_verdict;
}

SessionManager::SessionManager(std::shared_ptr<ChatBackend> backend,
                               std::shared_ptr<AuditLog> audit, GatewayOptions options,
                               CompletionParams params, Clock clock)
    : backend_(std::move(backend)),
      audit_(std::move(audit)),
      options_(options),
      params_(params),
      clock_(std::move(clock)) {
  if (!backend_) throw ConfigError("session manager requires a backend");
  if (!audit_) throw ConfigError("session manager requires an audit log");
  if (!clock_) throw ConfigError("session manager requires a clock");
}

std::string SessionManager::create_session(const GuardPolicy& policy) {
  return create_session(policy, options_);
}

std::string SessionManager::create_session(const GuardPolicy& policy,
                                           const GatewayOptions& options) {
  policy.validate();
  const std::string id = "sess-" + std::to_string(next_id_.fetch_add(1));
  auto session = std::make_shared<Session>(id, policy, backend_, audit_, options, params_, clock_);

  AuditEvent created;
  created.timestamp = clock_();
  created.session_id = id;
  created.kind = AuditKind::SessionCreated;
  created.payload = policy_to_json(policy);
  created.visible_to_user = false;
  audit_->append(created);

  const std::lock_guard<std::mutex> lock(mutex_);
  sessions_[id] = std::move(session);
  return id;
}

std::shared_ptr<Session> SessionManager::get(const std::string& session_id) const {
  const std::lock_guard<std::mutex> lock(mutex_);
  const auto it = sessions_.find(session_id);
  if (it == sessions_.end()) {
    throw NotFoundError("unknown session id: '" + session_id + "'");
  }
  return it->second;
}

}  // namespace sysguard
