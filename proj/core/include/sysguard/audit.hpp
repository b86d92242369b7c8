#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "sysguard/policy.hpp"

namespace sysguard {

enum class AuditKind {
  SessionCreated,
  UserTurn,
  AssistantTurn,
  GuardProbe,
  Verdict,
};

std::string_view to_string(AuditKind kind);
AuditKind audit_kind_from_string(std::string_view name);

/// One append-only log record. GuardProbe, Verdict and SessionCreated events
/// are never user-visible.
struct AuditEvent {
  std::int64_t timestamp = 0;  // unix epoch milliseconds
  std::string session_id;
  AuditKind kind = AuditKind::UserTurn;
  std::string payload;  // JSON text; shape depends on kind
  bool visible_to_user = false;

  void validate() const;  // throws PolicyError on the visibility invariant

  bool operator==(const AuditEvent&) const = default;
};

// NDJSON codec for audit events, field names fixed:
// {"kind":...,"payload":...,"session_id":...,"timestamp":...,"visible_to_user":...}
std::string audit_event_to_json(const AuditEvent& event);
AuditEvent audit_event_from_json(const std::string& line);

/// Append-only audit sink; events are totally ordered per session.
class AuditLog {
 public:
  virtual ~AuditLog() = default;

  // Throws StorageError on failure (turns fail closed on that).
  virtual void append(const AuditEvent& event) = 0;

  // The session's full log as NDJSON, in append order.
  virtual std::string dump(const std::string& session_id) const = 0;
};

class MemoryAuditLog final : public AuditLog {
 public:
  void append(const AuditEvent& event) override;
  std::string dump(const std::string& session_id) const override;

  std::vector<AuditEvent> events(const std::string& session_id) const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::vector<AuditEvent>> per_session_;
};

/// One NDJSON file per session under `directory`, opened in append mode.
/// With fsync_on_write every append is flushed to disk before returning.
class FileAuditLog final : public AuditLog {
 public:
  explicit FileAuditLog(std::string directory, bool fsync_on_write = false);

  void append(const AuditEvent& event) override;
  std::string dump(const std::string& session_id) const override;

 private:
  std::string path_for(const std::string& session_id) const;

  std::string directory_;
  bool fsync_on_write_;
  mutable std::mutex mutex_;
};

// Parses an NDJSON audit log and reconstructs the session's verdicts from
// its Verdict events, in order.
std::vector<Verdict> replay_verdicts(const std::string& ndjson_log);

// All events parsed back from an NDJSON dump.
std::vector<AuditEvent> parse_audit_log(const std::string& ndjson_log);

using Clock = std::function<std::int64_t()>;  // epoch milliseconds
Clock system_clock_ms();

}  // namespace sysguard
