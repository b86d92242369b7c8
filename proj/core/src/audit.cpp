#include "sysguard/audit.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sysguard/errors.hpp"
#include "sysguard/json_io.hpp"

namespace sysguard {

std::string_view to_string(AuditKind kind) {
  switch (kind) {
    case AuditKind::SessionCreated:
      return "session_created";
    case AuditKind::UserTurn:
      return "user_turn";
    case AuditKind::AssistantTurn:
      return "assistant_turn";
    case AuditKind::GuardProbe:
      return "guard_probe";
    case AuditKind::Verdict:
      return "verdict";
  }
  return "user_turn";
}

AuditKind audit_kind_from_string(std::string_view name) {
  if (name == "session_created") return AuditKind::SessionCreated;
  if (name == "user_turn") return AuditKind::UserTurn;
  if (name == "assistant_turn") return AuditKind::AssistantTurn;
  if (name == "guard_probe") return AuditKind::GuardProbe;
  if (name == "verdict") return AuditKind::Verdict;
  throw ConfigError("unknown audit event kind: '" + std::string(name) + "'");
}

void AuditEvent::validate() const {
  if (session_id.empty()) {
    throw InputError("audit event requires a session id");
  }
  const bool internal = kind == AuditKind::SessionCreated || kind == AuditKind::GuardProbe ||
                        kind == AuditKind::Verdict;
  if (internal && visible_to_user) {
    throw PolicyError("guard-internal audit events must not be user-visible");
  }
}

std::string audit_event_to_json(const AuditEvent& event) {
  nlohmann::json record;
  record["timestamp"] = event.timestamp;
  record["session_id"] = event.session_id;
  record["kind"] = std::string(to_string(event.kind));
  record["payload"] = event.payload;
  record["visible_to_user"] = event.visible_to_user;
  return record.dump();
}

AuditEvent audit_event_from_json(const std::string& line) {
  const nlohmann::json record = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (record.is_discarded() || !record.is_object()) {
    throw ConfigError("audit record is not a JSON object: " + line);
  }
  try {
    AuditEvent event;
    event.timestamp = record.at("timestamp").get<std::int64_t>();
    event.session_id = record.at("session_id").get<std::string>();
    event.kind = audit_kind_from_string(record.at("kind").get<std::string>());
    event.payload = record.at("payload").get<std::string>();
    event.visible_to_user = record.at("visible_to_user").get<bool>();
    return event;
  } catch (const nlohmann::json::exception& error) {
    throw ConfigError(std::string("malformed audit record: ") + error.what());
  }
}

void MemoryAuditLog::append(const AuditEvent& event) {
  event.validate();
  const std::lock_guard<std::mutex> lock(mutex_);
  per_session_[event.session_id].push_back(event);
}

std::string MemoryAuditLog::dump(const std::string& session_id) const {
  const std::lock_guard<std::mutex> lock(mutex_);
  const auto it = per_session_.find(session_id);
  if (it == per_session_.end()) return {};
  std::string out;
  for (const AuditEvent& event : it->second) {
    out += audit_event_to_json(event);
    out += '\n';
  }
  return out;
}

std::vector<AuditEvent> MemoryAuditLog::events(const std::string& session_id) const {
  const std::lock_guard<std::mutex> lock(mutex_);
  const auto it = per_session_.find(session_id);
  if (it == per_session_.end()) return {};
  return it->second;
}

FileAuditLog::FileAuditLog(std::string directory, bool fsync_on_write)
    : directory_(std::move(directory)), fsync_on_write_(fsync_on_write) {
  if (directory_.empty()) throw ConfigError("audit log directory must be non-empty");
  std::error_code ec;
  std::filesystem::create_directories(directory_, ec);
  if (ec) {
    throw StorageError("cannot create audit log directory '" + directory_ + "': " + ec.message());
  }
}

std::string FileAuditLog::path_for(const std::string& session_id) const {
  if (session_id.empty() || session_id.find('/') != std::string::npos ||
      session_id.find("..") != std::string::npos) {
    throw InputError("audit session id is not a safe file name: '" + session_id + "'");
  }
  return directory_ + "/" + session_id + ".ndjson";
}

void FileAuditLog::append(const AuditEvent& event) {
  event.validate();
  const std::string line = audit_event_to_json(event) + "\n";
  const std::string path = path_for(event.session_id);

  const std::lock_guard<std::mutex> lock(mutex_);
  const int fd = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT, 0644);
  if (fd < 0) throw StorageError("cannot open audit log file: " + path);
  std::size_t written = 0;
  while (written < line.size()) {
    const ssize_t n = ::write(fd, line.data() + written, line.size() - written);
    if (n < 0) {
      ::close(fd);
      throw StorageError("failed appending to audit log file: " + path);
    }
    written += static_cast<std::size_t>(n);
  }
  if (fsync_on_write_ && ::fsync(fd) != 0) {
    ::close(fd);
    throw StorageError("fsync failed for audit log file: " + path);
  }
  ::close(fd);
}

std::string FileAuditLog::dump(const std::string& session_id) const {
  const std::string path = path_for(session_id);
  const std::lock_guard<std::mutex> lock(mutex_);
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<AuditEvent> parse_audit_log(const std::string& ndjson_log) {
  std::vector<AuditEvent> events;
  std::istringstream stream(ndjson_log);
  std::string line;
  while (std::getline(stream, line)) {
    if (line.empty()) continue;
    events.push_back(audit_event_from_json(line));
  }
  return events;
}

std::vector<Verdict> replay_verdicts(const std::string& ndjson_log) {
  std::vector<Verdict> verdicts;
  for (const AuditEvent& event : parse_audit_log(ndjson_log)) {
    if (event.kind == AuditKind::Verdict) {
      verdicts.push_back(verdict_from_json(event.payload));
    }
  }
  return verdicts;
}

Clock system_clock_ms() {
  return [] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
  };
}

}  // namespace sysguard
