#pragma once

#include <memory>
#include <string>
#include <thread>

#include "sysguard/audit.hpp"
#include "sysguard/backend.hpp"
#include "sysguard/session.hpp"

namespace sysguard {

/// HTTP gateway around a SessionManager:
///
///   POST /v1/sessions                      body: policy record -> {"session_id"}
///   POST /v1/sessions/{id}/messages        {"content"} -> {"assistant_text","verdicts"}
///   POST /v1/sessions/{id}/drift-check     -> drift verdict record
///   POST /v1/sessions/{id}/key-probe       -> key verdict record
///   GET  /v1/sessions/{id}/audit           -> NDJSON event stream
///
/// Bodies are stable-byte JSON records. Error mapping: 400 invalid input /
/// policy, 404 unknown session, 502 backend failure, 500 storage and other
/// internal errors.
class GatewayService {
 public:
  GatewayService(std::shared_ptr<ChatBackend> backend, std::shared_ptr<AuditLog> audit,
                 GatewayOptions options = {}, CompletionParams params = {},
                 Clock clock = system_clock_ms());
  ~GatewayService();

  GatewayService(const GatewayService&) = delete;
  GatewayService& operator=(const GatewayService&) = delete;

  // Starts serving on host:port in a background thread; port 0 picks a free
  // port. Returns false when the socket cannot be bound.
  bool start(const std::string& host, int port);
  int port() const { return port_; }
  void stop();

  // Serves on the calling thread (CLI `serve`).
  bool listen_blocking(const std::string& host, int port);

  SessionManager& sessions() { return *sessions_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::unique_ptr<SessionManager> sessions_;
  std::thread server_thread_;
  int port_ = 0;
};

}  // namespace sysguard
