#include "sysguard/service.hpp"

#include <utility>

#include <httplib.h>
#include <json.hpp>

#include "sysguard/errors.hpp"
#include "sysguard/json_io.hpp"

namespace sysguard {

namespace {

int status_for(const std::exception& error) {
  if (dynamic_cast<const NotFoundError*>(&error) != nullptr) return 404;
  if (dynamic_cast<const BackendError*>(&error) != nullptr ||
      dynamic_cast<const GrammarError*>(&error) != nullptr ||
      dynamic_cast<const RatingParseError*>(&error) != nullptr) {
    return 502;  // upstream completion failed or replied with garbage
  }
  if (dynamic_cast<const StorageError*>(&error) != nullptr) return 500;
  if (dynamic_cast<const Error*>(&error) != nullptr) return 400;  // caller mistake
  return 500;
}

void set_error(httplib::Response& res, const std::exception& error) {
  res.status = status_for(error);
  res.set_content(nlohmann::json{{"error", error.what()}}.dump(), "application/json");
}

void set_json(httplib::Response& res, const std::string& body) {
  res.status = 200;
  res.set_content(body, "application/json");
}

}  // namespace

struct GatewayService::Impl {
  httplib::Server server;
};

GatewayService::GatewayService(std::shared_ptr<ChatBackend> backend,
                               std::shared_ptr<AuditLog> audit, GatewayOptions options,
                               CompletionParams params, Clock clock)
    : impl_(std::make_unique<Impl>()),
      sessions_(std::make_unique<SessionManager>(std::move(backend), std::move(audit), options,
                                                 params, std::move(clock))) {
  httplib::Server& server = impl_->server;

  const auto guarded = [](auto&& handler) {
    return [handler](const httplib::Request& req, httplib::Response& res) {
      try {
        handler(req, res);
      } catch (const std::exception& error) {
        set_error(res, error);
      }
    };
  };

  server.Post("/v1/sessions", guarded([this](const httplib::Request& req,
                                             httplib::Response& res) {
                const GuardPolicy policy = policy_from_json(req.body);
                const std::string id = sessions_->create_session(policy);
                set_json(res, nlohmann::json{{"session_id", id}}.dump());
              }));

  server.Post(R"(/v1/sessions/([^/]+)/messages)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                const nlohmann::json body =
                    nlohmann::json::parse(req.body, nullptr, /*allow_exceptions=*/false);
                if (body.is_discarded() || !body.is_object() || !body.contains("content") ||
                    !body.at("content").is_string()) {
                  throw InputError("request body must be a JSON object with string 'content'");
                }
                const auto session = sessions_->get(req.matches[1].str());
                const ChatOutcome outcome =
                    session->handle_chat(body.at("content").get<std::string>());
                nlohmann::json verdicts = nlohmann::json::array();
                for (const Verdict& verdict : outcome.verdicts) {
                  verdicts.push_back(nlohmann::json::parse(verdict_to_json(verdict)));
                }
                set_json(res, nlohmann::json{{"assistant_text", outcome.assistant_text},
                                             {"verdicts", verdicts}}
                                  .dump());
              }));

  server.Post(R"(/v1/sessions/([^/]+)/drift-check)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                const auto session = sessions_->get(req.matches[1].str());
                set_json(res, drift_verdict_to_json(session->drift_check()));
              }));

  server.Post(R"(/v1/sessions/([^/]+)/key-probe)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                const auto session = sessions_->get(req.matches[1].str());
                set_json(res, key_verdict_to_json(session->key_probe()));
              }));

  server.Get(R"(/v1/sessions/([^/]+)/audit)",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               const std::string id = req.matches[1].str();
               sessions_->get(id);  // 404 for unknown sessions
               res.status = 200;
               res.set_content(sessions_->audit()->dump(id), "application/x-ndjson");
             }));
}

GatewayService::~GatewayService() { stop(); }

bool GatewayService::start(const std::string& host, int port) {
  httplib::Server& server = impl_->server;
  if (port == 0) {
    port_ = server.bind_to_any_port(host);
    if (port_ < 0) return false;
  } else {
    if (!server.bind_to_port(host, port)) return false;
    port_ = port;
  }
  server_thread_ = std::thread([&server] { server.listen_after_bind(); });
  server.wait_until_ready();
  return true;
}

void GatewayService::stop() {
  if (impl_ && impl_->server.is_running()) {
    impl_->server.stop();
  }
  if (server_thread_.joinable()) {
    server_thread_.join();
  }
}

bool GatewayService::listen_blocking(const std::string& host, int port) {
  port_ = port;
  return impl_->server.listen(host, port);
}

}  // namespace sysguard
