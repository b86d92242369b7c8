// Command-line entry points for the guardrail gateway and its red-team
// harness:
//
//   sysguard serve        run the HTTP gateway
//   sysguard redteam      run the scripted attack/defense protocol and report
//   sysguard key-probe    ask a running gateway to key-probe a session
//   sysguard drift-check  ask a running gateway to drift-check a session

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>
#include <httplib.h>

#include "sysguard/audit.hpp"
#include "sysguard/config.hpp"
#include "sysguard/errors.hpp"
#include "sysguard/harness.hpp"
#include "sysguard/report.hpp"
#include "sysguard/service.hpp"

namespace {

using namespace sysguard;

/// Writes one file per attempt transcript under a directory.
class DirectoryTranscriptSink final : public TranscriptSink {
 public:
  explicit DirectoryTranscriptSink(std::string directory) : directory_(std::move(directory)) {
    std::error_code ec;
    std::filesystem::create_directories(directory_, ec);
    if (ec) {
      throw StorageError("cannot create transcript directory '" + directory_ +
                         "': " + ec.message());
    }
  }

  void write(const std::string& ref, const std::string& text) override {
    const std::string path = directory_ + "/" + ref + ".ndjson";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError("cannot open transcript file: " + path);
    out << text;
    if (!out) throw StorageError("failed writing transcript file: " + path);
  }

 private:
  std::string directory_;
};

AppConfig config_or_default(const std::string& config_path) {
  if (config_path.empty()) return parse_config("{}");
  return load_config(config_path);
}

std::shared_ptr<AuditLog> make_audit_log(const AppConfig& config) {
  if (config.audit_dir.empty()) return std::make_shared<MemoryAuditLog>();
  return std::make_shared<FileAuditLog>(config.audit_dir, config.fsync_audit);
}

std::pair<std::string, int> split_listen(const std::string& listen) {
  const std::size_t colon = listen.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == listen.size()) {
    throw ConfigError("--listen expects host:port, got '" + listen + "'");
  }
  const std::string host = listen.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(listen.substr(colon + 1));
  } catch (const std::exception&) {
    throw ConfigError("--listen port is not a number: '" + listen + "'");
  }
  if (port < 0 || port > 65535) throw ConfigError("--listen port out of range");
  return {host, port};
}

int run_serve(const std::string& config_path, const std::string& listen) {
  const AppConfig config = config_or_default(config_path);
  const auto [host, port] = split_listen(listen);

  GatewayService service(config.make_backend(), make_audit_log(config), config.gateway,
                         config.params);
  std::cout << "listening on " << host << ":" << port << std::endl;
  if (!service.listen_blocking(host, port)) {
    std::cerr << "error: cannot listen on " << host << ":" << port << std::endl;
    return 1;
  }
  return 0;
}

int run_redteam(const std::string& config_path, const std::string& backend_override,
                const std::string& format_override, const std::string& out_path,
                const std::string& transcripts_dir) {
  AppConfig config = config_or_default(config_path);
  if (!backend_override.empty()) {
    config.backend = backend_kind_from_string(backend_override);
  }
  if (!format_override.empty()) {
    config.format = report_format_from_string(format_override);
  }

  std::unique_ptr<DirectoryTranscriptSink> sink;
  if (!transcripts_dir.empty()) {
    sink = std::make_unique<DirectoryTranscriptSink>(transcripts_dir);
  }

  const auto backend = config.make_backend();
  const std::vector<CellResult> results =
      run_matrix(config.harness_config(), *backend, sink.get());
  const std::string report = render_report(results, config.format);

  if (out_path.empty()) {
    std::cout << report;
  } else {
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError("cannot open report file: " + out_path);
    out << report;
    if (!out) throw StorageError("failed writing report file: " + out_path);
  }
  return 0;
}

int run_session_check(const std::string& server, const std::string& session_id,
                      const std::string& check) {
  httplib::Client client(server);
  client.set_connection_timeout(10, 0);
  client.set_read_timeout(30, 0);
  const std::string path = "/v1/sessions/" + session_id + "/" + check;
  const httplib::Result result = client.Post(path, "", "application/json");
  if (!result) {
    std::cerr << "error: cannot reach gateway at " << server << " ("
              << httplib::to_string(result.error()) << ")" << std::endl;
    return 2;
  }
  std::cout << result->body << std::endl;
  if (result->status != 200) {
    std::cerr << "error: gateway returned status " << result->status << std::endl;
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Guardrail gateway and red-team harness for chat assistants"};
  app.require_subcommand(1);

  std::string config_path;
  std::string listen = "127.0.0.1:8080";
  CLI::App* serve = app.add_subcommand("serve", "Run the HTTP gateway");
  serve->add_option("--config", config_path, "JSON config file");
  serve->add_option("--listen", listen, "host:port to listen on")->capture_default_str();

  std::string redteam_config;
  std::string backend_override;
  std::string format_override;
  std::string out_path;
  std::string transcripts_dir;
  CLI::App* redteam =
      app.add_subcommand("redteam", "Run the scripted attack/defense protocol");
  redteam->add_option("--config", redteam_config, "JSON config file");
  redteam->add_option("--backend", backend_override, "Backend override: mock|remote")
      ->check(CLI::IsMember({"mock", "remote"}));
  redteam->add_option("--format", format_override, "Report format override: table|machine")
      ->check(CLI::IsMember({"table", "machine"}));
  redteam->add_option("--out", out_path, "Write the report to this file (default stdout)");
  redteam->add_option("--transcripts", transcripts_dir,
                      "Write per-attempt transcripts into this directory");

  std::string server = "http://127.0.0.1:8080";
  std::string session_id;
  CLI::App* key_probe =
      app.add_subcommand("key-probe", "Run a reference-key probe on a gateway session");
  key_probe->add_option("--session", session_id, "Session id")->required();
  key_probe->add_option("--server", server, "Gateway base URL")->capture_default_str();

  std::string drift_server = "http://127.0.0.1:8080";
  std::string drift_session_id;
  CLI::App* drift_check =
      app.add_subcommand("drift-check", "Run a drift evaluation on a gateway session");
  drift_check->add_option("--session", drift_session_id, "Session id")->required();
  drift_check->add_option("--server", drift_server, "Gateway base URL")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (serve->parsed()) return run_serve(config_path, listen);
    if (redteam->parsed()) {
      return run_redteam(redteam_config, backend_override, format_override, out_path,
                         transcripts_dir);
    }
    if (key_probe->parsed()) return run_session_check(server, session_id, "key-probe");
    if (drift_check->parsed()) {
      return run_session_check(drift_server, drift_session_id, "drift-check");
    }
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << std::endl;
    return 1;
  }
  return 0;
}
