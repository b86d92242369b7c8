#include <doctest.h>

#include <string>

#include "sysguard/config.hpp"
#include "sysguard/errors.hpp"
#include "test_util.hpp"

using namespace sysguard;

TEST_SUITE("app config") {
  TEST_CASE("an empty object yields all defaults") {
    const AppConfig config = parse_config("{}");
    CHECK(config.backend == BackendKind::Mock);
    CHECK(config.mock_topic_keywords == std::set<std::string>{"xbox"});
    CHECK(config.remote == RemoteBackendConfig{});
    CHECK(config.policy == default_policy());
    CHECK(config.cells.empty());
    CHECK(config.attempts == 5);
    CHECK(config.probe == std::string(kDefaultProbe));
    CHECK(config.format == ReportFormat::Table);
    CHECK_FALSE(config.gateway.per_turn_detection);
    CHECK_FALSE(config.gateway.fail_open);
    CHECK(config.audit_dir.empty());
    CHECK_FALSE(config.fsync_audit);
  }

  TEST_CASE("the shipped default config file spells out the same defaults") {
    const AppConfig from_file =
        load_config(test_util::fixtures_dir() + "/config/default.json");
    const AppConfig defaults = parse_config("{}");
    CHECK(from_file.backend == defaults.backend);
    CHECK(from_file.mock_topic_keywords == defaults.mock_topic_keywords);
    CHECK(from_file.policy == defaults.policy);
    CHECK(from_file.cells == defaults.cells);
    CHECK(from_file.attempts == defaults.attempts);
    CHECK(from_file.probe == defaults.probe);
    CHECK(from_file.format == defaults.format);
    CHECK(from_file.audit_dir == defaults.audit_dir);
    CHECK(from_file.fsync_audit == defaults.fsync_audit);
  }

  TEST_CASE("every section rejects unknown keys") {
    CHECK_THROWS_AS(parse_config("{\"typo\":1}"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"remote\":{\"url\":\"x\"}}"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"params\":{\"temp\":0}}"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"gateway\":{\"failopen\":true}}"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"cells\":[{\"mech\":\"None\"}]}"), ConfigError);
  }

  TEST_CASE("field values are validated") {
    CHECK_THROWS_AS(parse_config("not json"), ConfigError);
    CHECK_THROWS_AS(parse_config("[1,2]"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"backend\":\"cloud\"}"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"attempts\":0}"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"probe\":\"\"}"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"format\":\"xml\"}"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"mock_topic_keywords\":[]}"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"attempts\":\"five\"}"), ConfigError);
    CHECK_THROWS_AS(
        parse_config("{\"cells\":[{\"mechanism\":\"Nope\",\"attack\":\"role_play\"}]}"),
        ConfigError);
    CHECK_THROWS_AS(
        parse_config("{\"cells\":[{\"mechanism\":\"None\",\"attack\":\"role_play\","
                     "\"attempts\":0}]}"),
        ConfigError);
  }

  TEST_CASE("cells inherit the top-level attempt count") {
    const AppConfig config = parse_config(
        "{\"attempts\":2,\"cells\":["
        "{\"mechanism\":\"SelfReminder\",\"attack\":\"role_play\"},"
        "{\"mechanism\":\"None\",\"attack\":\"ignore_previous\",\"attempts\":7}]}");
    REQUIRE(config.cells.size() == 2);
    CHECK(config.cells[0].mechanism == Mechanism::SelfReminder);
    CHECK(config.cells[0].attempts == 2);
    CHECK(config.cells[1].attempts == 7);

    const HarnessConfig harness = config.harness_config();
    CHECK(harness.cells == config.cells);
    CHECK(harness.attempts == 2);
    CHECK(harness.policy == config.policy);
  }

  TEST_CASE("policy overrides replace the default policy") {
    const AppConfig config = parse_config(
        "{\"policy\":{\"original_system_message\":\"You answer only gardening questions.\","
        "\"mechanisms\":[\"SelfReminder\"],\"reference_key\":null,\"drift_threshold\":4,"
        "\"topic_keywords\":[\"garden\"],\"role_summary\":\"a gardening helper\","
        "\"restriction\":\"only discuss gardening\"}}");
    CHECK(config.policy.original_system_message == "You answer only gardening questions.");
    CHECK(config.policy.mechanisms == std::set<Mechanism>{Mechanism::SelfReminder});
    CHECK_FALSE(config.policy.reference_key.has_value());
    CHECK(config.policy.drift_threshold == 4);
  }

  TEST_CASE("make_backend produces the configured kind") {
    const AppConfig mock_config = parse_config("{\"backend\":\"mock\"}");
    auto backend = mock_config.make_backend();
    REQUIRE(backend);
    CHECK(backend->mock_grammar());

    AppConfig remote_config = parse_config(
        "{\"backend\":\"remote\",\"remote\":{\"base_url\":\"http://127.0.0.1:1\","
        "\"model\":\"test-model\",\"max_retries\":0}}");
    auto remote = remote_config.make_backend();
    REQUIRE(remote);
    CHECK_FALSE(remote->mock_grammar());

    CHECK(backend_kind_from_string("mock") == BackendKind::Mock);
    CHECK(backend_kind_from_string("remote") == BackendKind::Remote);
    CHECK_THROWS_AS(backend_kind_from_string("local"), ConfigError);
  }

  TEST_CASE("missing config files are storage errors") {
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), StorageError);
  }
}
