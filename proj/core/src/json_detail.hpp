#pragma once

// Internal nlohmann-level helpers shared by the .cpp files. Not installed.

#include <json.hpp>

#include "sysguard/audit.hpp"
#include "sysguard/guard.hpp"
#include "sysguard/policy.hpp"

namespace sysguard::detail {

nlohmann::json policy_to_json_obj(const GuardPolicy& policy);
GuardPolicy policy_from_json_obj(const nlohmann::json& j);

nlohmann::json verdict_to_json_obj(const Verdict& verdict);
Verdict verdict_from_json_obj(const nlohmann::json& j);

nlohmann::json key_verdict_to_json_obj(const KeyVerdict& verdict);
KeyVerdict key_verdict_from_json_obj(const nlohmann::json& j);

nlohmann::json drift_verdict_to_json_obj(const DriftVerdict& verdict);
DriftVerdict drift_verdict_from_json_obj(const nlohmann::json& j);

nlohmann::json audit_event_to_json_obj(const AuditEvent& event);
AuditEvent audit_event_from_json_obj(const nlohmann::json& j);

}  // namespace sysguard::detail
