#pragma once

#include <string>

#include "sysguard/guard.hpp"
#include "sysguard/policy.hpp"

namespace sysguard {

// Stable-byte JSON codecs for the wire records (sorted keys, no padding).
// These shapes are the HTTP contract and are pinned by golden tests.

std::string policy_to_json(const GuardPolicy& policy);
GuardPolicy policy_from_json(const std::string& json_text);  // throws ConfigError

std::string verdict_to_json(const Verdict& verdict);
Verdict verdict_from_json(const std::string& json_text);

std::string key_verdict_to_json(const KeyVerdict& verdict);
KeyVerdict key_verdict_from_json(const std::string& json_text);

std::string drift_verdict_to_json(const DriftVerdict& verdict);
DriftVerdict drift_verdict_from_json(const std::string& json_text);

}  // namespace sysguard
