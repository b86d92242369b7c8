#include "sysguard/json_io.hpp"

#include "json_detail.hpp"
#include "sysguard/errors.hpp"

namespace sysguard {

namespace detail {

namespace {

nlohmann::json parse_object(const std::string& json_text, const char* what) {
  const nlohmann::json parsed =
      nlohmann::json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded() || !parsed.is_object()) {
    throw ConfigError(std::string(what) + " is not a JSON object: " + json_text);
  }
  return parsed;
}

[[noreturn]] void rethrow_as_config(const char* what, const nlohmann::json::exception& error) {
  throw ConfigError(std::string("malformed ") + what + ": " + error.what());
}

}  // namespace

nlohmann::json policy_to_json_obj(const GuardPolicy& policy) {
  nlohmann::json j;
  j["original_system_message"] = policy.original_system_message;
  nlohmann::json mechanisms = nlohmann::json::array();
  for (const Mechanism mechanism : policy.mechanisms) {
    mechanisms.push_back(std::string(to_string(mechanism)));
  }
  j["mechanisms"] = std::move(mechanisms);
  if (policy.reference_key) {
    j["reference_key"] = *policy.reference_key;
  } else {
    j["reference_key"] = nullptr;
  }
  j["drift_threshold"] = policy.drift_threshold;
  j["topic_keywords"] = policy.topic_keywords;
  j["role_summary"] = policy.role_summary;
  j["restriction"] = policy.restriction;
  return j;
}

GuardPolicy policy_from_json_obj(const nlohmann::json& j) {
  try {
    GuardPolicy policy;
    policy.original_system_message = j.at("original_system_message").get<std::string>();
    if (j.contains("mechanisms")) {
      policy.mechanisms.clear();
      for (const auto& name : j.at("mechanisms")) {
        policy.mechanisms.insert(mechanism_from_string(name.get<std::string>()));
      }
    }
    if (j.contains("reference_key") && !j.at("reference_key").is_null()) {
      policy.reference_key = j.at("reference_key").get<std::string>();
    }
    if (j.contains("drift_threshold")) {
      policy.drift_threshold = j.at("drift_threshold").get<int>();
    }
    if (j.contains("topic_keywords")) {
      policy.topic_keywords = j.at("topic_keywords").get<std::set<std::string>>();
    }
    if (j.contains("role_summary")) {
      policy.role_summary = j.at("role_summary").get<std::string>();
    }
    if (j.contains("restriction")) {
      policy.restriction = j.at("restriction").get<std::string>();
    }
    policy.validate();
    return policy;
  } catch (const nlohmann::json::exception& error) {
    rethrow_as_config("policy", error);
  }
}

nlohmann::json verdict_to_json_obj(const Verdict& verdict) {
  nlohmann::json j;
  j["mechanism"] = std::string(to_string(verdict.mechanism));
  j["outcome"] = std::string(to_string(verdict.outcome));
  j["evidence"] = verdict.evidence;
  if (verdict.rating) {
    j["rating"] = *verdict.rating;
  } else {
    j["rating"] = nullptr;
  }
  return j;
}

Verdict verdict_from_json_obj(const nlohmann::json& j) {
  try {
    Verdict verdict;
    verdict.mechanism = mechanism_from_string(j.at("mechanism").get<std::string>());
    verdict.outcome = verdict_outcome_from_string(j.at("outcome").get<std::string>());
    verdict.evidence = j.at("evidence").get<std::string>();
    if (j.contains("rating") && !j.at("rating").is_null()) {
      verdict.rating = j.at("rating").get<int>();
    }
    verdict.validate();
    return verdict;
  } catch (const nlohmann::json::exception& error) {
    rethrow_as_config("verdict", error);
  }
}

nlohmann::json key_verdict_to_json_obj(const KeyVerdict& verdict) {
  nlohmann::json j;
  j["outcome"] = std::string(to_string(verdict.outcome));
  if (verdict.returned_key) {
    j["returned_key"] = *verdict.returned_key;
  } else {
    j["returned_key"] = nullptr;
  }
  return j;
}

KeyVerdict key_verdict_from_json_obj(const nlohmann::json& j) {
  try {
    KeyVerdict verdict;
    verdict.outcome = key_outcome_from_string(j.at("outcome").get<std::string>());
    if (j.contains("returned_key") && !j.at("returned_key").is_null()) {
      verdict.returned_key = j.at("returned_key").get<std::string>();
    }
    return verdict;
  } catch (const nlohmann::json::exception& error) {
    rethrow_as_config("key verdict", error);
  }
}

nlohmann::json drift_verdict_to_json_obj(const DriftVerdict& verdict) {
  nlohmann::json j;
  j["rating"] = verdict.rating;
  j["threshold"] = verdict.threshold;
  j["manipulated"] = verdict.manipulated;
  j["evaluator_reply"] = verdict.evaluator_reply;
  return j;
}

DriftVerdict drift_verdict_from_json_obj(const nlohmann::json& j) {
  try {
    DriftVerdict verdict;
    verdict.rating = j.at("rating").get<int>();
    verdict.threshold = j.at("threshold").get<int>();
    verdict.manipulated = j.at("manipulated").get<bool>();
    verdict.evaluator_reply = j.at("evaluator_reply").get<std::string>();
    return verdict;
  } catch (const nlohmann::json::exception& error) {
    rethrow_as_config("drift verdict", error);
  }
}

nlohmann::json audit_event_to_json_obj(const AuditEvent& event) {
  return nlohmann::json::parse(audit_event_to_json(event));
}

AuditEvent audit_event_from_json_obj(const nlohmann::json& j) {
  return audit_event_from_json(j.dump());
}

}  // namespace detail

std::string policy_to_json(const GuardPolicy& policy) {
  return detail::policy_to_json_obj(policy).dump();
}

GuardPolicy policy_from_json(const std::string& json_text) {
  return detail::policy_from_json_obj(detail::parse_object(json_text, "policy"));
}

std::string verdict_to_json(const Verdict& verdict) {
  return detail::verdict_to_json_obj(verdict).dump();
}

Verdict verdict_from_json(const std::string& json_text) {
  return detail::verdict_from_json_obj(detail::parse_object(json_text, "verdict"));
}

std::string key_verdict_to_json(const KeyVerdict& verdict) {
  return detail::key_verdict_to_json_obj(verdict).dump();
}

KeyVerdict key_verdict_from_json(const std::string& json_text) {
  return detail::key_verdict_from_json_obj(detail::parse_object(json_text, "key verdict"));
}

std::string drift_verdict_to_json(const DriftVerdict& verdict) {
  return detail::drift_verdict_to_json_obj(verdict).dump();
}

DriftVerdict drift_verdict_from_json(const std::string& json_text) {
  return detail::drift_verdict_from_json_obj(detail::parse_object(json_text, "drift verdict"));
}

}  // namespace sysguard
