#include "sysguard/policy.hpp"

#include <utility>

#include "sysguard/errors.hpp"
#include "sysguard/guard.hpp"

namespace sysguard {

std::string_view to_string(Mechanism mechanism) {
  switch (mechanism) {
    case Mechanism::None:
      return "None";
    case Mechanism::ReferenceKey:
      return "ReferenceKey";
    case Mechanism::LlmEvaluator:
      return "LlmEvaluator";
    case Mechanism::SelfReminder:
      return "SelfReminder";
  }
  return "None";
}

Mechanism mechanism_from_string(std::string_view name) {
  if (name == "None") return Mechanism::None;
  if (name == "ReferenceKey") return Mechanism::ReferenceKey;
  if (name == "LlmEvaluator") return Mechanism::LlmEvaluator;
  if (name == "SelfReminder") return Mechanism::SelfReminder;
  throw ConfigError("unknown mechanism name: '" + std::string(name) + "'");
}

std::string_view mechanism_display_name(Mechanism mechanism) {
  switch (mechanism) {
    case Mechanism::None:
      return "None";
    case Mechanism::ReferenceKey:
      return "Reference Key as Identifier";
    case Mechanism::LlmEvaluator:
      return "LLM Evaluator";
    case Mechanism::SelfReminder:
      return "Self-Reminder";
  }
  return "None";
}

std::string_view mechanism_type_name(Mechanism mechanism) {
  switch (mechanism) {
    case Mechanism::None:
      return "None";
    case Mechanism::ReferenceKey:
    case Mechanism::LlmEvaluator:
      return "Detection";
    case Mechanism::SelfReminder:
      return "Defense";
  }
  return "None";
}

void GuardPolicy::validate() const {
  if (original_system_message.empty()) {
    throw PolicyError("original_system_message must be non-empty");
  }
  if (mechanisms.empty()) {
    throw PolicyError("mechanisms must not be empty (use None explicitly)");
  }
  if (mechanisms.count(Mechanism::None) > 0 && mechanisms.size() > 1) {
    throw PolicyError("mechanism None cannot be combined with other mechanisms");
  }
  if (mechanisms.count(Mechanism::ReferenceKey) > 0 &&
      (!reference_key.has_value() || reference_key->empty())) {
    throw PolicyError("ReferenceKey mechanism requires a non-empty reference_key");
  }
  if (drift_threshold < 0 || drift_threshold > 5) {
    throw PolicyError("drift_threshold must be in [0,5]");
  }
}

std::string GuardPolicy::effective_system_message() const {
  validate();
  if (has(Mechanism::ReferenceKey)) {
    return install_reference_key(original_system_message, *reference_key);
  }
  return original_system_message;
}

std::string_view to_string(VerdictOutcome outcome) {
  switch (outcome) {
    case VerdictOutcome::Manipulated:
      return "Manipulated";
    case VerdictOutcome::NotManipulated:
      return "NotManipulated";
    case VerdictOutcome::Blocked:
      return "Blocked";
    case VerdictOutcome::Passed:
      return "Passed";
  }
  return "NotManipulated";
}

VerdictOutcome verdict_outcome_from_string(std::string_view name) {
  if (name == "Manipulated") return VerdictOutcome::Manipulated;
  if (name == "NotManipulated") return VerdictOutcome::NotManipulated;
  if (name == "Blocked") return VerdictOutcome::Blocked;
  if (name == "Passed") return VerdictOutcome::Passed;
  throw ConfigError("unknown verdict outcome: '" + std::string(name) + "'");
}

void Verdict::validate() const {
  const bool measured =
      outcome == VerdictOutcome::Manipulated || outcome == VerdictOutcome::NotManipulated;
  const bool needs_rating = mechanism == Mechanism::LlmEvaluator && measured;
  if (needs_rating != rating.has_value()) {
    throw PolicyError(
        "rating must be present iff mechanism is LlmEvaluator and the outcome is measured");
  }
  if (rating.has_value() && (*rating < 0 || *rating > 5)) {
    throw PolicyError("rating must be in [0,5]");
  }
}

Verdict make_verdict(Mechanism mechanism, VerdictOutcome outcome, std::string evidence,
                     std::optional<int> rating) {
  Verdict verdict{mechanism, outcome, std::move(evidence), rating};
  verdict.validate();
  return verdict;
}

}  // namespace sysguard
