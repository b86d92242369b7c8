#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace sysguard {

// Detection/defense mechanisms a policy can activate. None is exclusive.
enum class Mechanism {
  None,
  ReferenceKey,
  LlmEvaluator,
  SelfReminder,
};

std::string_view to_string(Mechanism mechanism);

// Parses a config-level mechanism name ("None", "ReferenceKey",
// "LlmEvaluator", "SelfReminder"). Throws ConfigError on anything else.
Mechanism mechanism_from_string(std::string_view name);

// Human-readable report labels ("Reference Key as Identifier", ...) and the
// Detection/Defense/None type column derived from the mechanism.
std::string_view mechanism_display_name(Mechanism mechanism);
std::string_view mechanism_type_name(Mechanism mechanism);

/// Per-assistant guard configuration: the protected system message, which
/// mechanisms are active, and their parameters.
struct GuardPolicy {
  std::string original_system_message;
  std::set<Mechanism> mechanisms{Mechanism::None};
  std::optional<std::string> reference_key;
  int drift_threshold = 3;
  std::set<std::string> topic_keywords;
  std::string role_summary;
  std::string restriction;

  // Throws PolicyError when an invariant is broken:
  //  - original_system_message empty
  //  - mechanisms empty, or None combined with another mechanism
  //  - ReferenceKey active without a non-empty key
  //  - drift_threshold outside [0,5]
  void validate() const;

  // The system message actually installed at conversation start: the
  // original text, plus the reference key sentence when ReferenceKey is
  // active. Requires a valid policy.
  std::string effective_system_message() const;

  bool has(Mechanism mechanism) const { return mechanisms.count(mechanism) > 0; }

  bool operator==(const GuardPolicy&) const = default;
};

enum class VerdictOutcome {
  Manipulated,
  NotManipulated,
  Blocked,  // fail-closed: detector error rejected the turn
  Passed,   // fail-open: detector error, turn passed through
};

std::string_view to_string(VerdictOutcome outcome);
VerdictOutcome verdict_outcome_from_string(std::string_view name);

/// One detection/defense decision. `rating` is present iff the mechanism is
/// LlmEvaluator and the outcome is a real measurement (Manipulated or
/// NotManipulated); Blocked/Passed verdicts record a detector failure and
/// carry no rating. Enforced by make_verdict / validate.
struct Verdict {
  Mechanism mechanism = Mechanism::None;
  VerdictOutcome outcome = VerdictOutcome::NotManipulated;
  std::string evidence;
  std::optional<int> rating;

  void validate() const;  // throws PolicyError on the rating invariant

  bool operator==(const Verdict&) const = default;
};

Verdict make_verdict(Mechanism mechanism, VerdictOutcome outcome, std::string evidence,
                     std::optional<int> rating = std::nullopt);

}  // namespace sysguard
