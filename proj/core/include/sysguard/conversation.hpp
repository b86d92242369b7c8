#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sysguard/policy.hpp"

namespace sysguard {

enum class Role { System, User, Assistant };

std::string_view to_string(Role role);
Role role_from_string(std::string_view name);

/// One turn in a conversation. turn_index values are contiguous from 0.
struct Message {
  Role role = Role::User;
  std::string content;
  int turn_index = 0;

  bool operator==(const Message&) const = default;
};

/// Immutable role-tagged turn sequence. At most one System message, and only
/// at turn_index 0. append() returns a new value; existing values are never
/// mutated, so conversations are safe to share across threads and to replay.
class Conversation {
 public:
  Conversation() = default;
  Conversation(std::string id, std::string policy_id) noexcept
      : id_(std::move(id)), policy_id_(std::move(policy_id)) {}

  const std::string& id() const { return id_; }
  const std::string& policy_id() const { return policy_id_; }
  const std::vector<Message>& messages() const { return messages_; }
  bool empty() const { return messages_.empty(); }
  std::size_t size() const { return messages_.size(); }

  bool has_system_message() const;

  // Returns a copy with the message appended at the next turn_index.
  // Throws OrderingError for a second System message and ContentError for
  // empty User/Assistant content.
  [[nodiscard]] Conversation append(Role role, std::string content) const;

  bool operator==(const Conversation&) const = default;

 private:
  std::string id_;
  std::string policy_id_;
  std::vector<Message> messages_;
};

// Starts a conversation for a validated policy: exactly one System message at
// index 0 carrying policy.effective_system_message(). Throws PolicyError for
// an invalid policy. An empty id is replaced by a process-unique "conv-<n>".
Conversation new_conversation(const GuardPolicy& policy, std::string id = "",
                              std::string policy_id = "");

// Free-function form of Conversation::append.
Conversation append_message(const Conversation& conversation, Role role, std::string content);

// Newline-delimited conversation log: one record per message with fields
// {conversation_id, turn_index, role, content}. Deserialization restores a
// byte-identical message list.
std::string serialize_conversation(const Conversation& conversation);
Conversation deserialize_conversation(const std::string& text);

}  // namespace sysguard
