#include "sysguard/conversation.hpp"

#include <atomic>
#include <utility>

#include <json.hpp>

#include "sysguard/errors.hpp"

namespace sysguard {

namespace {

std::string next_conversation_id() {
  static std::atomic<std::uint64_t> counter{1};
  return "conv-" + std::to_string(counter.fetch_add(1));
}

}  // namespace

std::string_view to_string(Role role) {
  switch (role) {
    case Role::System:
      return "system";
    case Role::User:
      return "user";
    case Role::Assistant:
      return "assistant";
  }
  return "user";
}

Role role_from_string(std::string_view name) {
  if (name == "system") return Role::System;
  if (name == "user") return Role::User;
  if (name == "assistant") return Role::Assistant;
  throw ConfigError("unknown role: '" + std::string(name) + "'");
}

bool Conversation::has_system_message() const {
  return !messages_.empty() && messages_.front().role == Role::System;
}

Conversation Conversation::append(Role role, std::string content) const {
  if (role == Role::System && !messages_.empty()) {
    throw OrderingError("a System message is only allowed at turn_index 0");
  }
  if (role != Role::System && content.empty()) {
    throw ContentError("User/Assistant content must be non-empty");
  }
  Conversation next = *this;
  next.messages_.push_back(Message{role, std::move(content), static_cast<int>(messages_.size())});
  return next;
}

Conversation new_conversation(const GuardPolicy& policy, std::string id, std::string policy_id) {
  const std::string system_text = policy.effective_system_message();  // validates
  if (id.empty()) id = next_conversation_id();
  Conversation conversation(std::move(id), std::move(policy_id));
  return conversation.append(Role::System, system_text);
}

Conversation append_message(const Conversation& conversation, Role role, std::string content) {
  return conversation.append(role, std::move(content));
}

std::string serialize_conversation(const Conversation& conversation) {
  std::string out;
  for (const Message& message : conversation.messages()) {
    nlohmann::json record{
        {"content", message.content},
        {"conversation_id", conversation.id()},
        {"role", std::string(to_string(message.role))},
        {"turn_index", message.turn_index},
    };
    out += record.dump();
    out += '\n';
  }
  return out;
}

Conversation deserialize_conversation(const std::string& text) {
  Conversation conversation;
  std::size_t start = 0;
  bool first = true;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    const std::string line = text.substr(start, end - start);
    start = end + 1;
    if (line.empty()) continue;

    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("bad conversation record: " + std::string(e.what()));
    }
    if (first) {
      conversation = Conversation(record.at("conversation_id").get<std::string>(), "");
      first = false;
    }
    const Role role = role_from_string(record.at("role").get<std::string>());
    const int turn_index = record.at("turn_index").get<int>();
    conversation = conversation.append(role, record.at("content").get<std::string>());
    if (conversation.messages().back().turn_index != turn_index) {
      throw OrderingError("non-contiguous turn_index in conversation record");
    }
  }
  return conversation;
}

}  // namespace sysguard
