#include "sysguard/backend.hpp"

#include <json.hpp>

#include "sysguard/errors.hpp"

namespace sysguard {

BackendRequest BackendRequest::from_conversation(const Conversation& conversation,
                                                 const CompletionParams& params) {
  BackendRequest request;
  request.messages.reserve(conversation.size());
  for (const Message& message : conversation.messages()) {
    request.messages.push_back(Turn{message.role, message.content});
  }
  request.temperature = params.temperature;
  request.top_p = params.top_p;
  return request;
}

std::string request_wire_json(const BackendRequest& request, const std::string& model) {
  nlohmann::json body;
  body["model"] = model;
  body["temperature"] = request.temperature;
  body["top_p"] = request.top_p;
  nlohmann::json messages = nlohmann::json::array();
  for (const BackendRequest::Turn& turn : request.messages) {
    messages.push_back({{"role", std::string(to_string(turn.role))}, {"content", turn.content}});
  }
  body["messages"] = std::move(messages);
  return body.dump();
}

MockBackend::MockBackend(std::set<std::string> topic_keywords)
    : topic_keywords_(std::move(topic_keywords)) {
  if (topic_keywords_.empty()) {
    throw ConfigError("mock backend requires at least one topic keyword");
  }
}

namespace {

// Fold every user turn of the request through the state machine; returns the
// reply to the final user turn plus the resulting state.
std::pair<MockReply, MockAssistantState> replay(const BackendRequest& request,
                                                const std::set<std::string>& topic_keywords) {
  if (request.messages.empty() || request.messages.back().role != Role::User) {
    throw SequenceError("mock backend request must end with a User message");
  }
  std::string system_message;
  if (request.messages.front().role == Role::System) {
    system_message = request.messages.front().content;
  }
  MockAssistantState state = MockAssistantState::fresh(system_message, topic_keywords);
  const CompletionParams params{request.temperature, request.top_p};

  std::vector<Message> prefix;
  prefix.reserve(request.messages.size());
  MockReply reply;
  for (const BackendRequest::Turn& turn : request.messages) {
    prefix.push_back(Message{turn.role, turn.content, static_cast<int>(prefix.size())});
    if (turn.role == Role::User) {
      auto [next_reply, next_state] = mock_complete(state, prefix, params);
      reply = next_reply;
      state = next_state;
    }
  }
  return {reply, state};
}

}  // namespace

std::string MockBackend::chat_complete(const BackendRequest& request) {
  return replay(request, topic_keywords_).first.render();
}

MockAssistantState MockBackend::replay_state(const BackendRequest& request) const {
  return replay(request, topic_keywords_).second;
}

}  // namespace sysguard
