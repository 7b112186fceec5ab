#pragma once

#include <atomic>
#include <memory>
#include <string>

#include "chat.hpp"
#include "json.hpp"

namespace mortar {

// Offline stand-in for a chat endpoint. Fixture entries are tried in order:
//
//   {"responses": [{"template": "<function name>",
//                   "contains": ["substring", ...],   // all must occur in
//                                                     // the last user message
//                   "response": <string or JSON>}]}
//
// Requests that match no entry get a rule-based answer synthesized from the
// request payload, so any dataset can be processed without fixtures.
class MockChatClient : public ChatClient {
 public:
  MockChatClient() = default;
  explicit MockChatClient(nlohmann::json fixtures);

  static std::unique_ptr<MockChatClient> FromFile(const std::string &path);

  std::string Complete(const ChatRequest &request) override;
  std::string model_name() const override { return "mock"; }
  std::string Describe() const override;

  long calls() const { return calls_.load(); }
  long fixture_hits() const { return fixture_hits_.load(); }

 private:
  nlohmann::json fixtures_ = nlohmann::json::array();
  std::string source_ = "builtin";
  std::atomic<long> calls_{0};
  std::atomic<long> fixture_hits_{0};
};

// The rule-based answer for one request, exposed for tests.
nlohmann::json HeuristicReply(const ChatRequest &request);

}  // namespace mortar
