#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <shared_mutex>
#include <string>
#include <vector>

#include "json.hpp"

namespace mortar {

struct ChatMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;
};

struct ChatRequest {
  std::string template_name;  // empty for free-form SUT turns
  std::vector<ChatMessage> messages;
  // Structured copy of the prompt bindings. Transport clients ignore it; the
  // mock client reads it to synthesize answers.
  nlohmann::json payload;
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;

  // Returns choices[0].message.content. Throws Error(kTransport) when the
  // endpoint cannot be reached or answers with a non-200 status.
  virtual std::string Complete(const ChatRequest &request) = 0;

  virtual std::string model_name() const = 0;
  virtual std::string Describe() const = 0;
};

// Request body for POST {endpoint}/chat/completions.
nlohmann::json ChatRequestBody(const std::string &model,
                               const std::vector<ChatMessage> &messages,
                               double temperature);

// Extracts choices[0].message.content; throws Error(kTransport) on any
// other shape.
std::string ParseChatResponse(const std::string &body);

struct HttpChatOptions {
  std::string endpoint;
  std::string model;
  std::string api_key;
  double temperature = 0.0;
  int max_retries = 2;
  double timeout_seconds = 60.0;
  double backoff_seconds = 0.5;  // doubled after each failed attempt
  int max_in_flight = 4;
};

class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(HttpChatOptions options);

  std::string Complete(const ChatRequest &request) override;
  std::string model_name() const override { return options_.model; }
  std::string Describe() const override;

  const HttpChatOptions &options() const { return options_; }

 private:
  HttpChatOptions options_;
  std::counting_semaphore<1024> in_flight_;
};

// SHA-256 keyed response store with an optional on-disk mirror (one file per
// key). Concurrent readers, exclusive writers.
class ResponseCache {
 public:
  ResponseCache() = default;
  explicit ResponseCache(std::filesystem::path directory);

  static std::string Key(const std::string &template_name,
                         const std::string &rendered_prompt,
                         const std::string &model);

  std::optional<std::string> Get(const std::string &key) const;
  void Put(const std::string &key, const std::string &value);

  size_t size() const;

 private:
  std::optional<std::filesystem::path> directory_;
  mutable std::shared_mutex mu_;
  mutable std::map<std::string, std::string> entries_;
};

// Serves repeated (template, prompt, model) requests from the cache and
// counts the calls that reached the wrapped client.
class CachedChatClient : public ChatClient {
 public:
  CachedChatClient(std::shared_ptr<ChatClient> inner,
                   std::shared_ptr<ResponseCache> cache);

  std::string Complete(const ChatRequest &request) override;
  std::string model_name() const override { return inner_->model_name(); }
  std::string Describe() const override { return inner_->Describe(); }

  long upstream_calls() const { return upstream_calls_.load(); }
  long cache_hits() const { return cache_hits_.load(); }

 private:
  std::shared_ptr<ChatClient> inner_;
  std::shared_ptr<ResponseCache> cache_;
  std::atomic<long> upstream_calls_{0};
  std::atomic<long> cache_hits_{0};
};

std::string RenderMessages(const std::vector<ChatMessage> &messages);

}  // namespace mortar
