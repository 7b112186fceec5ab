#include "chat.hpp"

#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include "error.hpp"
#include "http.hpp"
#include "text.hpp"

namespace mortar {

using nlohmann::json;

json ChatRequestBody(const std::string &model,
                     const std::vector<ChatMessage> &messages,
                     double temperature) {
  json msgs = json::array();
  for (const ChatMessage &m : messages) {
    msgs.push_back({{"role", m.role}, {"content", m.content}});
  }
  return {{"model", model}, {"messages", msgs}, {"temperature", temperature}};
}

std::string ParseChatResponse(const std::string &body) {
  try {
    json j = json::parse(body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kTransport,
                std::string("malformed chat response: ") + e.what());
  }
}

HttpChatClient::HttpChatClient(HttpChatOptions options)
    : options_(std::move(options)),
      in_flight_(std::clamp(options_.max_in_flight, 1, 1024)) {}

std::string HttpChatClient::Describe() const {
  return options_.endpoint + " model=" + options_.model;
}

std::string HttpChatClient::Complete(const ChatRequest &request) {
  std::string body =
      ChatRequestBody(options_.model, request.messages, options_.temperature)
          .dump();
  HttpHeaders headers;
  if (!options_.api_key.empty()) {
    headers.emplace_back("Authorization", "Bearer " + options_.api_key);
  }
  double backoff = options_.backoff_seconds;
  std::string last_error;
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
      backoff *= 2;
    }
    try {
      in_flight_.acquire();
      HttpResponse res;
      try {
        res = HttpPostJson(options_.endpoint, "/chat/completions", body,
                           headers, options_.timeout_seconds);
      } catch (...) {
        in_flight_.release();
        throw;
      }
      in_flight_.release();
      if (res.status == 200) return ParseChatResponse(res.body);
      last_error = "HTTP " + std::to_string(res.status) + ": " +
                   res.body.substr(0, 200);
      if (res.status >= 400 && res.status < 500 && res.status != 429) break;
    } catch (const Error &e) {
      if (e.kind() != ErrorKind::kTransport) throw;
      last_error = e.what();
    }
  }
  throw Error(ErrorKind::kTransport,
              "chat endpoint " + options_.endpoint + " failed: " + last_error);
}

ResponseCache::ResponseCache(std::filesystem::path directory)
    : directory_(std::move(directory)) {
  std::error_code ec;
  std::filesystem::create_directories(*directory_, ec);
  if (ec) {
    throw Error(ErrorKind::kIo, "cannot create cache directory " +
                                    directory_->string() + ": " + ec.message());
  }
}

std::string ResponseCache::Key(const std::string &template_name,
                               const std::string &rendered_prompt,
                               const std::string &model) {
  std::string material;
  for (const std::string *part : {&template_name, &rendered_prompt, &model}) {
    material += std::to_string(part->size());
    material.push_back(':');
    material += *part;
  }
  return text::Sha256Hex(material);
}

std::optional<std::string> ResponseCache::Get(const std::string &key) const {
  {
    std::shared_lock lock(mu_);
    auto it = entries_.find(key);
    if (it != entries_.end()) return it->second;
  }
  if (!directory_) return std::nullopt;
  std::ifstream in(*directory_ / (key + ".txt"), std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  std::unique_lock lock(mu_);
  return entries_.emplace(key, buf.str()).first->second;
}

void ResponseCache::Put(const std::string &key, const std::string &value) {
  std::unique_lock lock(mu_);
  entries_[key] = value;
  if (!directory_) return;
  auto final_path = *directory_ / (key + ".txt");
  auto tmp_path = *directory_ / (key + ".tmp");
  {
    std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
    out << value;
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + tmp_path.string());
  }
  std::filesystem::rename(tmp_path, final_path);
}

size_t ResponseCache::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

CachedChatClient::CachedChatClient(std::shared_ptr<ChatClient> inner,
                                   std::shared_ptr<ResponseCache> cache)
    : inner_(std::move(inner)), cache_(std::move(cache)) {}

std::string CachedChatClient::Complete(const ChatRequest &request) {
  std::string key = ResponseCache::Key(
      request.template_name, RenderMessages(request.messages), model_name());
  if (auto hit = cache_->Get(key)) {
    ++cache_hits_;
    return *hit;
  }
  ++upstream_calls_;
  std::string response = inner_->Complete(request);
  cache_->Put(key, response);
  return response;
}

std::string RenderMessages(const std::vector<ChatMessage> &messages) {
  std::string out;
  for (const ChatMessage &m : messages) {
    out += "<" + m.role + ">\n" + m.content + "\n";
  }
  return out;
}

}  // namespace mortar
