#include "mock_llm.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "error.hpp"
#include "prompts.hpp"
#include "text.hpp"

namespace mortar {

using nlohmann::json;

MockChatClient::MockChatClient(json fixtures) {
  if (fixtures.is_object() && fixtures.contains("responses")) {
    fixtures_ = fixtures["responses"];
  } else if (fixtures.is_array()) {
    fixtures_ = std::move(fixtures);
  } else if (!fixtures.is_null()) {
    throw Error(ErrorKind::kConfig, "mock fixtures must hold a 'responses' array");
  }
  source_ = "inline";
}

std::unique_ptr<MockChatClient> MockChatClient::FromFile(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open mock fixtures " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorKind::kParse, "mock fixtures are not JSON: " + path);
  auto client = std::make_unique<MockChatClient>(std::move(j));
  client->source_ = path;
  return client;
}

std::string MockChatClient::Describe() const { return "mock:" + source_; }

std::string MockChatClient::Complete(const ChatRequest &request) {
  ++calls_;
  std::string user;
  for (auto it = request.messages.rbegin(); it != request.messages.rend(); ++it) {
    if (it->role == "user") {
      user = it->content;
      break;
    }
  }
  // Repair requests are matched against the original prompt.
  if (request.payload.contains("repair")) {
    for (const ChatMessage &m : request.messages) {
      if (m.role == "user") {
        user = m.content;
        break;
      }
    }
  }
  for (const json &entry : fixtures_) {
    if (entry.value("template", "") != request.template_name) continue;
    bool match = true;
    for (const json &needle : entry.value("contains", json::array())) {
      match = match && user.find(needle.get<std::string>()) != std::string::npos;
    }
    if (!match) continue;
    if (request.payload.contains("repair") && entry.contains("repair_response")) {
      ++fixture_hits_;
      const json &r = entry["repair_response"];
      return r.is_string() ? r.get<std::string>() : r.dump();
    }
    ++fixture_hits_;
    const json &r = entry["response"];
    return r.is_string() ? r.get<std::string>() : r.dump();
  }
  return HeuristicReply(request).dump();
}

namespace {

const std::set<std::string> &NonEntityWords() {
  static const std::set<std::string> kWords = {
      "a", "an", "the", "what", "who", "whom", "whose", "which", "when", "where",
      "why", "how", "did", "does", "do", "is", "are", "was", "were", "he", "she",
      "it", "they", "his", "her", "its", "their", "him", "them", "i", "you", "we",
      "and", "but", "or", "in", "on", "at", "of", "to", "for", "yes", "no",
      "unknown", "this", "that", "these", "those", "there", "then", "round", "q"};
  return kWords;
}

// Runs of capitalized words, skipping function words.
std::vector<std::string> CapitalizedPhrases(const std::string &document) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  std::string current;
  auto flush = [&] {
    if (!current.empty() && seen.insert(text::Fold(current)).second) {
      out.push_back(current);
    }
    current.clear();
  };
  std::istringstream in(document);
  std::string raw;
  while (in >> raw) {
    std::string word;
    for (char c : raw) {
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '\'') {
        word.push_back(c);
      }
    }
    bool ends_clause = !raw.empty() && std::string(".,;:?!").find(raw.back()) != std::string::npos;
    bool cap = !word.empty() && std::isupper(static_cast<unsigned char>(word[0])) &&
               !NonEntityWords().count(text::Fold(word));
    if (cap) {
      if (!current.empty()) current.push_back(' ');
      current += word;
    } else {
      flush();
    }
    if (ends_clause) flush();
  }
  flush();
  return out;
}

// Third-person pronouns replaced by `phrase`; possessives get "'s".
std::string ReplacePronouns(const std::string &question, const std::string &phrase) {
  static const std::set<std::string> kPlain = {"he", "she", "it", "they", "him", "them"};
  static const std::set<std::string> kPossessive = {"his", "its", "their"};
  std::string out;
  size_t i = 0;
  while (i < question.size()) {
    if (!std::isalpha(static_cast<unsigned char>(question[i]))) {
      out.push_back(question[i++]);
      continue;
    }
    size_t j = i;
    while (j < question.size() && std::isalpha(static_cast<unsigned char>(question[j]))) ++j;
    std::string word = question.substr(i, j - i);
    std::string folded = text::Fold(word);
    if (kPlain.count(folded)) out += phrase;
    else if (kPossessive.count(folded)) out += phrase + "'s";
    else out += word;
    i = j;
  }
  return out;
}

json EmptyGraph() {
  return {{"entities", json::array()}, {"relations", json::array()}};
}

json MentionedEntities(const json &entities, const std::string &text_value) {
  json g = EmptyGraph();
  for (const json &e : entities) {
    std::vector<std::string> surfaces = {e.value("name", "")};
    for (const json &a : e.value("aliases", json::array())) surfaces.push_back(a.get<std::string>());
    for (const std::string &s : surfaces) {
      if (!s.empty() && text::ContainsPhrase(text_value, s)) {
        g["entities"].push_back({e.value("type", ""), e.value("name", "")});
        break;
      }
    }
  }
  return g;
}

}  // namespace

json HeuristicReply(const ChatRequest &request) {
  const json &p = request.payload;
  const std::string &name = request.template_name;
  if (name == fn::kDeclaratives) {
    json out = json::array();
    for (const json &r : p.at("rounds")) {
      std::string a = text::Trim(r.at("a").get<std::string>());
      std::string q = text::Trim(r.at("q").get<std::string>());
      out.push_back(q + " " + (a.empty() ? std::string("(no answer)") : a) + ".");
    }
    return {{"declaratives", out}};
  }
  if (name == fn::kDecontextualize) {
    json out = json::array();
    std::string last_phrase;
    for (const json &r : p.at("rounds")) {
      std::string q = r.at("q").get<std::string>();
      std::string a = r.at("a").get<std::string>();
      out.push_back({{"question", last_phrase.empty() ? q : ReplacePronouns(q, last_phrase)},
                     {"answer", a}});
      for (const std::string &phrase : CapitalizedPhrases(q + ". " + a + ".")) {
        last_phrase = phrase;
      }
    }
    return {{"rounds", out}};
  }
  if (name == fn::kTopic) {
    std::string doc = text::Trim(p.at("document").get<std::string>());
    size_t stop = doc.find_first_of(".?!");
    std::string first = doc.substr(0, std::min(stop == std::string::npos ? doc.size() : stop, size_t{200}));
    return {{"topic", first.empty() ? std::string("general") : first}};
  }
  if (name == fn::kEntityTypes) {
    return {{"entity_types", json::array({"Entity"})}};
  }
  if (name == fn::kGraph) {
    std::string type = "Entity";
    if (p.contains("entity_types") && !p["entity_types"].empty()) {
      type = p["entity_types"][0].get<std::string>();
    }
    json entities = json::array();
    for (const std::string &phrase : CapitalizedPhrases(p.at("document").get<std::string>())) {
      entities.push_back({{"name", phrase}, {"type", type}, {"description", ""}});
    }
    return {{"entities", entities}, {"relations", json::array()}};
  }
  if (name == fn::kRoundGraph) {
    json out = json::array();
    const json &entities = p.at("entities");
    for (const json &r : p.at("rounds")) {
      out.push_back({{"question", MentionedEntities(entities, r.at("question"))},
                     {"full_question", MentionedEntities(entities, r.at("full_question"))},
                     {"answer", MentionedEntities(entities, r.at("answer"))}});
    }
    return {{"rounds", out}};
  }
  if (name == fn::kCanonicalize) {
    std::string type = "Entity";
    if (p.contains("entity_types") && !p["entity_types"].empty()) {
      type = p["entity_types"][0].get<std::string>();
    }
    return {{"result", "new_entity"}, {"entities", json::array()}, {"type", type}};
  }
  throw Error(ErrorKind::kConfig, "mock has no rule for template '" + name + "'");
}

}  // namespace mortar
