#include "coref.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "error.hpp"
#include "http.hpp"
#include "json.hpp"
#include "text.hpp"

namespace mortar {

using nlohmann::json;

std::optional<PronounClass> ClassifyPronoun(std::string_view word) {
  static const std::map<std::string, PronounClass, std::less<>> kPronouns = {
      {"he", PronounClass::kPerson},      {"him", PronounClass::kPerson},
      {"his", PronounClass::kPerson},     {"himself", PronounClass::kPerson},
      {"she", PronounClass::kPerson},     {"her", PronounClass::kPerson},
      {"hers", PronounClass::kPerson},    {"herself", PronounClass::kPerson},
      {"it", PronounClass::kNeuter},      {"its", PronounClass::kNeuter},
      {"itself", PronounClass::kNeuter},  {"they", PronounClass::kPlural},
      {"them", PronounClass::kPlural},    {"their", PronounClass::kPlural},
      {"theirs", PronounClass::kPlural},  {"themselves", PronounClass::kPlural}};
  auto it = kPronouns.find(text::Fold(word));
  if (it == kPronouns.end()) return std::nullopt;
  return it->second;
}

bool PronounCompatible(PronounClass c, std::string_view entity_type) {
  static const char *kPersonTypes[] = {"person", "people", "character", "human",
                                       "man", "woman", "individual", "author",
                                       "emperor", "king", "queen"};
  std::string t = text::CollapseFold(entity_type);
  bool person = std::any_of(std::begin(kPersonTypes), std::end(kPersonTypes),
                            [&](const char *p) { return t.find(p) != std::string::npos; });
  switch (c) {
    case PronounClass::kPerson: return person;
    case PronounClass::kNeuter: return !person;
    case PronounClass::kPlural: return true;
  }
  return false;
}

std::vector<Mention> FindPronouns(std::string_view sentence) {
  std::vector<Mention> out;
  size_t i = 0;
  while (i < sentence.size()) {
    while (i < sentence.size() && !std::isalpha(static_cast<unsigned char>(sentence[i]))) ++i;
    size_t start = i;
    while (i < sentence.size() && (std::isalpha(static_cast<unsigned char>(sentence[i])) ||
                                   sentence[i] == '\'')) {
      ++i;
    }
    if (i > start) {
      std::string_view word = sentence.substr(start, i - start);
      if (ClassifyPronoun(word)) out.push_back({std::string(word), start, i});
    }
  }
  return out;
}

namespace {

struct EntityMention {
  size_t start;
  size_t end;
  const Entity *entity;
};

// Word-boundary, case-insensitive occurrences of every surface form.
std::vector<EntityMention> FindEntityMentions(std::string_view text_value,
                                              const InfoGraph &known) {
  std::string folded = text::Fold(text_value);
  auto is_word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
  std::vector<EntityMention> out;
  for (const auto &[key, e] : known.entities()) {
    std::vector<std::string> surfaces = {e.name};
    surfaces.insert(surfaces.end(), e.aliases.begin(), e.aliases.end());
    for (const std::string &s : surfaces) {
      std::string needle = text::Fold(s);
      if (needle.empty()) continue;
      for (size_t pos = folded.find(needle); pos != std::string::npos;
           pos = folded.find(needle, pos + 1)) {
        size_t end = pos + needle.size();
        bool left = pos == 0 || !is_word(folded[pos - 1]);
        bool right = end == folded.size() || !is_word(folded[end]);
        if (left && right) out.push_back({pos, end, &e});
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const EntityMention &a, const EntityMention &b) { return a.start < b.start; });
  return out;
}

}  // namespace

CorefResult HeuristicCoref::Resolve(std::string_view text_value, std::string_view focus,
                                    const InfoGraph &known) {
  CorefResult result;
  result.low_confidence = true;
  std::vector<EntityMention> mentions = FindEntityMentions(text_value, known);

  // Chains: one per mentioned entity, pronouns attached to the latest
  // compatible mention before them.
  std::map<EntityKey, std::vector<Mention>> chains;
  for (const EntityMention &m : mentions) {
    chains[m.entity->key()].push_back(
        {std::string(text_value.substr(m.start, m.end - m.start)), m.start, m.end});
  }
  for (const Mention &p : FindPronouns(text_value)) {
    PronounClass c = *ClassifyPronoun(p.text);
    const Entity *antecedent = nullptr;
    for (const EntityMention &m : mentions) {
      if (m.end > p.start) break;
      if (PronounCompatible(c, m.entity->entity_type)) antecedent = m.entity;
    }
    if (antecedent != nullptr) chains[antecedent->key()].push_back(p);
  }
  for (auto &[key, chain] : chains) {
    if (chain.size() < 2) continue;
    std::sort(chain.begin(), chain.end(),
              [](const Mention &a, const Mention &b) { return a.start < b.start; });
    result.chains.push_back(chain);
  }

  for (const Mention &p : FindPronouns(focus)) {
    PronounClass c = *ClassifyPronoun(p.text);
    bool resolved = std::any_of(mentions.begin(), mentions.end(), [&](const EntityMention &m) {
      return PronounCompatible(c, m.entity->entity_type);
    });
    result.focus.push_back({p, resolved});
  }
  return result;
}

HttpCoref::HttpCoref(std::string endpoint, double timeout_seconds)
    : endpoint_(std::move(endpoint)), timeout_seconds_(timeout_seconds) {}

CorefResult HttpCoref::Resolve(std::string_view text_value, std::string_view focus,
                               const InfoGraph &known) {
  try {
    json body = {{"text", text_value}, {"focus", focus}};
    HttpResponse res = HttpPostJson(endpoint_, "/coref", body.dump(), {}, timeout_seconds_);
    if (res.status != 200) {
      throw Error(ErrorKind::kTransport, "coref HTTP " + std::to_string(res.status));
    }
    json j = json::parse(res.body);
    CorefResult result;
    for (const json &chain : j.at("chains")) {
      std::vector<Mention> c;
      for (const json &m : chain) {
        c.push_back({m.at("text").get<std::string>(), m.at("start").get<size_t>(),
                     m.at("end").get<size_t>()});
      }
      result.chains.push_back(std::move(c));
    }
    for (const json &m : j.value("focus_mentions", json::array())) {
      result.focus.push_back({{m.at("text").get<std::string>(), m.at("start").get<size_t>(),
                               m.at("end").get<size_t>()},
                              m.at("resolved").get<bool>()});
    }
    return result;
  } catch (const std::exception &) {
    ++fallbacks_;
    return fallback_.Resolve(text_value, focus, known);
  }
}

}  // namespace mortar
