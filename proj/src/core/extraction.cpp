#include "extraction.hpp"

#include <set>

#include "error.hpp"
#include "text.hpp"

namespace mortar {

using nlohmann::json;

namespace {

json GraphJsonOrEmpty(const json &j, const char *key) {
  auto it = j.find(key);
  return it == j.end() ? json{{"entities", json::array()}, {"relations", json::array()}}
                       : *it;
}

std::string DialogueText(const Dialogue &d) {
  std::string out;
  for (const QARound &r : d.rounds) {
    out += "Round " + std::to_string(r.index) + "\nQ: " + r.question +
           "\nA: " + r.gold_answer + "\n";
  }
  return out;
}

json DialoguePayload(const Dialogue &d) {
  json rounds = json::array();
  for (const QARound &r : d.rounds) {
    rounds.push_back({{"q", r.question}, {"a", r.gold_answer}});
  }
  return {{"dialogue_id", d.dialogue_id}, {"rounds", rounds}};
}

std::optional<std::string> CountIs(const json &arr, size_t n, const char *what) {
  if (arr.size() != n) {
    return std::string(what) + ": expected " + std::to_string(n) + " items, got " +
           std::to_string(arr.size());
  }
  return std::nullopt;
}

std::string EntityLines(const InfoGraph &g) {
  std::string out;
  for (const auto &[key, e] : g.entities()) {
    out += e.entity_type + ": " + e.name;
    if (!e.description.empty()) out += " (" + e.description + ")";
    out += "\n";
  }
  return out;
}

std::string EntityLines(const std::vector<Entity> &entities) {
  std::string out;
  for (const Entity &e : entities) out += e.entity_type + ": " + e.name + "\n";
  return out;
}

std::string RelationLines(const InfoGraph &g) {
  std::string out;
  for (const auto &[key, r] : g.relations()) {
    const Entity *s = g.Find(r.source);
    const Entity *t = g.Find(r.target);
    out += (s ? s->name : r.source.name) + " -> " + (t ? t->name : r.target.name) +
           ": " + r.description + "\n";
  }
  return out;
}

json EntityArray(const InfoGraph &g) {
  json out = json::array();
  for (const auto &[key, e] : g.entities()) {
    out.push_back({{"name", e.name}, {"type", e.entity_type}, {"aliases", e.aliases}});
  }
  return out;
}

}  // namespace

bool IsLowInformationAnswer(const std::string &answer) {
  std::string n = text::NormalizeAnswer(answer);
  return n.empty() || n == "unknown" || n == "no" || n == "yes" ||
         n == "none" || n == "not mentioned";
}

json DialogueExtraction::ToJson() const {
  json decon = json::array();
  for (const auto &r : decontextualized) {
    decon.push_back({{"question", r.question}, {"answer", r.answer}});
  }
  json rounds_json = json::array();
  for (const RoundGraphs &g : rounds) {
    rounds_json.push_back({{"question", g.question.ToJson()},
                           {"full_question", g.full.ToJson()},
                           {"answer", g.answer.ToJson()}});
  }
  return {{"dialogue_id", dialogue_id},
          {"declaratives", declaratives},
          {"decontextualized", decon},
          {"topic", topic},
          {"entity_types", entity_types},
          {"whole", whole.ToJson()},
          {"rounds", rounds_json},
          {"misaligned_rounds", misaligned_rounds},
          {"low_information_rounds", low_information_rounds},
          {"error", error}};
}

DialogueExtraction DialogueExtraction::FromJson(const json &j) {
  DialogueExtraction x;
  try {
    x.dialogue_id = j.at("dialogue_id").get<std::string>();
    x.declaratives = j.value("declaratives", std::vector<std::string>{});
    for (const json &r : j.value("decontextualized", json::array())) {
      x.decontextualized.push_back({r.at("question").get<std::string>(),
                                    r.at("answer").get<std::string>()});
    }
    x.topic = j.value("topic", "");
    x.entity_types = j.value("entity_types", std::vector<std::string>{});
    x.whole = InfoGraph::FromJson(GraphJsonOrEmpty(j, "whole"));
    for (const json &r : j.value("rounds", json::array())) {
      x.rounds.push_back({InfoGraph::FromJson(GraphJsonOrEmpty(r, "question")),
                          InfoGraph::FromJson(GraphJsonOrEmpty(r, "full_question")),
                          InfoGraph::FromJson(GraphJsonOrEmpty(r, "answer"))});
    }
    x.misaligned_rounds = j.value("misaligned_rounds", std::vector<int>{});
    x.low_information_rounds = j.value("low_information_rounds", std::vector<int>{});
    x.error = j.value("error", "");
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kParse, std::string("extraction record: ") + e.what());
  }
  return x;
}

std::optional<json> ParseJsonReply(const std::string &reply, std::string *error) {
  std::string body = text::Trim(reply);
  if (body.rfind("```", 0) == 0) {
    size_t nl = body.find('\n');
    size_t close = body.rfind("```");
    if (nl != std::string::npos && close != std::string::npos && close > nl) {
      body = body.substr(nl + 1, close - nl - 1);
    }
  }
  json parsed = json::parse(body, nullptr, false);
  if (parsed.is_discarded()) {
    size_t b = body.find('{');
    size_t e = body.rfind('}');
    if (b != std::string::npos && e != std::string::npos && e > b) {
      parsed = json::parse(body.substr(b, e - b + 1), nullptr, false);
    }
  }
  if (parsed.is_discarded()) {
    if (error) *error = "reply is not valid JSON";
    return std::nullopt;
  }
  return parsed;
}

ExtractionPipeline::ExtractionPipeline(ChatClient &client,
                                       const TemplateSet &templates)
    : client_(client), templates_(templates) {}

json ExtractionPipeline::Call(const std::string &name,
                              const std::map<std::string, std::string> &bindings,
                              json payload, const Check &check) {
  const PromptTemplate &t = templates_.Get(name);
  ChatRequest req;
  req.template_name = name;
  req.messages = {{"system", t.system}, {"user", RenderTemplate(t.body, bindings)}};
  req.payload = std::move(payload);

  std::string error;
  for (int attempt = 0; attempt < 2; ++attempt) {
    if (attempt == 1) {
      ++repairs_;
      req.payload["repair"] = error;
    }
    std::string reply = client_.Complete(req);
    std::optional<json> parsed = ParseJsonReply(reply, &error);
    if (parsed) {
      std::optional<std::string> err = ValidateSchema(*parsed, t.output_schema);
      if (!err && check) err = check(*parsed);
      if (!err) return *parsed;
      error = *err;
    }
    req.messages.push_back({"assistant", reply});
    req.messages.push_back(
        {"user", "Your reply was rejected: " + error +
                     ". Reply again with corrected JSON only."});
  }
  throw Error(ErrorKind::kMisaligned, name + ": " + error);
}

std::vector<std::string> ExtractionPipeline::ExtractDeclaratives(
    const Dialogue &dialogue) {
  size_t n = dialogue.rounds.size();
  json out = Call(fn::kDeclaratives,
                  {{"dialogue", DialogueText(dialogue)},
                   {"round_count", std::to_string(n)}},
                  DialoguePayload(dialogue), [n](const json &j) {
                    return CountIs(j["declaratives"], n, "declaratives");
                  });
  return out["declaratives"].get<std::vector<std::string>>();
}

std::vector<DecontextualizedRound> ExtractionPipeline::Decontextualize(
    const Dialogue &dialogue) {
  size_t n = dialogue.rounds.size();
  json out = Call(fn::kDecontextualize,
                  {{"dialogue", DialogueText(dialogue)},
                   {"round_count", std::to_string(n)}},
                  DialoguePayload(dialogue),
                  [n](const json &j) { return CountIs(j["rounds"], n, "rounds"); });
  std::vector<DecontextualizedRound> rounds;
  for (const json &r : out["rounds"]) {
    rounds.push_back({r["question"].get<std::string>(), r["answer"].get<std::string>()});
  }
  return rounds;
}

std::string ExtractionPipeline::ExtractTopic(const std::string &document) {
  if (text::Trim(document).empty()) {
    throw Error(ErrorKind::kValidation, "topic extraction needs a non-empty document");
  }
  json out = Call(fn::kTopic, {{"document", document}}, {{"document", document}}, {});
  return out["topic"].get<std::string>();
}

std::vector<std::string> ExtractionPipeline::ExtractEntityTypes(
    const std::vector<std::string> &declaratives, const std::string &topic) {
  if (declaratives.empty()) {
    throw Error(ErrorKind::kValidation, "entity type extraction needs declaratives");
  }
  std::string listing;
  for (size_t i = 0; i < declaratives.size(); ++i) {
    listing += std::to_string(i + 1) + ". " + declaratives[i] + "\n";
  }
  json out = Call(fn::kEntityTypes, {{"topic", topic}, {"declaratives", listing}},
                  {{"topic", topic}, {"declaratives", declaratives}}, {});
  std::vector<std::string> types;
  std::set<std::string> seen;
  for (const json &t : out["entity_types"]) {
    std::string s = text::Trim(t.get<std::string>());
    if (!s.empty() && seen.insert(text::CollapseFold(s)).second) types.push_back(s);
  }
  return types;
}

InfoGraph ExtractionPipeline::ExtractGraph(
    const std::string &topic, const std::string &document,
    const std::vector<std::string> &entity_types) {
  json out = Call(fn::kGraph,
                  {{"topic", topic},
                   {"document", document},
                   {"entity_types", text::Join(entity_types, ", ")}},
                  {{"topic", topic}, {"document", document}, {"entity_types", entity_types}},
                  {});
  std::set<std::string> allowed;
  for (const std::string &t : entity_types) allowed.insert(text::CollapseFold(t));

  InfoGraph graph;
  std::vector<Entity> off_list;
  for (const json &e : out["entities"]) {
    Entity entity{e["name"].get<std::string>(), e["type"].get<std::string>(),
                  e.value("description", ""), {}};
    if (allowed.count(text::CollapseFold(entity.entity_type))) {
      graph.AddEntity(entity);
    } else {
      off_list.push_back(std::move(entity));
    }
  }
  LlmCanonicalizer canon(*this);
  for (const Entity &e : off_list) CanonicalizeEntity(e, graph, canon);

  for (const json &r : out["relations"]) {
    std::vector<EntityKey> sources = ResolveRef(graph, "", r["source"].get<std::string>());
    std::vector<EntityKey> targets = ResolveRef(graph, "", r["target"].get<std::string>());
    std::string desc = r.value("description", "");
    for (const EntityKey &s : sources) {
      for (const EntityKey &t : targets) graph.AddRelation({s, t, desc});
    }
  }
  return graph;
}

std::vector<EntityKey> ExtractionPipeline::ResolveRef(InfoGraph &whole,
                                                      const std::string &type,
                                                      const std::string &name) {
  if (!type.empty()) {
    EntityKey key = EntityKey::Of(type, name);
    if (whole.Contains(key)) return {key};
  }
  std::vector<EntityKey> surface = whole.FindSurface(name);
  if (surface.size() == 1) return surface;
  if (!type.empty()) {
    for (const EntityKey &k : surface) {
      if (k.type == text::CollapseFold(type)) return {k};
    }
  }
  LlmCanonicalizer canon(*this);
  CanonicalizationResult res = CanonicalizeEntity(Entity{name, type, "", {}}, whole, canon);
  return res.keys;
}

std::vector<RoundGraphs> ExtractionPipeline::ExtractRoundGraphs(
    InfoGraph &whole, const Dialogue &dialogue,
    const std::vector<DecontextualizedRound> &decontextualized,
    std::vector<int> *misaligned) {
  size_t n = dialogue.rounds.size();
  if (decontextualized.size() != n) {
    throw Error(ErrorKind::kMisaligned, "decontextualized rounds do not match dialogue");
  }
  std::string listing;
  json rounds_payload = json::array();
  for (size_t i = 0; i < n; ++i) {
    const QARound &r = dialogue.rounds[i];
    listing += "Round " + std::to_string(r.index) + "\nOriginal question: " +
               r.question + "\nFull question: " + decontextualized[i].question +
               "\nAnswer: " + decontextualized[i].answer + "\n";
    rounds_payload.push_back({{"question", r.question},
                              {"full_question", decontextualized[i].question},
                              {"answer", decontextualized[i].answer}});
  }
  json out = Call(fn::kRoundGraph,
                  {{"entities", EntityLines(whole)},
                   {"relations", RelationLines(whole)},
                   {"rounds", listing},
                   {"round_count", std::to_string(n)}},
                  {{"entities", EntityArray(whole)}, {"rounds", rounds_payload}},
                  [n](const json &j) { return CountIs(j["rounds"], n, "rounds"); });

  auto build = [&](const json &part) {
    InfoGraph g;
    for (const json &ref : part["entities"]) {
      for (const EntityKey &k :
           ResolveRef(whole, ref[0].get<std::string>(), ref[1].get<std::string>())) {
        g.AddEntity(*whole.Find(k));
      }
    }
    for (const json &rel : part["relations"]) {
      auto sources = ResolveRef(whole, rel["source"][0].get<std::string>(),
                                rel["source"][1].get<std::string>());
      auto targets = ResolveRef(whole, rel["target"][0].get<std::string>(),
                                rel["target"][1].get<std::string>());
      for (const EntityKey &s : sources) {
        for (const EntityKey &t : targets) {
          Relation relation{s, t, rel["description"].get<std::string>()};
          whole.AddRelation(relation);
          g.AddEntity(*whole.Find(s));
          g.AddEntity(*whole.Find(t));
          g.AddRelation(relation);
        }
      }
    }
    return g;
  };

  std::vector<RoundGraphs> rounds;
  for (size_t i = 0; i < n; ++i) {
    const json &item = out["rounds"][i];
    RoundGraphs g{build(item["question"]), build(item["full_question"]),
                  build(item["answer"])};
    if (!IsSubgraph(g.question, g.full) && misaligned != nullptr) {
      misaligned->push_back(dialogue.rounds[i].index);
    }
    rounds.push_back(std::move(g));
  }
  return rounds;
}

CanonicalizationResult ExtractionPipeline::CallCanonicalization(
    const std::vector<Entity> &entities,
    const std::vector<std::string> &entity_types, const std::string &target) {
  json known = json::array();
  for (const Entity &e : entities) known.push_back({e.entity_type, e.name});
  json out = Call(
      fn::kCanonicalize,
      {{"entities", EntityLines(entities)},
       {"entity_types", text::Join(entity_types, ", ")},
       {"target", target}},
      {{"entities", known}, {"entity_types", entity_types}, {"target", target}},
      [](const json &j) -> std::optional<std::string> {
        std::string r = j["result"].get<std::string>();
        size_t count = j.contains("entities") ? j["entities"].size() : 0;
        if (r == "alias_of" && count != 1) return "alias_of needs exactly one entity";
        if (r == "group_of" && count < 1) return "group_of needs member entities";
        if (r == "new_entity" && j.value("type", "").empty()) return "new_entity needs a type";
        return std::nullopt;
      });
  CanonicalizationResult res;
  std::string r = out["result"].get<std::string>();
  if (r == "new_entity") {
    res.kind = CanonicalKind::kNewEntity;
    res.entity = Entity{target, out["type"].get<std::string>(), "", {}};
    return res;
  }
  res.kind = r == "alias_of" ? CanonicalKind::kAliasOf : CanonicalKind::kGroupOf;
  for (const json &ref : out["entities"]) {
    res.keys.push_back(EntityKey::Of(ref[0].get<std::string>(), ref[1].get<std::string>()));
  }
  return res;
}

DialogueExtraction ExtractionPipeline::Run(const Dialogue &dialogue) {
  DialogueExtraction x;
  x.dialogue_id = dialogue.dialogue_id;
  for (const QARound &r : dialogue.rounds) {
    if (IsLowInformationAnswer(r.gold_answer)) x.low_information_rounds.push_back(r.index);
  }
  try {
    x.declaratives = ExtractDeclaratives(dialogue);
    x.decontextualized = Decontextualize(dialogue);
    std::string document = text::Join(x.declaratives, " ");
    x.topic = ExtractTopic(document);
    x.entity_types = ExtractEntityTypes(x.declaratives, x.topic);
    x.whole = ExtractGraph(x.topic, document, x.entity_types);
    x.rounds = ExtractRoundGraphs(x.whole, dialogue, x.decontextualized,
                                  &x.misaligned_rounds);
  } catch (const Error &e) {
    if (e.kind() != ErrorKind::kMisaligned && e.kind() != ErrorKind::kValidation) throw;
    x.error = e.what();
  }
  return x;
}

}  // namespace mortar
