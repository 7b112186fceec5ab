#include "prompts.hpp"

#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "error.hpp"
#include "text.hpp"

namespace mortar {

using nlohmann::json;

const std::vector<std::string> &PipelineFunctionNames() {
  static const std::vector<std::string> kNames = {
      fn::kDeclaratives, fn::kDecontextualize, fn::kTopic, fn::kEntityTypes,
      fn::kGraph,        fn::kRoundGraph,      fn::kCanonicalize};
  return kNames;
}

namespace {

const std::regex &PlaceholderPattern() {
  static const std::regex kPattern(R"(\{([a-z_][a-z0-9_]*)\})");
  return kPattern;
}

const char *kSystem =
    "You are an information extraction component. Reply with a single JSON "
    "value that matches the requested shape. Do not add commentary.";

json StringArray(int min_items = 0) {
  json s = {{"type", "array"}, {"items", {{"type", "string"}, {"minLength", 1}}}};
  if (min_items > 0) s["minItems"] = min_items;
  return s;
}

json EntityRefArray() {
  return {{"type", "array"},
          {"items",
           {{"type", "array"},
            {"items", {{"type", "string"}}},
            {"minItems", 2},
            {"maxItems", 2}}}};
}

json RoundPartSchema() {
  return {{"type", "object"},
          {"required", {"entities", "relations"}},
          {"properties",
           {{"entities", EntityRefArray()},
            {"relations",
             {{"type", "array"},
              {"items",
               {{"type", "object"},
                {"required", {"source", "target", "description"}},
                {"properties",
                 {{"source", {{"type", "array"}, {"minItems", 2}, {"maxItems", 2}}},
                  {"target", {{"type", "array"}, {"minItems", 2}, {"maxItems", 2}}},
                  {"description", {{"type", "string"}}}}}}}}}}}};
}

std::map<std::string, PromptTemplate> BuiltinTemplates() {
  std::map<std::string, PromptTemplate> t;
  t[fn::kDeclaratives] = {
      fn::kDeclaratives, kSystem,
      "Rewrite every question/answer round of the dialogue below as one "
      "declarative sentence that states the answer as a fact. Resolve pronouns "
      "where the dialogue makes the referent clear. Return exactly "
      "{round_count} sentences, one per round, in round order.\n\n"
      "Dialogue:\n{dialogue}\n\n"
      "Reply as JSON: {\"declaratives\": [\"...\"]}",
      {{"type", "object"},
       {"required", {"declaratives"}},
       {"properties", {{"declaratives", StringArray(1)}}}}};
  t[fn::kDecontextualize] = {
      fn::kDecontextualize, kSystem,
      "For every round of the dialogue below, rewrite the question and the "
      "answer so that each can be understood without the rest of the "
      "dialogue: replace pronouns and ellipses with the entities they refer "
      "to. A question that is already self-contained must be returned "
      "unchanged. Return exactly {round_count} items in round order.\n\n"
      "Dialogue:\n{dialogue}\n\n"
      "Reply as JSON: {\"rounds\": [{\"question\": \"...\", \"answer\": \"...\"}]}",
      {{"type", "object"},
       {"required", {"rounds"}},
       {"properties",
        {{"rounds",
          {{"type", "array"},
           {"minItems", 1},
           {"items",
            {{"type", "object"},
             {"required", {"question", "answer"}},
             {"properties",
              {{"question", {{"type", "string"}, {"minLength", 1}}},
               {"answer", {{"type", "string"}}}}}}}}}}}}};
  t[fn::kTopic] = {
      fn::kTopic, kSystem,
      "State the topic of the following document in one sentence.\n\n"
      "Document:\n{document}\n\n"
      "Reply as JSON: {\"topic\": \"...\"}",
      {{"type", "object"},
       {"required", {"topic"}},
       {"properties", {{"topic", {{"type", "string"}, {"minLength", 1}}}}}}};
  t[fn::kEntityTypes] = {
      fn::kEntityTypes, kSystem,
      "Topic: {topic}\n\nList the entity types (short singular nouns such as "
      "Person, Country, Plant) needed to describe every entity mentioned in "
      "these sentences:\n{declaratives}\n\n"
      "Reply as JSON: {\"entity_types\": [\"...\"]}",
      {{"type", "object"},
       {"required", {"entity_types"}},
       {"properties", {{"entity_types", StringArray(1)}}}}};
  t[fn::kGraph] = {
      fn::kGraph, kSystem,
      "Topic: {topic}\nEntity types: {entity_types}\n\n"
      "Extract every entity of the listed types from the document, and every "
      "relation between two extracted entities. Give each entity and each "
      "relation a short description. Relations name their source and target "
      "entities by entity name.\n\nDocument:\n{document}\n\n"
      "Reply as JSON: {\"entities\": [{\"name\": \"...\", \"type\": \"...\", "
      "\"description\": \"...\"}], \"relations\": [{\"source\": \"...\", "
      "\"target\": \"...\", \"description\": \"...\"}]}",
      {{"type", "object"},
       {"required", {"entities", "relations"}},
       {"properties",
        {{"entities",
          {{"type", "array"},
           {"items",
            {{"type", "object"},
             {"required", {"name", "type"}},
             {"properties",
              {{"name", {{"type", "string"}, {"minLength", 1}}},
               {"type", {{"type", "string"}, {"minLength", 1}}},
               {"description", {{"type", "string"}}}}}}}}},
         {"relations",
          {{"type", "array"},
           {"items",
            {{"type", "object"},
             {"required", {"source", "target"}},
             {"properties",
              {{"source", {{"type", "string"}, {"minLength", 1}}},
               {"target", {{"type", "string"}, {"minLength", 1}}},
               {"description", {{"type", "string"}}}}}}}}}}}}};
  t[fn::kRoundGraph] = {
      fn::kRoundGraph, kSystem,
      "Entities (type: name):\n{entities}\n\nRelations:\n{relations}\n\n"
      "For each round below choose, from the lists above only, the entities "
      "and relations that are explicitly mentioned in (a) the original "
      "question, (b) the full question, and (c) the answer. Pronouns do not "
      "count as mentions in the original question. Return exactly "
      "{round_count} items in round order.\n\nRounds:\n{rounds}\n\n"
      "Reply as JSON: {\"rounds\": [{\"question\": G, \"full_question\": G, "
      "\"answer\": G}]} where G is {\"entities\": [[type, name]], "
      "\"relations\": [{\"source\": [type, name], \"target\": [type, name], "
      "\"description\": \"...\"}]}",
      {{"type", "object"},
       {"required", {"rounds"}},
       {"properties",
        {{"rounds",
          {{"type", "array"},
           {"minItems", 1},
           {"items",
            {{"type", "object"},
             {"required", {"question", "full_question", "answer"}},
             {"properties",
              {{"question", RoundPartSchema()},
               {"full_question", RoundPartSchema()},
               {"answer", RoundPartSchema()}}}}}}}}}}};
  t[fn::kCanonicalize] = {
      fn::kCanonicalize, kSystem,
      "Known entities (type: name):\n{entities}\n\nKnown entity types: "
      "{entity_types}\n\nTarget entity: {target}\n\n"
      "Decide whether the target is another name for one known entity "
      "(alias_of), a group made of several known entities (group_of), or a "
      "new entity (new_entity). For new_entity give the most likely entity "
      "type.\n\nReply as JSON: {\"result\": \"alias_of\"|\"group_of\"|"
      "\"new_entity\", \"entities\": [[type, name]], \"type\": \"...\"}",
      {{"type", "object"},
       {"required", {"result"}},
       {"properties",
        {{"result",
          {{"type", "string"}, {"enum", {"alias_of", "group_of", "new_entity"}}}},
         {"entities", EntityRefArray()},
         {"type", {{"type", "string"}}}}}}};
  return t;
}

bool TypeMatches(const json &value, const std::string &type) {
  if (type == "object") return value.is_object();
  if (type == "array") return value.is_array();
  if (type == "string") return value.is_string();
  if (type == "integer") return value.is_number_integer();
  if (type == "number") return value.is_number();
  if (type == "boolean") return value.is_boolean();
  if (type == "null") return value.is_null();
  return false;
}

std::optional<std::string> Validate(const json &value, const json &schema,
                                    const std::string &path) {
  if (auto t = schema.find("type"); t != schema.end()) {
    if (!TypeMatches(value, t->get<std::string>())) {
      return path + ": expected " + t->get<std::string>();
    }
  }
  if (auto e = schema.find("enum"); e != schema.end()) {
    bool found = false;
    for (const json &allowed : *e) found = found || allowed == value;
    if (!found) return path + ": value not in " + e->dump();
  }
  if (value.is_string()) {
    if (auto m = schema.find("minLength"); m != schema.end() &&
        value.get_ref<const std::string &>().size() < m->get<size_t>()) {
      return path + ": string too short";
    }
  }
  if (value.is_object()) {
    if (auto req = schema.find("required"); req != schema.end()) {
      for (const json &k : *req) {
        if (!value.contains(k.get<std::string>())) {
          return path + ": missing key '" + k.get<std::string>() + "'";
        }
      }
    }
    if (auto props = schema.find("properties"); props != schema.end()) {
      for (const auto &[k, sub] : props->items()) {
        if (value.contains(k)) {
          if (auto err = Validate(value[k], sub, path + "." + k)) return err;
        }
      }
    }
  }
  if (value.is_array()) {
    if (auto m = schema.find("minItems"); m != schema.end() &&
        value.size() < m->get<size_t>()) {
      return path + ": expected at least " + std::to_string(m->get<size_t>()) +
             " items";
    }
    if (auto m = schema.find("maxItems"); m != schema.end() &&
        value.size() > m->get<size_t>()) {
      return path + ": expected at most " + std::to_string(m->get<size_t>()) +
             " items";
    }
    if (auto items = schema.find("items"); items != schema.end()) {
      for (size_t i = 0; i < value.size(); ++i) {
        if (auto err = Validate(value[i], *items,
                                path + "[" + std::to_string(i) + "]")) {
          return err;
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::vector<std::string> Placeholders(const std::string &body) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (auto it = std::sregex_iterator(body.begin(), body.end(), PlaceholderPattern());
       it != std::sregex_iterator(); ++it) {
    std::string name = (*it)[1].str();
    if (seen.insert(name).second) out.push_back(name);
  }
  return out;
}

std::string RenderTemplate(const std::string &body,
                           const std::map<std::string, std::string> &bindings) {
  std::string out;
  auto begin = std::sregex_iterator(body.begin(), body.end(), PlaceholderPattern());
  size_t last = 0;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    const std::smatch &m = *it;
    auto b = bindings.find(m[1].str());
    if (b == bindings.end()) {
      throw Error(ErrorKind::kConfig,
                  "unbound template placeholder {" + m[1].str() + "}");
    }
    out.append(body, last, static_cast<size_t>(m.position(0)) - last);
    out.append(b->second);
    last = static_cast<size_t>(m.position(0) + m.length(0));
  }
  out.append(body, last, std::string::npos);
  return out;
}

std::optional<std::string> ValidateSchema(const json &value, const json &schema) {
  return Validate(value, schema, "$");
}

TemplateSet TemplateSet::Defaults() {
  TemplateSet set;
  set.templates_ = BuiltinTemplates();
  return set;
}

TemplateSet TemplateSet::LoadDirectory(const std::string &directory) {
  TemplateSet set = Defaults();
  if (!std::filesystem::is_directory(directory)) {
    throw Error(ErrorKind::kConfig, "template directory not found: " + directory);
  }
  for (auto &[name, tmpl] : set.templates_) {
    std::filesystem::path p = std::filesystem::path(directory) / (name + ".txt");
    if (!std::filesystem::exists(p)) continue;
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::set<std::string> before;
    for (const std::string &ph : Placeholders(tmpl.body)) before.insert(ph);
    for (const std::string &ph : Placeholders(buf.str())) {
      if (!before.count(ph)) {
        throw Error(ErrorKind::kConfig, p.string() + ": unknown placeholder {" +
                                            ph + "}");
      }
    }
    tmpl.body = buf.str();
  }
  return set;
}

const PromptTemplate &TemplateSet::Get(const std::string &name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) {
    throw Error(ErrorKind::kConfig, "no prompt template named " + name);
  }
  return it->second;
}

std::string TemplateSet::Version() const {
  std::string all;
  for (const auto &[name, t] : templates_) all += name + "\n" + t.system + "\n" + t.body + "\n";
  return text::Sha256Hex(all).substr(0, 12);
}

}  // namespace mortar
