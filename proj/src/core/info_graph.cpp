#include "info_graph.hpp"

#include <algorithm>

#include "error.hpp"
#include "text.hpp"

namespace mortar {

using nlohmann::json;

EntityKey EntityKey::Of(std::string_view type, std::string_view name) {
  return {text::CollapseFold(type), text::CollapseFold(name)};
}

std::string EntityKey::ToString() const { return type + ": " + name; }

RelationKey Relation::key() const {
  return {source, target, text::CollapseFold(description)};
}

void InfoGraph::AddEntity(const Entity &entity) {
  EntityKey key = entity.key();
  auto [it, inserted] = entities_.emplace(key, entity);
  if (inserted) return;
  Entity &existing = it->second;
  for (const std::string &a : entity.aliases) {
    if (text::CollapseFold(a) != key.name) existing.aliases.insert(a);
  }
  if (existing.description.empty()) existing.description = entity.description;
}

bool InfoGraph::AddRelation(const Relation &relation) {
  if (!Contains(relation.source) || !Contains(relation.target)) return false;
  relations_.emplace(relation.key(), relation);
  return true;
}

void InfoGraph::AddRelationUnchecked(const Relation &relation) {
  relations_.emplace(relation.key(), relation);
}

const Entity *InfoGraph::Find(const EntityKey &key) const {
  auto it = entities_.find(key);
  return it == entities_.end() ? nullptr : &it->second;
}

std::vector<EntityKey> InfoGraph::FindSurface(std::string_view surface) const {
  std::string folded = text::CollapseFold(surface);
  std::vector<EntityKey> out;
  for (const auto &[key, e] : entities_) {
    bool hit = key.name == folded;
    for (const std::string &a : e.aliases) {
      hit = hit || text::CollapseFold(a) == folded;
    }
    if (hit) out.push_back(key);
  }
  return out;
}

bool InfoGraph::ReferentiallyClosed() const {
  return std::all_of(relations_.begin(), relations_.end(), [&](const auto &kv) {
    return Contains(kv.second.source) && Contains(kv.second.target);
  });
}

namespace {

json EndpointJson(const InfoGraph &g, const EntityKey &key) {
  if (const Entity *e = g.Find(key)) return json::array({e->entity_type, e->name});
  return json::array({key.type, key.name});
}

}  // namespace

json InfoGraph::ToJson() const {
  json entities = json::array();
  for (const auto &[key, e] : entities_) {
    entities.push_back({{"name", e.name},
                        {"type", e.entity_type},
                        {"description", e.description},
                        {"aliases", e.aliases}});
  }
  json relations = json::array();
  for (const auto &[key, r] : relations_) {
    relations.push_back({{"source", EndpointJson(*this, r.source)},
                         {"target", EndpointJson(*this, r.target)},
                         {"description", r.description}});
  }
  return {{"entities", entities}, {"relations", relations}};
}

InfoGraph InfoGraph::FromJson(const json &j) {
  InfoGraph g;
  try {
    for (const json &e : j.at("entities")) {
      Entity entity;
      entity.name = e.at("name").get<std::string>();
      entity.entity_type = e.at("type").get<std::string>();
      entity.description = e.value("description", "");
      if (e.contains("aliases")) {
        entity.aliases = e["aliases"].get<std::set<std::string>>();
      }
      g.AddEntity(entity);
    }
    for (const json &r : j.value("relations", json::array())) {
      const json &s = r.at("source");
      const json &t = r.at("target");
      Relation rel{EntityKey::Of(s.at(0).get<std::string>(), s.at(1).get<std::string>()),
                   EntityKey::Of(t.at(0).get<std::string>(), t.at(1).get<std::string>()),
                   r.value("description", "")};
      if (!g.AddRelation(rel)) {
        throw Error(ErrorKind::kParse, "relation endpoint not in graph: " +
                                           rel.source.ToString() + " -> " +
                                           rel.target.ToString());
      }
    }
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kParse, std::string("graph: ") + e.what());
  }
  return g;
}

bool InfoGraph::operator==(const InfoGraph &other) const {
  if (entities_.size() != other.entities_.size() ||
      relations_.size() != other.relations_.size()) {
    return false;
  }
  for (const auto &[k, e] : entities_) {
    if (!other.Contains(k)) return false;
  }
  for (const auto &[k, r] : relations_) {
    if (!other.Contains(k)) return false;
  }
  return true;
}

std::vector<AliasCollision> FindAliasCollisions(const InfoGraph &graph) {
  std::map<std::string, EntityKey> owner;  // folded surface -> entity
  for (const auto &[key, e] : graph.entities()) owner.emplace(key.name, key);
  std::vector<AliasCollision> out;
  std::map<std::string, EntityKey> alias_owner;
  for (const auto &[key, e] : graph.entities()) {
    for (const std::string &a : e.aliases) {
      std::string f = text::CollapseFold(a);
      if (f == key.name) continue;
      auto it = owner.find(f);
      if (it != owner.end() && it->second != key) {
        out.push_back({f, it->second, key});
        continue;
      }
      auto [ait, fresh] = alias_owner.emplace(f, key);
      if (!fresh && ait->second != key) out.push_back({f, ait->second, key});
    }
  }
  return out;
}

InfoGraph GraphUnion(const InfoGraph &a, const InfoGraph &b,
                     std::vector<AliasCollision> *collisions) {
  InfoGraph out = a;
  for (const auto &[key, e] : b.entities()) out.AddEntity(e);
  for (const auto &[key, r] : b.relations()) out.AddRelationUnchecked(r);
  if (collisions != nullptr) *collisions = FindAliasCollisions(out);
  return out;
}

InfoGraph GraphDifference(const InfoGraph &full, const InfoGraph &partial) {
  InfoGraph out;
  for (const auto &[key, e] : full.entities()) {
    if (!partial.Contains(key)) out.AddEntity(e);
  }
  for (const auto &[key, r] : full.relations()) {
    if (!partial.Contains(key)) out.AddRelationUnchecked(r);
  }
  return out;
}

bool IsSubgraph(const InfoGraph &needle, const InfoGraph &haystack) {
  for (const auto &[key, e] : needle.entities()) {
    if (!haystack.Contains(key)) return false;
  }
  for (const auto &[key, r] : needle.relations()) {
    if (!haystack.Contains(key)) return false;
  }
  return true;
}

ContextAccumulator::ContextAccumulator(std::vector<InfoGraph> per_round_graphs)
    : per_round_(std::move(per_round_graphs)) {
  prefix_.reserve(per_round_.size() + 1);
  prefix_.emplace_back();
  for (const InfoGraph &g : per_round_) {
    prefix_.push_back(GraphUnion(prefix_.back(), g));
  }
}

const InfoGraph &ContextAccumulator::ContextBefore(int round) const {
  if (round < 1 || round > rounds() + 1) {
    throw Error(ErrorKind::kInternal,
                "context round out of range: " + std::to_string(round));
  }
  return prefix_[static_cast<size_t>(round - 1)];
}

InfoGraph ContextAccumulator::WindowBefore(int round, int window) const {
  InfoGraph out;
  for (int r = std::max(1, round - window); r < round; ++r) {
    out = GraphUnion(out, per_round_[static_cast<size_t>(r - 1)]);
  }
  return out;
}

const char *CanonicalKindName(CanonicalKind kind) {
  switch (kind) {
    case CanonicalKind::kAliasOf: return "alias_of";
    case CanonicalKind::kGroupOf: return "group_of";
    case CanonicalKind::kNewEntity: return "new_entity";
  }
  return "?";
}

CanonicalizationResult CanonicalizeEntity(const Entity &candidate,
                                          InfoGraph &graph,
                                          CanonicalizationClient &resolver) {
  EntityKey key = candidate.key();
  if (graph.Contains(key)) return {CanonicalKind::kAliasOf, {key}, {}};
  std::vector<EntityKey> surface = graph.FindSurface(candidate.name);
  if (surface.size() == 1) return {CanonicalKind::kAliasOf, surface, {}};

  std::vector<Entity> entities;
  std::set<std::string> type_set;
  for (const auto &[k, e] : graph.entities()) {
    entities.push_back(e);
    type_set.insert(e.entity_type);
  }
  if (!candidate.entity_type.empty()) type_set.insert(candidate.entity_type);
  std::vector<std::string> types(type_set.begin(), type_set.end());

  CanonicalizationResult result;
  try {
    result = resolver.Resolve(entities, types, candidate.name);
  } catch (const Error &e) {
    throw Error(ErrorKind::kMisaligned,
                "canonicalization of '" + candidate.name + "' failed: " + e.what());
  }

  switch (result.kind) {
    case CanonicalKind::kAliasOf: {
      if (result.keys.size() != 1 || !graph.Contains(result.keys[0])) {
        throw Error(ErrorKind::kMisaligned,
                    "canonicalization of '" + candidate.name +
                        "' returned an unknown alias target");
      }
      Entity &target = graph.mutable_entities().at(result.keys[0]);
      if (text::CollapseFold(candidate.name) != result.keys[0].name) {
        target.aliases.insert(candidate.name);
      }
      break;
    }
    case CanonicalKind::kGroupOf:
      if (result.keys.empty()) {
        throw Error(ErrorKind::kMisaligned, "empty group for '" + candidate.name + "'");
      }
      for (const EntityKey &k : result.keys) {
        if (!graph.Contains(k)) {
          throw Error(ErrorKind::kMisaligned,
                      "group member " + k.ToString() + " not in graph");
        }
      }
      break;
    case CanonicalKind::kNewEntity: {
      if (result.entity.name.empty()) result.entity.name = candidate.name;
      if (result.entity.entity_type.empty()) {
        result.entity.entity_type = candidate.entity_type;
      }
      if (result.entity.entity_type.empty()) {
        throw Error(ErrorKind::kMisaligned,
                    "no entity type for new entity '" + candidate.name + "'");
      }
      if (result.entity.description.empty()) {
        result.entity.description = candidate.description;
      }
      graph.AddEntity(result.entity);
      result.keys = {result.entity.key()};
      break;
    }
  }
  return result;
}

}  // namespace mortar
