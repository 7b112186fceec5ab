#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace mortar {

// Identity of an entity: case-folded, whitespace-collapsed (type, name).
struct EntityKey {
  std::string type;
  std::string name;

  static EntityKey Of(std::string_view type, std::string_view name);
  std::string ToString() const;  // "type: name"

  auto operator<=>(const EntityKey &) const = default;
};

struct Entity {
  std::string name;
  std::string entity_type;
  std::string description;
  std::set<std::string> aliases;  // surface forms other than `name`

  EntityKey key() const { return EntityKey::Of(entity_type, name); }
};

// Directed; identity is (source, target, folded description).
struct RelationKey {
  EntityKey source;
  EntityKey target;
  std::string description;

  auto operator<=>(const RelationKey &) const = default;
};

struct Relation {
  EntityKey source;
  EntityKey target;
  std::string description;

  RelationKey key() const;
};

class InfoGraph {
 public:
  // Adds or merges by identity key; merging unions the alias sets and keeps
  // the first non-empty description.
  void AddEntity(const Entity &entity);

  // Returns false (and adds nothing) if an endpoint is not in the graph.
  bool AddRelation(const Relation &relation);

  // Adds a relation without checking endpoints. Only difference results may
  // hold such dangling relations.
  void AddRelationUnchecked(const Relation &relation);

  bool Contains(const EntityKey &key) const { return entities_.count(key) > 0; }
  bool Contains(const RelationKey &key) const { return relations_.count(key) > 0; }
  const Entity *Find(const EntityKey &key) const;

  // Entities whose name or alias matches `surface` after folding.
  std::vector<EntityKey> FindSurface(std::string_view surface) const;

  const std::map<EntityKey, Entity> &entities() const { return entities_; }
  const std::map<RelationKey, Relation> &relations() const { return relations_; }
  std::map<EntityKey, Entity> &mutable_entities() { return entities_; }

  bool empty() const { return entities_.empty() && relations_.empty(); }
  size_t size() const { return entities_.size() + relations_.size(); }

  // Every relation endpoint is an entity of this graph.
  bool ReferentiallyClosed() const;

  nlohmann::json ToJson() const;
  static InfoGraph FromJson(const nlohmann::json &j);

  bool operator==(const InfoGraph &other) const;

 private:
  std::map<EntityKey, Entity> entities_;
  std::map<RelationKey, Relation> relations_;
};

// Two distinct entities claim the same folded surface form as an alias.
struct AliasCollision {
  std::string surface;
  EntityKey first;
  EntityKey second;
};

std::vector<AliasCollision> FindAliasCollisions(const InfoGraph &graph);

// Identity-keyed union. Collisions are reported, never thrown.
InfoGraph GraphUnion(const InfoGraph &a, const InfoGraph &b,
                     std::vector<AliasCollision> *collisions = nullptr);

// Entities and relations of `full` whose keys are absent from `partial`.
InfoGraph GraphDifference(const InfoGraph &full, const InfoGraph &partial);

bool IsSubgraph(const InfoGraph &needle, const InfoGraph &haystack);

// Union of per-round contributions in perturbed order. Round numbers are
// 1-based; ContextBefore(1) is empty.
class ContextAccumulator {
 public:
  explicit ContextAccumulator(std::vector<InfoGraph> per_round_graphs);

  const InfoGraph &ContextBefore(int round) const;

  // Union of the `window` rounds immediately before `round`.
  InfoGraph WindowBefore(int round, int window) const;

  int rounds() const { return static_cast<int>(per_round_.size()); }

 private:
  std::vector<InfoGraph> per_round_;
  std::vector<InfoGraph> prefix_;  // prefix_[r-1] = ContextBefore(r)
};

enum class CanonicalKind { kAliasOf, kGroupOf, kNewEntity };

const char *CanonicalKindName(CanonicalKind kind);

struct CanonicalizationResult {
  CanonicalKind kind = CanonicalKind::kNewEntity;
  std::vector<EntityKey> keys;  // alias_of: one key; group_of: members
  Entity entity;                // new_entity: the inserted entity
};

class CanonicalizationClient {
 public:
  virtual ~CanonicalizationClient() = default;

  virtual CanonicalizationResult Resolve(const std::vector<Entity> &entities,
                                         const std::vector<std::string> &types,
                                         const std::string &target) = 0;
};

// Resolves `candidate` against `graph`. Exact key or surface matches are
// answered locally; everything else goes to `resolver`. alias_of records the
// surface form as an alias, new_entity inserts into the graph. A resolver
// failure or an answer naming unknown entities throws Error(kMisaligned).
CanonicalizationResult CanonicalizeEntity(const Entity &candidate,
                                          InfoGraph &graph,
                                          CanonicalizationClient &resolver);

}  // namespace mortar
