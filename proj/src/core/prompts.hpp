#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace mortar {

// Names of the seven extraction functions; also the template file stems.
namespace fn {
inline constexpr const char *kDeclaratives = "declarative_extraction";
inline constexpr const char *kDecontextualize = "question_decontextualization";
inline constexpr const char *kTopic = "topic_extraction";
inline constexpr const char *kEntityTypes = "entity_type_extraction";
inline constexpr const char *kGraph = "graph_extraction";
inline constexpr const char *kRoundGraph = "dialogue_round_graph";
inline constexpr const char *kCanonicalize = "canonicalisation";
}  // namespace fn

const std::vector<std::string> &PipelineFunctionNames();

struct PromptTemplate {
  std::string name;
  std::string system;
  std::string body;               // {placeholder} syntax
  nlohmann::json output_schema;   // JSON-schema subset, see ValidateSchema
};

// Substitutes {name} placeholders. Throws Error(kConfig) for any placeholder
// without a binding.
std::string RenderTemplate(const std::string &body,
                           const std::map<std::string, std::string> &bindings);

// Placeholder names appearing in `body`, in order of first use.
std::vector<std::string> Placeholders(const std::string &body);

// Validates `value` against a schema using the keywords type, properties,
// required, items, minItems, maxItems, minLength and enum. Returns the first
// violation as "path: message", or nullopt.
std::optional<std::string> ValidateSchema(const nlohmann::json &value,
                                          const nlohmann::json &schema);

class TemplateSet {
 public:
  static TemplateSet Defaults();

  // Defaults overridden by "<name>.txt" files found in `directory`. The
  // output schemas are fixed in code.
  static TemplateSet LoadDirectory(const std::string &directory);

  const PromptTemplate &Get(const std::string &name) const;

  // Short content hash of every template body; recorded in manifests.
  std::string Version() const;

 private:
  std::map<std::string, PromptTemplate> templates_;
};

}  // namespace mortar
