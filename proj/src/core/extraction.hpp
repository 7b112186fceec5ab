#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chat.hpp"
#include "dialogue.hpp"
#include "info_graph.hpp"
#include "json.hpp"
#include "prompts.hpp"

namespace mortar {

// Graphs of one original round: entities explicitly named in the original
// question, in the decontextualized full question, and in the gold answer.
struct RoundGraphs {
  InfoGraph question;
  InfoGraph full;
  InfoGraph answer;
};

struct DecontextualizedRound {
  std::string question;
  std::string answer;
};

// Everything the extraction pipeline learns about one seed dialogue.
struct DialogueExtraction {
  std::string dialogue_id;
  std::vector<std::string> declaratives;
  std::vector<DecontextualizedRound> decontextualized;
  std::string topic;
  std::vector<std::string> entity_types;
  InfoGraph whole;
  std::vector<RoundGraphs> rounds;  // indexed by original round index - 1
  std::vector<int> misaligned_rounds;
  std::vector<int> low_information_rounds;
  std::string error;  // non-empty when the dialogue could not be extracted

  bool aligned() const { return error.empty() && misaligned_rounds.empty(); }

  nlohmann::json ToJson() const;
  static DialogueExtraction FromJson(const nlohmann::json &j);
};

// True for answers that carry no fact ("unknown", "no", empty, ...).
bool IsLowInformationAnswer(const std::string &answer);

// The seven LLM-backed functions. Every call renders its template, asks for
// JSON, validates the reply against the template schema plus a per-call
// check, and on failure sends exactly one repair request quoting the error.
// A second failure throws Error(kMisaligned).
class ExtractionPipeline {
 public:
  ExtractionPipeline(ChatClient &client, const TemplateSet &templates);

  std::vector<std::string> ExtractDeclaratives(const Dialogue &dialogue);
  std::vector<DecontextualizedRound> Decontextualize(const Dialogue &dialogue);
  std::string ExtractTopic(const std::string &document);
  std::vector<std::string> ExtractEntityTypes(
      const std::vector<std::string> &declaratives, const std::string &topic);
  InfoGraph ExtractGraph(const std::string &topic, const std::string &document,
                         const std::vector<std::string> &entity_types);
  // Per-round graphs; may grow `whole` through canonicalization. Rounds whose
  // question graph is not inside the full-question graph are appended to
  // `misaligned`.
  std::vector<RoundGraphs> ExtractRoundGraphs(
      InfoGraph &whole, const Dialogue &dialogue,
      const std::vector<DecontextualizedRound> &decontextualized,
      std::vector<int> *misaligned);
  CanonicalizationResult CallCanonicalization(
      const std::vector<Entity> &entities,
      const std::vector<std::string> &entity_types, const std::string &target);

  // Full procedure. Misalignment is recorded in the result, not thrown;
  // transport failures propagate.
  DialogueExtraction Run(const Dialogue &dialogue);

  // Number of repair requests issued so far.
  int repairs() const { return repairs_; }

 private:
  using Check = std::function<std::optional<std::string>(const nlohmann::json &)>;

  nlohmann::json Call(const std::string &name,
                      const std::map<std::string, std::string> &bindings,
                      nlohmann::json payload, const Check &check);

  // Keys in `whole` that an extracted [type, name] reference denotes; more
  // than one when canonicalization calls it a group.
  std::vector<EntityKey> ResolveRef(InfoGraph &whole, const std::string &type,
                                    const std::string &name);

  ChatClient &client_;
  const TemplateSet &templates_;
  int repairs_ = 0;
};

// Canonicalization resolver backed by the LLM pipeline.
class LlmCanonicalizer : public CanonicalizationClient {
 public:
  explicit LlmCanonicalizer(ExtractionPipeline &pipeline) : pipeline_(pipeline) {}

  CanonicalizationResult Resolve(const std::vector<Entity> &entities,
                                 const std::vector<std::string> &types,
                                 const std::string &target) override {
    return pipeline_.CallCanonicalization(entities, types, target);
  }

 private:
  ExtractionPipeline &pipeline_;
};

// Parses a model reply that may wrap its JSON in prose or code fences.
std::optional<nlohmann::json> ParseJsonReply(const std::string &reply,
                                             std::string *error);

}  // namespace mortar
