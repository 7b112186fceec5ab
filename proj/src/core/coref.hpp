#pragma once

#include <atomic>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "info_graph.hpp"

namespace mortar {

struct Mention {
  std::string text;
  size_t start = 0;  // byte offsets into the resolved text
  size_t end = 0;
};

struct FocusMention {
  Mention mention;  // offsets into the focus text
  bool resolved = false;
};

struct CorefResult {
  std::vector<std::vector<Mention>> chains;  // chains over `text`
  std::vector<FocusMention> focus;           // pronouns of the focus sentence
  bool low_confidence = false;               // produced by the heuristic
};

enum class PronounClass { kPerson, kNeuter, kPlural };

// Third-person pronoun class of a folded word, if it is one.
std::optional<PronounClass> ClassifyPronoun(std::string_view word);

// Whether an entity type can be referred to by a pronoun of class `c`.
bool PronounCompatible(PronounClass c, std::string_view entity_type);

// Pronoun mentions in `sentence` with byte offsets.
std::vector<Mention> FindPronouns(std::string_view sentence);

class CoreferenceClient {
 public:
  virtual ~CoreferenceClient() = default;

  // Chains over `text`, and for every pronoun in `focus` whether it has an
  // antecedent inside `text`. `known` lists the dialogue's entities; model
  // backed resolvers may ignore it.
  virtual CorefResult Resolve(std::string_view text, std::string_view focus,
                              const InfoGraph &known) = 0;

  virtual std::string name() const = 0;
};

// Type-compatibility heuristic over the known entities. A focus pronoun is
// resolved when `text` names a known entity of a compatible type; each
// pronoun in `text` chains to the most recent compatible entity mention.
class HeuristicCoref : public CoreferenceClient {
 public:
  CorefResult Resolve(std::string_view text, std::string_view focus,
                      const InfoGraph &known) override;
  std::string name() const override { return "heuristic"; }
};

// Client for the sidecar's POST {endpoint}/coref. Falls back to the
// heuristic (and marks the result low-confidence) when the call fails.
class HttpCoref : public CoreferenceClient {
 public:
  HttpCoref(std::string endpoint, double timeout_seconds = 30.0);

  CorefResult Resolve(std::string_view text, std::string_view focus,
                      const InfoGraph &known) override;
  std::string name() const override { return "sidecar:" + endpoint_; }

  long fallbacks() const { return fallbacks_.load(); }

 private:
  std::string endpoint_;
  double timeout_seconds_;
  HeuristicCoref fallback_;
  std::atomic<long> fallbacks_{0};
};

}  // namespace mortar
