#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "coref.hpp"
#include "dialogue.hpp"
#include "extraction.hpp"
#include "info_graph.hpp"
#include "json.hpp"
#include "perturbation.hpp"

namespace mortar {

enum class VerdictStatus {
  kSelfResolvable,
  kContextResolved,
  kStoryResolvable,
  kSemanticResolved,
  kUnresolved,
};

const char *VerdictStatusName(VerdictStatus status);
VerdictStatus ParseVerdictStatus(std::string_view name);

// Names recorded in AnswerabilityVerdict::checks_run.
namespace check {
inline constexpr const char *kOntology = "ontology";
inline constexpr const char *kSemantic = "semantic";
inline constexpr const char *kStory = "story";
inline constexpr const char *kLowConfidence = "low_confidence";
}  // namespace check

struct AnswerabilityVerdict {
  VerdictStatus status = VerdictStatus::kUnresolved;
  InfoGraph missing;  // empty unless unresolved
  std::set<std::string> checks_run;

  bool answerable() const { return status != VerdictStatus::kUnresolved; }
};

inline constexpr const char *kUnknownAnswer = "Unknown";

struct ExpectedAnswer {
  std::string text;
  bool answerable = true;
};

// Part of `missing` that `context` does not cover. A relation counts as
// covered when its key is in context or both endpoints are.
InfoGraph Uncovered(const InfoGraph &missing, const InfoGraph &context);

// Ontology check on one round: G_r = G_full -> self_resolvable; otherwise the
// difference must be covered by `context` (context_resolved) or the verdict
// is unresolved with the uncovered part as `missing`.
AnswerabilityVerdict CheckOntology(const InfoGraph &question_graph,
                                   const InfoGraph &full_graph,
                                   const InfoGraph &context);

struct SemanticCheck {
  bool resolved = true;
  bool had_pronouns = false;
  bool low_confidence = false;
};

// Every pronoun of `question` must have an antecedent in the prior rounds.
SemanticCheck CheckSemantic(const std::string &question,
                            const std::vector<std::string> &prior_rounds,
                            CoreferenceClient &resolver, const InfoGraph &known);

// Story check: each missing entity must be referred to in the story by a
// pronoun that also occurs in the question. Missing relations must have both
// endpoints covered by `context` or by a story-resolved entity.
bool CheckStory(const std::string &question, const std::optional<std::string> &story,
                const InfoGraph &missing, const InfoGraph &context,
                CoreferenceClient &resolver, const InfoGraph &known);

struct AnnotatedRound {
  PerturbedRound round;
  std::string gold_answer;  // gold answer of the origin round
  AnswerabilityVerdict verdict;
  ExpectedAnswer expected;
  // Context-resolved rounds: fewest immediately preceding rounds whose
  // contributions cover the missing information.
  std::optional<int> antecedent_distance;
};

struct AnnotatedDialogue {
  PerturbedDialogue dialogue;
  std::vector<AnnotatedRound> rounds;

  nlohmann::json ToJson() const;
  static AnnotatedDialogue FromJson(const nlohmann::json &j);
};

// What one original round adds to the context of later rounds: entities
// named in its question plus those named in its gold answer.
InfoGraph RoundContribution(const RoundGraphs &graphs);

struct TaggedRound {
  AnswerabilityVerdict verdict;
  std::optional<int> antecedent_distance;
};

// Tags every perturbed round in order: ontology, then semantic, then story.
// The first positive check decides the status.
std::vector<TaggedRound> TagDialogue(const PerturbedDialogue &pd,
                                     const Dialogue &original,
                                     const DialogueExtraction &extraction,
                                     CoreferenceClient &resolver);

// Fills expected answers: the origin's gold answer for answerable rounds,
// "Unknown" otherwise. Throws Error(kInternal) if a verdict is missing.
AnnotatedDialogue AssignExpected(const PerturbedDialogue &pd,
                                 const std::vector<TaggedRound> &tags,
                                 const Dialogue &original);

}  // namespace mortar
