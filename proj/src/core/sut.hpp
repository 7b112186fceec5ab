#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "answerability.hpp"
#include "chat.hpp"
#include "mr_oracle.hpp"

namespace mortar {

enum class HistoryPolicy { kSelfGenerated, kGold };

const char *HistoryPolicyName(HistoryPolicy p);
HistoryPolicy ParseHistoryPolicy(std::string_view name);

// Instructions sent as the system message of every SUT request.
const std::string &DefaultSystemInstructions();

// True when the text carries both the "Unknown" rule and the
// short-and-precise rule.
bool InstructionsValid(const std::string &instructions);

struct SutConfig {
  std::string endpoint;
  std::string model;
  std::string api_key;
  std::string system_instructions = DefaultSystemInstructions();
  HistoryPolicy history_policy = HistoryPolicy::kSelfGenerated;
  double temperature = 0.0;
  int max_retries = 2;
  double backoff_seconds = 0.5;
  double timeout_seconds = 60.0;
};

// Produces one SUT answer. `round` gives mocks access to the annotation; real
// endpoints see only the messages.
class Responder {
 public:
  virtual ~Responder() = default;

  virtual std::string Respond(const std::vector<ChatMessage> &messages,
                              const AnnotatedRound &round,
                              const std::string &dialogue_id) = 0;
  virtual std::string Describe() const = 0;
  virtual std::string model_name() const = 0;
};

class HttpResponder : public Responder {
 public:
  explicit HttpResponder(const SutConfig &config);

  std::string Respond(const std::vector<ChatMessage> &messages,
                      const AnnotatedRound &round,
                      const std::string &dialogue_id) override;
  std::string Describe() const override { return client_.Describe(); }
  std::string model_name() const override { return client_.model_name(); }

 private:
  HttpChatClient client_;
};

enum class DefectKind { kOracle, kAmnesiac, kStubborn, kParrot, kRandomToken };

struct DefectProfile {
  DefectKind kind = DefectKind::kOracle;
  int window = 1;       // amnesiac only
  uint64_t seed = 0;    // stubborn and random_token

  std::string ToString() const;
};

// Accepts "oracle", "amnesiac:<k>", "stubborn_never_unknown" (or
// "stubborn"), "parrot_repeat_last" (or "parrot"), "random_token[:<seed>]".
DefectProfile ParseDefectProfile(std::string_view spec);

// Answer of a mock SUT. `previous` is the last answer visible in the history.
// Throws Error(kValidation) for the oracle profile without an expected answer.
std::string MockRespond(const DefectProfile &profile, const AnnotatedRound &round,
                        const std::optional<std::string> &expected,
                        const std::optional<std::string> &previous,
                        const std::string &dialogue_id);

// Words the stubborn and random_token profiles draw from.
const std::vector<std::string> &MockVocabulary();

class MockResponder : public Responder {
 public:
  explicit MockResponder(DefectProfile profile) : profile_(profile) {}

  std::string Respond(const std::vector<ChatMessage> &messages,
                      const AnnotatedRound &round,
                      const std::string &dialogue_id) override;
  std::string Describe() const override { return "mock:" + profile_.ToString(); }
  std::string model_name() const override { return "mock-" + profile_.ToString(); }

 private:
  DefectProfile profile_;
};

// Removes surrounding whitespace and quote characters.
std::string TrimAnswer(std::string_view text);

struct DialogueTranscript {
  std::string dialogue_id;
  PerturbationKind kind = PerturbationKind::kOriginal;
  std::vector<RoundOutcome> outcomes;
  bool partial = false;
  std::string error;
};

// Issues the rounds of one annotated dialogue in perturbed order. Request r
// carries the system message, r-1 prior (question, answer) pairs and the
// current question. A failed round ends the dialogue; the remaining rounds
// are recorded as aborted.
DialogueTranscript RunDialogue(Responder &responder, const AnnotatedDialogue &dialogue,
                               const SutConfig &config);

// Runs dialogues with at most `parallelism` in flight. Output order follows
// the input.
std::vector<DialogueTranscript> RunDialogues(Responder &responder,
                                             const std::vector<AnnotatedDialogue> &dialogues,
                                             const SutConfig &config, int parallelism);

}  // namespace mortar
