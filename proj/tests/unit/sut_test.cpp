#include <gtest/gtest.h>

#include <atomic>
#include <set>

#include "error.hpp"
#include "fixtures.hpp"
#include "sut.hpp"

namespace mortar {
namespace {

AnnotatedDialogue TeaReduced() {
  return testing::AnnotateOrigins(testing::TeaDialogue(), testing::TeaExtraction(),
                                  PerturbationKind::kDR, {1, 3, 4});
}

// Records every request and answers with the round number.
class RecordingResponder : public Responder {
 public:
  std::string Respond(const std::vector<ChatMessage> &messages, const AnnotatedRound &,
                      const std::string &) override {
    requests.push_back(messages);
    if (fail_at == static_cast<int>(requests.size())) {
      throw Error(ErrorKind::kTransport, "down");
    }
    return " 'reply " + std::to_string(requests.size()) + "' ";
  }
  std::string Describe() const override { return "recording"; }
  std::string model_name() const override { return "recording"; }

  std::vector<std::vector<ChatMessage>> requests;
  int fail_at = 0;
};

TEST(SutInstructionsTest, DefaultsCarryBothRules) {
  EXPECT_TRUE(InstructionsValid(DefaultSystemInstructions()));
  EXPECT_FALSE(InstructionsValid("Answer briefly."));
  EXPECT_EQ(ParseHistoryPolicy("gold"), HistoryPolicy::kGold);
  EXPECT_EQ(ParseHistoryPolicy("self_generated"), HistoryPolicy::kSelfGenerated);
  EXPECT_THROW(ParseHistoryPolicy("other"), Error);
}

TEST(DefectProfileTest, Parse) {
  EXPECT_EQ(ParseDefectProfile("oracle").kind, DefectKind::kOracle);
  DefectProfile a = ParseDefectProfile("amnesiac:3");
  EXPECT_EQ(a.kind, DefectKind::kAmnesiac);
  EXPECT_EQ(a.window, 3);
  EXPECT_EQ(ParseDefectProfile("stubborn_never_unknown").kind, DefectKind::kStubborn);
  EXPECT_EQ(ParseDefectProfile("parrot").kind, DefectKind::kParrot);
  EXPECT_EQ(ParseDefectProfile("random_token:9").seed, 9u);
  EXPECT_EQ(ParseDefectProfile(a.ToString()).window, 3);
  EXPECT_THROW(ParseDefectProfile("amnesiac:x"), Error);
  EXPECT_THROW(ParseDefectProfile("grumpy"), Error);
}

TEST(TrimAnswerTest, StripsQuotesAndSpace) {
  EXPECT_EQ(TrimAnswer("  \"India\"\n"), "India");
  EXPECT_EQ(TrimAnswer("`Shen Nong`"), "Shen Nong");
  EXPECT_EQ(TrimAnswer("   "), "");
}

TEST(RunDialogueTest, RequestsCarryPriorPairs) {
  RecordingResponder rec;
  SutConfig config;
  DialogueTranscript t = RunDialogue(rec, TeaReduced(), config);
  ASSERT_EQ(rec.requests.size(), 3u);
  for (size_t r = 0; r < 3; ++r) {
    const auto &m = rec.requests[r];
    ASSERT_EQ(m.size(), 2 + 2 * r);
    EXPECT_EQ(m.front().role, "system");
    EXPECT_EQ(m.front().content, DefaultSystemInstructions());
    EXPECT_EQ(m.back().role, "user");
    EXPECT_EQ(m.back().content, t.outcomes[r].question);
  }
  EXPECT_EQ(rec.requests[2][2].content, "reply 1");
  EXPECT_EQ(t.outcomes[1].generated.value_or(""), "reply 2");
  EXPECT_EQ(t.outcomes[1].expected.value_or(""), "Unknown");
  EXPECT_EQ(t.outcomes[2].origin_index, 4);
  EXPECT_EQ(t.dialogue_id, "tea");
}

TEST(RunDialogueTest, GoldHistoryUsesExpectedAnswers) {
  RecordingResponder rec;
  SutConfig config;
  config.history_policy = HistoryPolicy::kGold;
  AnnotatedDialogue d = TeaReduced();
  RunDialogue(rec, d, config);
  EXPECT_EQ(rec.requests[2][2].content, d.rounds[0].expected.text);
  EXPECT_EQ(rec.requests[2][4].content, "Unknown");
}

TEST(RunDialogueTest, FailureAbortsRemainingRounds) {
  RecordingResponder rec;
  rec.fail_at = 2;
  DialogueTranscript t = RunDialogue(rec, TeaReduced(), SutConfig());
  EXPECT_TRUE(t.partial);
  EXPECT_NE(t.error.find("round 2"), std::string::npos);
  EXPECT_EQ(rec.requests.size(), 2u);
  EXPECT_EQ(t.outcomes[0].status, OutcomeStatus::kOk);
  EXPECT_EQ(t.outcomes[1].status, OutcomeStatus::kFailed);
  EXPECT_FALSE(t.outcomes[1].generated.has_value());
  EXPECT_EQ(t.outcomes[2].status, OutcomeStatus::kAborted);
}

TEST(MockSutTest, OracleRepeatsExpected) {
  MockResponder oracle(ParseDefectProfile("oracle"));
  for (const auto &s : testing::DefectCorpus()) {
    for (const auto &origins : std::vector<std::vector<int>>{{1, 2, 3}, {3, 2, 1, 2}}) {
      AnnotatedDialogue a =
          testing::AnnotateOrigins(s.dialogue, s.extraction, PerturbationKind::kDSD, origins);
      DialogueTranscript t = RunDialogue(oracle, a, SutConfig());
      for (const RoundOutcome &o : t.outcomes) EXPECT_EQ(o.generated, o.expected);
    }
  }
}

TEST(MockSutTest, OracleWithoutExpectedIsValidationError) {
  AnnotatedRound r;
  try {
    MockRespond(ParseDefectProfile("oracle"), r, std::nullopt, std::nullopt, "d");
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::kValidation);
  }
}

TEST(MockSutTest, StubbornNeverSaysUnknown) {
  MockResponder stubborn(ParseDefectProfile("stubborn"));
  DialogueTranscript t = RunDialogue(stubborn, TeaReduced(), SutConfig());
  EXPECT_EQ(t.outcomes[0].generated, t.outcomes[0].expected);
  const std::string &g = *t.outcomes[1].generated;
  EXPECT_NE(g, "Unknown");
  const auto &vocab = MockVocabulary();
  EXPECT_NE(std::find(vocab.begin(), vocab.end(), g), vocab.end());
  EXPECT_EQ(RunDialogue(stubborn, TeaReduced(), SutConfig()).outcomes[1].generated, g);
}

TEST(MockSutTest, AmnesiacForgetsDistantAntecedents) {
  testing::ScriptedDialogue chain = testing::ChainDialogue();
  AnnotatedDialogue a = testing::AnnotateOrigins(chain.dialogue, chain.extraction,
                                                 PerturbationKind::kOriginal, {1, 2, 3, 4});
  MockResponder k1(ParseDefectProfile("amnesiac:2"));
  MockResponder k3(ParseDefectProfile("amnesiac:3"));
  EXPECT_EQ(RunDialogue(k1, a, SutConfig()).outcomes[3].generated.value_or(""), "Unknown");
  EXPECT_EQ(RunDialogue(k3, a, SutConfig()).outcomes[3].generated.value_or(""), "3357 metres");
}

TEST(MockSutTest, ParrotRepeatsPreviousAnswer) {
  MockResponder parrot(ParseDefectProfile("parrot"));
  DialogueTranscript t = RunDialogue(parrot, TeaReduced(), SutConfig());
  EXPECT_EQ(t.outcomes[0].generated, t.outcomes[0].expected);
  EXPECT_EQ(t.outcomes[1].generated, t.outcomes[0].generated);
  EXPECT_EQ(t.outcomes[2].generated, t.outcomes[0].generated);
}

TEST(MockSutTest, RandomTokenIsSeeded) {
  AnnotatedDialogue a = TeaReduced();
  auto run = [&](const char *spec) {
    MockResponder m(ParseDefectProfile(spec));
    std::vector<std::string> out;
    for (const auto &o : RunDialogue(m, a, SutConfig()).outcomes) out.push_back(*o.generated);
    return out;
  };
  EXPECT_EQ(run("random_token:1"), run("random_token:1"));
  std::set<std::vector<std::string>> distinct;
  for (int s = 0; s < 10; ++s) distinct.insert(run(("random_token:" + std::to_string(s)).c_str()));
  EXPECT_GT(distinct.size(), 1u);
}

TEST(RunDialoguesTest, ParallelOutputFollowsInputOrder) {
  std::vector<AnnotatedDialogue> dialogues;
  for (const auto &s : testing::DefectCorpus()) {
    for (int rep = 0; rep < 5; ++rep) {
      dialogues.push_back(testing::AnnotateOrigins(s.dialogue, s.extraction,
                                                   PerturbationKind::kOriginal, {1, 2, 3}));
    }
  }
  MockResponder oracle(ParseDefectProfile("oracle"));
  auto serial = RunDialogues(oracle, dialogues, SutConfig(), 1);
  auto parallel = RunDialogues(oracle, dialogues, SutConfig(), 8);
  ASSERT_EQ(parallel.size(), dialogues.size());
  for (size_t i = 0; i < dialogues.size(); ++i) {
    EXPECT_EQ(parallel[i].dialogue_id, dialogues[i].dialogue.source);
    ASSERT_EQ(parallel[i].outcomes.size(), serial[i].outcomes.size());
    for (size_t r = 0; r < serial[i].outcomes.size(); ++r) {
      EXPECT_EQ(parallel[i].outcomes[r].generated, serial[i].outcomes[r].generated);
    }
  }
}

}  // namespace
}  // namespace mortar
