#include <gtest/gtest.h>

#include <random>

#include "answerability.hpp"
#include "error.hpp"
#include "fixtures.hpp"

namespace mortar {
namespace {

using testing::Graph;
using testing::Ref;

const Ref kCountry{"Country", "India"};
const Ref kTea{"Plant", "Tea"};
const Ref kShen{"Person", "Shen Nong"};

TEST(OntologyTest, SelfResolvableIgnoresContext) {
  InfoGraph g = Graph({kTea});
  auto v = CheckOntology(g, g, InfoGraph());
  EXPECT_EQ(v.status, VerdictStatus::kSelfResolvable);
  EXPECT_TRUE(v.missing.empty());
  EXPECT_EQ(v.checks_run, std::set<std::string>{check::kOntology});
}

TEST(OntologyTest, ContextCoversMissingPart) {
  auto v = CheckOntology(Graph({kCountry}), Graph({kCountry, kTea}), Graph({kTea, kShen}));
  EXPECT_EQ(v.status, VerdictStatus::kContextResolved);
  EXPECT_TRUE(v.missing.empty());
}

TEST(OntologyTest, UncoveredEntityIsMissing) {
  auto v = CheckOntology(Graph({}), Graph({kShen, kTea}), Graph({kTea}));
  EXPECT_EQ(v.status, VerdictStatus::kUnresolved);
  EXPECT_EQ(v.missing, Graph({kShen}));
}

TEST(OntologyTest, RelationCoveredByEndpointsOrKey) {
  testing::RelRef took{kShen, kTea, "took"};
  InfoGraph full = Graph({kShen, kTea}, {took});
  InfoGraph q = Graph({kShen, kTea});
  EXPECT_EQ(CheckOntology(q, full, Graph({kShen, kTea})).status,
            VerdictStatus::kContextResolved);
  InfoGraph key_only;
  key_only.AddRelationUnchecked({EntityKey::Of("Person", "Shen Nong"), EntityKey::Of("Plant", "Tea"),
                                 "took"});
  EXPECT_EQ(CheckOntology(q, full, key_only).status, VerdictStatus::kContextResolved);
  auto v = CheckOntology(q, full, Graph({kTea}));
  EXPECT_EQ(v.status, VerdictStatus::kUnresolved);
  EXPECT_EQ(v.missing.relations().size(), 1u);
}

TEST(OntologyTest, AgreesWithBruteForce) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    testing::OntologyCase c = testing::RandomOntologyCase(rng);
    InfoGraph ctx;
    for (const InfoGraph &g : c.prior) ctx = GraphUnion(ctx, g);
    VerdictStatus expected = testing::BruteForceOntology(
        testing::Flatten(c.question), testing::Flatten(c.full), testing::Flatten(ctx));
    EXPECT_EQ(CheckOntology(c.question, c.full, ctx).status, expected) << "trial " << trial;
  }
}

TEST(OntologyTest, MonotoneInContext) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    testing::OntologyCase c = testing::RandomOntologyCase(rng);
    InfoGraph ctx;
    bool was_answerable = false;
    for (const InfoGraph &g : c.prior) {
      ctx = GraphUnion(ctx, g);
      bool now = CheckOntology(c.question, c.full, ctx).answerable();
      EXPECT_TRUE(now || !was_answerable) << "trial " << trial;
      was_answerable = now;
    }
  }
}

TEST(SemanticTest, Examples) {
  InfoGraph known = Graph({kShen, kTea});
  HeuristicCoref coref;
  auto yes = CheckSemantic("When did he take it?",
                           {"Who discovered tea? Shen Nong"}, coref, known);
  EXPECT_TRUE(yes.resolved);
  EXPECT_TRUE(yes.had_pronouns);
  EXPECT_TRUE(yes.low_confidence);
  auto vacuous = CheckSemantic("Which country grows tea?", {}, coref, known);
  EXPECT_TRUE(vacuous.resolved);
  EXPECT_FALSE(vacuous.had_pronouns);
  EXPECT_FALSE(CheckSemantic("When did he take it?", {}, coref, known).resolved);
  EXPECT_FALSE(CheckSemantic("When did he take it?", {"What is tea? A plant"}, coref, known)
                   .resolved);
}

TEST(StoryTest, Examples) {
  InfoGraph known = Graph({kShen, kTea});
  HeuristicCoref coref;
  std::string story = "Shen Nong was an emperor. He boiled water under a tree.";
  InfoGraph missing = Graph({kShen});
  EXPECT_TRUE(CheckStory("When did he take it?", story, missing, Graph({kTea}), coref, known));
  EXPECT_FALSE(
      CheckStory("When did he take it?", std::nullopt, missing, Graph({kTea}), coref, known));
  InfoGraph two = Graph({kShen, kCountry});
  EXPECT_FALSE(CheckStory("When did he take it?", story, two, Graph({kTea}), coref, known));
  EXPECT_FALSE(CheckStory("When did she take it?", story, missing, Graph({kTea}), coref, known));
}

TEST(TaggingTest, TeaReducedDialogue) {
  Dialogue tea = testing::TeaDialogue();
  AnnotatedDialogue a = testing::AnnotateOrigins(tea, testing::TeaExtraction(),
                                                 PerturbationKind::kDR, {1, 3, 4});
  ASSERT_EQ(a.rounds.size(), 3u);
  EXPECT_EQ(a.rounds[0].verdict.status, VerdictStatus::kSelfResolvable);
  EXPECT_EQ(a.rounds[1].round.question, "When did he take it?");
  EXPECT_EQ(a.rounds[1].verdict.status, VerdictStatus::kUnresolved);
  EXPECT_TRUE(a.rounds[1].verdict.missing.Contains(EntityKey::Of("Person", "Shen Nong")));
  EXPECT_EQ(a.rounds[1].expected.text, kUnknownAnswer);
  EXPECT_FALSE(a.rounds[1].expected.answerable);
  EXPECT_TRUE(a.rounds[1].verdict.checks_run.count(check::kSemantic));
  EXPECT_EQ(a.rounds[2].verdict.status, VerdictStatus::kContextResolved);
  EXPECT_EQ(a.rounds[2].expected.text, "India");
  EXPECT_EQ(a.rounds[2].antecedent_distance, 2);
}

TEST(TaggingTest, OriginalDialoguesAreFullyAnswerable) {
  for (const testing::ScriptedDialogue &s : testing::DefectCorpus()) {
    std::vector<int> origins;
    for (const QARound &r : s.dialogue.rounds) origins.push_back(r.index);
    AnnotatedDialogue a =
        testing::AnnotateOrigins(s.dialogue, s.extraction, PerturbationKind::kOriginal, origins);
    for (size_t i = 0; i < a.rounds.size(); ++i) {
      EXPECT_TRUE(a.rounds[i].expected.answerable) << s.dialogue.dialogue_id << " " << i;
      EXPECT_EQ(a.rounds[i].expected.text, s.dialogue.rounds[i].gold_answer);
    }
  }
}

TEST(TaggingTest, DuplicateTaggedPerOccurrence) {
  testing::ScriptedDialogue s = testing::ShelleyDialogue();
  AnnotatedDialogue a =
      testing::AnnotateOrigins(s.dialogue, s.extraction, PerturbationKind::kDSD, {3, 2, 1, 2});
  EXPECT_FALSE(a.rounds[1].expected.answerable);
  EXPECT_TRUE(a.rounds[3].round.provenance.duplicated);
  EXPECT_TRUE(a.rounds[3].expected.answerable);
  EXPECT_EQ(a.rounds[3].verdict.status, VerdictStatus::kContextResolved);
  EXPECT_EQ(a.rounds[3].antecedent_distance, 1);
}

TEST(TaggingTest, AntecedentDistance) {
  testing::ScriptedDialogue s = testing::ChainDialogue();
  AnnotatedDialogue a = testing::AnnotateOrigins(s.dialogue, s.extraction,
                                                 PerturbationKind::kOriginal, {1, 2, 3, 4});
  EXPECT_EQ(a.rounds[3].antecedent_distance, 3);
  EXPECT_FALSE(a.rounds[0].antecedent_distance.has_value());
}

TEST(TaggingTest, StoryRescuesUnresolvedRound) {
  testing::ScriptedDialogue s = testing::Scripted(
      "story",
      {{"What is tea?", "a drink", Graph({kTea}), Graph({kTea}), Graph({})},
       {"When did he take it?", "2737 BC", Graph({}), Graph({kShen, kTea}), Graph({})}},
      "Shen Nong was an emperor. He drank tea.");
  AnnotatedDialogue a =
      testing::AnnotateOrigins(s.dialogue, s.extraction, PerturbationKind::kOriginal, {1, 2});
  EXPECT_EQ(a.rounds[1].verdict.status, VerdictStatus::kStoryResolvable);
  EXPECT_EQ(a.rounds[1].expected.text, "2737 BC");
  EXPECT_TRUE(a.rounds[1].verdict.checks_run.count(check::kStory));
}

TEST(AssignExpectedTest, CountMismatchIsInternalError) {
  Dialogue tea = testing::TeaDialogue();
  PerturbedDialogue pd = FromOrigins(tea, PerturbationKind::kDR, {1, 2});
  try {
    AssignExpected(pd, {}, tea);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInternal);
  }
}

TEST(AnnotatedJsonTest, RoundTrip) {
  Dialogue tea = testing::TeaDialogue();
  AnnotatedDialogue a = testing::AnnotateOrigins(tea, testing::TeaExtraction(),
                                                 PerturbationKind::kDR, {1, 3, 4});
  nlohmann::json j = a.ToJson();
  EXPECT_EQ(j["rounds"][1]["verdict"], "unresolved");
  EXPECT_EQ(j["rounds"][1]["expected_answer"], "Unknown");
  EXPECT_FALSE(j["rounds"][1]["answerable"].get<bool>());
  AnnotatedDialogue back = AnnotatedDialogue::FromJson(j);
  ASSERT_EQ(back.rounds.size(), 3u);
  EXPECT_EQ(back.dialogue, a.dialogue);
  for (size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back.rounds[i].verdict.status, a.rounds[i].verdict.status);
    EXPECT_EQ(back.rounds[i].expected.text, a.rounds[i].expected.text);
    EXPECT_EQ(back.rounds[i].antecedent_distance, a.rounds[i].antecedent_distance);
  }
  EXPECT_EQ(back.rounds[1].verdict.missing.entities().size(),
            a.rounds[1].verdict.missing.entities().size());
}

}  // namespace
}  // namespace mortar
