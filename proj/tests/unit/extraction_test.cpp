#include "extraction.hpp"

#include <gtest/gtest.h>

#include "error.hpp"
#include "fixtures.hpp"
#include "mock_llm.hpp"

namespace mortar {
namespace {

using nlohmann::json;

// Records requests and replays canned replies in order.
class ReplayClient : public ChatClient {
 public:
  explicit ReplayClient(std::vector<std::string> replies) : replies_(std::move(replies)) {}

  std::string Complete(const ChatRequest &request) override {
    requests.push_back(request);
    if (next_ >= replies_.size()) throw Error(ErrorKind::kTransport, "no more replies");
    return replies_[next_++];
  }
  std::string model_name() const override { return "replay"; }
  std::string Describe() const override { return "replay"; }

  std::vector<ChatRequest> requests;

 private:
  std::vector<std::string> replies_;
  size_t next_ = 0;
};

Dialogue TwoRounds() {
  return testing::MakeDialogue("two", {{"Who built it?", "Eiffel"}, {"When?", "1889"}});
}

TEST(ExtractionTest, ParseJsonReplyStripsFences) {
  std::string err;
  auto j = ParseJsonReply("```json\n{\"topic\": \"tea\"}\n```", &err);
  ASSERT_TRUE(j.has_value()) << err;
  EXPECT_EQ((*j)["topic"], "tea");
  EXPECT_FALSE(ParseJsonReply("not json", &err).has_value());
}

TEST(ExtractionTest, OneRepairThenSuccess) {
  ReplayClient client({R"({"declaratives": ["only one"]})",
                       R"({"declaratives": ["Eiffel built it.", "It was built in 1889."]})"});
  TemplateSet t = TemplateSet::Defaults();
  ExtractionPipeline p(client, t);
  auto out = p.ExtractDeclaratives(TwoRounds());
  EXPECT_EQ(out.size(), 2u);
  EXPECT_EQ(p.repairs(), 1);
  ASSERT_EQ(client.requests.size(), 2u);
  const auto &repair = client.requests[1];
  EXPECT_TRUE(repair.payload.contains("repair"));
  EXPECT_EQ(repair.messages.back().role, "user");
  EXPECT_EQ(repair.messages[repair.messages.size() - 2].role, "assistant");
}

TEST(ExtractionTest, SecondFailureIsMisaligned) {
  ReplayClient client({"nonsense", R"({"declaratives": []})"});
  TemplateSet t = TemplateSet::Defaults();
  ExtractionPipeline p(client, t);
  try {
    p.ExtractDeclaratives(TwoRounds());
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::kMisaligned);
  }
  EXPECT_EQ(client.requests.size(), 2u);
}

TEST(ExtractionTest, EmptyInputsRejected) {
  ReplayClient client({});
  TemplateSet t = TemplateSet::Defaults();
  ExtractionPipeline p(client, t);
  EXPECT_THROW(p.ExtractTopic("   "), Error);
  EXPECT_THROW(p.ExtractEntityTypes({}, "tea"), Error);
  EXPECT_TRUE(client.requests.empty());
}

TEST(ExtractionTest, EntityTypesDeduplicated) {
  ReplayClient client({R"({"entity_types": ["Person", "person", "Place"]})"});
  TemplateSet t = TemplateSet::Defaults();
  ExtractionPipeline p(client, t);
  EXPECT_EQ(p.ExtractEntityTypes({"Eiffel built it."}, "towers").size(), 2u);
}

TEST(ExtractionTest, TeaFixtureGraphs) {
  DialogueExtraction x = testing::TeaExtraction();
  ASSERT_TRUE(x.aligned());
  ASSERT_EQ(x.rounds.size(), 4u);
  EXPECT_EQ(x.topic, "history of tea");
  EXPECT_EQ(x.whole.entities().size(), 4u);
  EXPECT_EQ(x.whole.relations().size(), 3u);
  EXPECT_TRUE(x.whole.ReferentiallyClosed());
  EXPECT_TRUE(x.rounds[2].question.empty());
  EXPECT_TRUE(x.rounds[2].full.Contains(EntityKey::Of("Person", "Shen Nong")));
  EXPECT_EQ(x.rounds[2].full.relations().size(), 1u);
  EXPECT_TRUE(x.rounds[1].answer.Contains(EntityKey::Of("Person", "Shen Nong")));
  DialogueExtraction back = DialogueExtraction::FromJson(x.ToJson());
  EXPECT_EQ(back.ToJson(), x.ToJson());
}

TEST(ExtractionTest, MisalignedRoundRecorded) {
  json fixtures = {{"responses",
                    {{{"template", "dialogue_round_graph"},
                      {"contains", {"Eiffel"}},
                      {"response",
                       {{"rounds",
                         {{{"question", {{"entities", json::array({json::array({"Entity", "Eiffel"})})}, {"relations", json::array()}}},
                           {"full_question", {{"entities", json::array()}, {"relations", json::array()}}},
                           {"answer", {{"entities", json::array()}, {"relations", json::array()}}}},
                          {{"question", {{"entities", json::array()}, {"relations", json::array()}}},
                           {"full_question", {{"entities", json::array()}, {"relations", json::array()}}},
                           {"answer", {{"entities", json::array()}, {"relations", json::array()}}}}}}}}}}}};
  MockChatClient client(fixtures);
  TemplateSet t = TemplateSet::Defaults();
  ExtractionPipeline p(client, t);
  DialogueExtraction x = p.Run(TwoRounds());
  EXPECT_FALSE(x.aligned());
  EXPECT_EQ(x.misaligned_rounds, std::vector<int>{1});
  EXPECT_EQ(client.fixture_hits(), 1);
}

TEST(ExtractionTest, HeuristicMockProcessesAnyDialogue) {
  MockChatClient client;
  TemplateSet t = TemplateSet::Defaults();
  ExtractionPipeline p(client, t);
  Dialogue d = testing::MakeDialogue(
      "h", {{"Who wrote Hamlet?", "William Shakespeare"}, {"Where was he born?", "Stratford"}});
  DialogueExtraction x = p.Run(d);
  ASSERT_TRUE(x.aligned());
  EXPECT_TRUE(x.rounds[1].question.empty());
  EXPECT_TRUE(x.rounds[1].full.Contains(EntityKey::Of("Entity", "William Shakespeare")));
  EXPECT_EQ(client.calls(), 6);
}

TEST(ExtractionTest, LowInformationAnswers) {
  EXPECT_TRUE(IsLowInformationAnswer("unknown"));
  EXPECT_TRUE(IsLowInformationAnswer(" "));
  EXPECT_FALSE(IsLowInformationAnswer("Shen Nong"));
}

}  // namespace
}  // namespace mortar
