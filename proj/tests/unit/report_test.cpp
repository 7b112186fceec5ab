#include <gtest/gtest.h>

#include "error.hpp"
#include "fixtures.hpp"
#include "report.hpp"

namespace mortar {
namespace {

BugRecord Bug(Mr mr, const std::string &id, int origin, Severity sev = Severity::kNormal) {
  BugRecord b;
  b.mr = mr;
  b.seed_key = {id, origin};
  b.severity = sev;
  return b;
}

TEST(DatasetSummaryTest, CountsMatchHandTally) {
  Dialogue tea = testing::TeaDialogue();
  DialogueExtraction x = testing::TeaExtraction();
  testing::ScriptedDialogue shelley = testing::ShelleyDialogue();
  std::vector<AnnotatedDialogue> ds = {
      testing::AnnotateOrigins(tea, x, PerturbationKind::kDR, {1, 3, 4}),
      testing::AnnotateOrigins(tea, x, PerturbationKind::kDR, {1, 2, 3, 4}),
      testing::AnnotateOrigins(shelley.dialogue, shelley.extraction, PerturbationKind::kDR,
                               {2, 3})};
  DatasetColumn c = SummarizeDataset(ds);
  EXPECT_EQ(c.total_rounds, 9);
  EXPECT_EQ(c.unanswerable_rounds, 2);
  EXPECT_EQ(c.total_dialogues, 3);
  EXPECT_EQ(c.dialogues_with_unanswerable, 2);
  ASSERT_TRUE(c.ratio.has_value());
  EXPECT_NEAR(*c.ratio, 2.0 / 3.0, 1e-12);
  EXPECT_FALSE(SummarizeDataset({}).ratio.has_value());

  DatasetSummary s = SummarizeDatasets({{PerturbationKind::kDR, ds}});
  std::string csv = DatasetSummaryCsv(s);
  EXPECT_NE(csv.find("DR"), std::string::npos);
  EXPECT_EQ(DatasetSummaryJson(s)["DR"]["unanswerable_rounds"], 2);
  EXPECT_NE(DatasetSummaryText(s).find("DR"), std::string::npos);
}

TEST(MrTableTest, RendersEveryRun) {
  RunSummary a;
  a.sut = "mock:oracle";
  a.bugs = SummarizeBugs({}, {{Mr::kMr1, {10, 10.0, 10}}});
  RunSummary b;
  b.sut = "mock:parrot_repeat_last";
  b.bugs = SummarizeBugs({Bug(Mr::kMr1, "d", 1), Bug(Mr::kMr2, "d", 2)},
                         {{Mr::kMr1, {10, 6.0, 10}}, {Mr::kMr2, {4, 2.0, 4}}});
  std::string csv = MrTableCsv({a, b});
  EXPECT_NE(csv.find("mock:oracle"), std::string::npos);
  EXPECT_NE(csv.find("mock:parrot_repeat_last"), std::string::npos);
  nlohmann::json j = MrTableJson({a, b});
  EXPECT_EQ(j.size(), 2u);
  std::string text = MrTableText({a, b});
  EXPECT_NE(text.find("MR3"), std::string::npos);
  RunSummary back = RunSummary::FromJson(b.ToJson());
  EXPECT_EQ(back.sut, b.sut);
  EXPECT_EQ(back.bugs.per_mr.at(Mr::kMr2).unique_bugs, 1);
}

TEST(OverlapTest, RegionsPartitionTheUnion) {
  SeedKeySet a = SeedKeysOf({Bug(Mr::kMr1, "d", 1, Severity::kCritical),
                             Bug(Mr::kMr1, "d", 2, Severity::kCritical), Bug(Mr::kMr2, "d", 3)},
                            true);
  EXPECT_EQ(a.size(), 2u);
  SeedKeySet b = {{"d", 2}, {"d", 4}};
  SeedKeySet c = {{"d", 2}, {"d", 1}, {"d", 5}};
  OverlapSummary o = Overlap({{"A", a}, {"B", b}, {"C", c}});
  EXPECT_EQ(o.union_size, 4);
  EXPECT_EQ(o.common_to_all, 1);
  long total = 0;
  for (const auto &[mask, n] : o.regions) total += n;
  EXPECT_EQ(total, o.union_size);
  EXPECT_EQ(o.regions.at(0b111), 1);
  EXPECT_EQ(o.regions.at(0b101), 1);
  ASSERT_EQ(o.pairs.size(), 3u);
  EXPECT_EQ(o.pairs[0].common, 1);
  EXPECT_EQ(o.pairs[0].only_a, 1);
  EXPECT_EQ(o.pairs[0].only_b, 1);
  EXPECT_FALSE(OverlapText(o).empty());
  EXPECT_EQ(o.ToJson()["union"], 4);
}

TEST(OverlapTest, NeedsAtLeastTwoSets) {
  try {
    Overlap({{"A", {}}});
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
  }
}

}  // namespace
}  // namespace mortar
