#include <gtest/gtest.h>

#include "coref.hpp"
#include "fixtures.hpp"

namespace mortar {
namespace {

using testing::Graph;

TEST(CorefTest, ClassifiesThirdPersonPronouns) {
  EXPECT_EQ(ClassifyPronoun("he"), PronounClass::kPerson);
  EXPECT_EQ(ClassifyPronoun("her"), PronounClass::kPerson);
  EXPECT_EQ(ClassifyPronoun("its"), PronounClass::kNeuter);
  EXPECT_EQ(ClassifyPronoun("them"), PronounClass::kPlural);
  EXPECT_FALSE(ClassifyPronoun("the").has_value());
  EXPECT_FALSE(ClassifyPronoun("I").has_value());
  EXPECT_FALSE(ClassifyPronoun("you").has_value());
}

TEST(CorefTest, PronounCompatibility) {
  EXPECT_TRUE(PronounCompatible(PronounClass::kPerson, "Person"));
  EXPECT_FALSE(PronounCompatible(PronounClass::kPerson, "Plant"));
  EXPECT_TRUE(PronounCompatible(PronounClass::kNeuter, "Plant"));
  EXPECT_FALSE(PronounCompatible(PronounClass::kNeuter, "person"));
  EXPECT_TRUE(PronounCompatible(PronounClass::kPlural, "Country"));
}

TEST(CorefTest, FindsPronounsWithOffsets) {
  std::string s = "When did he take it? His cup.";
  auto found = FindPronouns(s);
  ASSERT_EQ(found.size(), 3u);
  EXPECT_EQ(found[0].text, "he");
  EXPECT_EQ(s.substr(found[0].start, found[0].end - found[0].start), "he");
  EXPECT_EQ(found[1].text, "it");
  EXPECT_EQ(s.substr(found[2].start, found[2].end - found[2].start), "His");
  EXPECT_TRUE(FindPronouns("Where is the theatre?").empty());
}

TEST(CorefTest, HeuristicResolvesByType) {
  InfoGraph known = Graph({{"Person", "Shen Nong"}, {"Plant", "Tea"}});
  HeuristicCoref c;
  CorefResult r = c.Resolve("Shen Nong found tea. He liked it.", "When did he take it?", known);
  EXPECT_TRUE(r.low_confidence);
  ASSERT_EQ(r.focus.size(), 2u);
  EXPECT_TRUE(r.focus[0].resolved);
  EXPECT_TRUE(r.focus[1].resolved);
  ASSERT_EQ(r.chains.size(), 2u);
  for (const auto &chain : r.chains) EXPECT_EQ(chain.size(), 2u);

  CorefResult only_tea = c.Resolve("Tea is old.", "When did he take it?", known);
  EXPECT_FALSE(only_tea.focus[0].resolved);
  EXPECT_TRUE(only_tea.focus[1].resolved);
}

TEST(CorefTest, HeuristicMatchesAliases) {
  InfoGraph known;
  known.AddEntity({"Mary Shelley", "Person", "", {"Mary Wollstonecraft Shelley"}});
  HeuristicCoref c;
  CorefResult r = c.Resolve("Mary Wollstonecraft Shelley wrote it.", "Where was she born?", known);
  ASSERT_EQ(r.focus.size(), 1u);
  EXPECT_TRUE(r.focus[0].resolved);
}

}  // namespace
}  // namespace mortar
