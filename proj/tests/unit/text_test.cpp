#include "text.hpp"

#include <gtest/gtest.h>

namespace mortar::text {
namespace {

TEST(TextTest, FoldAndCollapse) {
  EXPECT_EQ(Fold("Shen NONG"), "shen nong");
  EXPECT_EQ(CollapseFold("  Shen \t  Nong "), "shen nong");
  EXPECT_EQ(Trim("\n x y \t"), "x y");
}

TEST(TextTest, NormalizeAnswerDropsArticlesAndPunctuation) {
  EXPECT_EQ(NormalizeAnswer("The  Seine!"), "seine");
  EXPECT_EQ(NormalizeAnswer("An apple, a pear."), "apple pear");
  EXPECT_EQ(AnswerTokens("the Tower of London").size(), 3u);
}

TEST(TextTest, ContainsPhraseRespectsWordBoundaries) {
  EXPECT_TRUE(ContainsPhrase("Who discovered Tea first?", "tea"));
  EXPECT_FALSE(ContainsPhrase("Who likes teapots?", "tea"));
  EXPECT_TRUE(ContainsPhrase("Shen Nong took it", "shen nong"));
}

TEST(TextTest, Sha256KnownVector) {
  EXPECT_EQ(Sha256Hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(TextTest, Fnv1aKnownVector) {
  EXPECT_EQ(Fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(Fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

}  // namespace
}  // namespace mortar::text
