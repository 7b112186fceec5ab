#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "scoring.hpp"
#include "sut.hpp"
#include "text.hpp"

namespace mortar {
namespace {

TEST(ExactMatchTest, Examples) {
  EXPECT_EQ(ExactMatch("India", "india"), 1);
  EXPECT_EQ(ExactMatch("the India", "India"), 1);
  EXPECT_EQ(ExactMatch("India.", "  India "), 1);
  EXPECT_EQ(ExactMatch("in India", "India"), 0);
}

TEST(TokenF1Test, Examples) {
  EXPECT_DOUBLE_EQ(TokenF1("India", "India"), 1.0);
  EXPECT_NEAR(TokenF1("in India", "India"), 2.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(TokenF1("unknown", "India"), 0.0);
  EXPECT_DOUBLE_EQ(TokenF1("", "the"), 1.0);
  EXPECT_DOUBLE_EQ(TokenF1("", "India"), 0.0);
  // Multiset overlap: "a a b" vs "a b b" shares two tokens.
  EXPECT_NEAR(TokenF1("x x y", "x y y"), 2.0 / 3.0, 1e-12);
}

TEST(MssTest, Examples) {
  EXPECT_DOUBLE_EQ(Mss({1, 1, 1}).value, 1.0);
  EXPECT_DOUBLE_EQ(Mss({.5, .5, .5}).value, 0.5);
  EXPECT_NEAR(Mss({.8, 0, .5}).value, 0.89 / 1.3, 1e-12);
  MixedScore zero = Mss({0, 0, 0});
  EXPECT_TRUE(zero.degenerate);
  EXPECT_EQ(zero.value, 0);
  EXPECT_EQ(zero.w_ss + zero.w_em + zero.w_f1, 0);
}

TEST(MssTest, Properties) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 5000; ++i) {
    ScoreTriple t{u(rng), static_cast<double>(rng() % 2), u(rng)};
    MixedScore m = Mss(t);
    double mx = std::max({t.ss, t.em, t.f1});
    double sum = t.ss + t.em + t.f1;
    EXPECT_NEAR(m.w_ss + m.w_em + m.w_f1, 1.0, 1e-12);
    EXPECT_NEAR(m.value, m.w_ss * t.ss + m.w_em * t.em + m.w_f1 * t.f1, 1e-12);
    EXPECT_LE(m.value, mx + 1e-12);
    EXPECT_GE(m.value, mx * mx / sum - 1e-12);
    EXPECT_NEAR(Mss({t.f1, t.ss, t.em}).value, m.value, 1e-12);
    EXPECT_NEAR(Mss({t.em, t.f1, t.ss}).value, m.value, 1e-12);
  }
}

TEST(CosineTest, EdgeCases) {
  EXPECT_DOUBLE_EQ(Cosine({0, 0}, {0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(Cosine({0, 0}, {1, 0}), 0.0);
  EXPECT_NEAR(Cosine({1, 0}, {-1, 0}), -1.0, 1e-12);
  EXPECT_THROW(Cosine({1}, {1, 0}), std::exception);
}

TEST(SemanticSimilarityTest, HashingEmbedder) {
  HashingEmbedder e;
  EXPECT_DOUBLE_EQ(SemanticSimilarity("abc", "abc", e), 1.0);
  EXPECT_DOUBLE_EQ(SemanticSimilarity("India", "India", e), 1.0);
  ASSERT_NE(HashingEmbedder::Bucket("india"), HashingEmbedder::Bucket("britain"));
  EXPECT_DOUBLE_EQ(SemanticSimilarity("India", "Britain", e), 0.0);
  double partial = SemanticSimilarity("India", "India is the country", e);
  EXPECT_GT(partial, 0.0);
  EXPECT_LT(partial, 1.0);
}

TEST(SemanticSimilarityTest, ClampsNegativeCosine) {
  class Opposite : public Embedder {
   public:
    std::vector<Vector> Embed(const std::vector<std::string> &texts) override {
      std::vector<Vector> out;
      for (const auto &t : texts) out.push_back(t == "a" ? Vector{1, 0} : Vector{-1, 0});
      return out;
    }
    std::string name() const override { return "opposite"; }
  } e;
  EXPECT_DOUBLE_EQ(SemanticSimilarity("a", "b", e), 0.0);
}

// The mock SUT vocabulary must not share a hashing bucket with "unknown",
// otherwise a stubborn answer could pass MR1 on an unanswerable round.
TEST(SemanticSimilarityTest, MockVocabularyIsDisjointFromUnknown) {
  size_t unknown = HashingEmbedder::Bucket("unknown");
  for (const std::string &w : MockVocabulary()) {
    for (const std::string &tok : text::AnswerTokens(w)) {
      EXPECT_NE(HashingEmbedder::Bucket(tok), unknown) << w;
    }
  }
}

TEST(ScorerTest, ReflexiveAndWordyPenalty) {
  Scorer s(std::make_shared<HashingEmbedder>());
  ScoreTriple same = s.Score("Shen Nong", "Shen Nong");
  EXPECT_EQ(same.em, 1);
  EXPECT_DOUBLE_EQ(same.f1, 1.0);
  EXPECT_DOUBLE_EQ(same.ss, 1.0);
  std::string pred = "India";
  double last_f1 = 1.0;
  for (const char *extra : {"grows", "most", "tea", "leaves"}) {
    pred += std::string(" ") + extra;
    ScoreTriple t = s.Score(pred, "India");
    EXPECT_EQ(t.em, 0);
    EXPECT_LT(t.f1, last_f1);
    EXPECT_LT(Mss({same.ss, t.em, t.f1}).value, 1.0);
    last_f1 = t.f1;
  }
}

}  // namespace
}  // namespace mortar
