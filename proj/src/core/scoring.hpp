#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace mortar {

struct ScoreTriple {
  double ss = 0;  // semantic cosine, clamped to [0, 1]
  double em = 0;  // 0 or 1
  double f1 = 0;
};

struct MixedScore {
  double value = 0;
  double w_ss = 0;
  double w_em = 0;
  double w_f1 = 0;
  bool degenerate = false;  // SS = EM = F1 = 0
};

int ExactMatch(const std::string &pred, const std::string &gold);

// Token F1 over normalized multisets; both empty -> 1, one empty -> 0.
double TokenF1(const std::string &pred, const std::string &gold);

// Proportionally self-weighted fusion: w_X = X / (SS + EM + F1).
MixedScore Mss(const ScoreTriple &t);

using Vector = std::vector<double>;

// Cosine of two vectors; both zero -> 1, exactly one zero -> 0.
double Cosine(const Vector &a, const Vector &b);

class Embedder {
 public:
  virtual ~Embedder() = default;

  virtual std::vector<Vector> Embed(const std::vector<std::string> &texts) = 0;
  virtual std::string name() const = 0;
};

// Bag of normalized answer tokens hashed into a fixed number of buckets.
class HashingEmbedder : public Embedder {
 public:
  static constexpr size_t kDimension = 256;

  std::vector<Vector> Embed(const std::vector<std::string> &texts) override;
  std::string name() const override { return "hashing-bow-256"; }

  static size_t Bucket(const std::string &token);
};

// Client for POST {endpoint}/embed. If the service fails before answering
// once, the hashing embedder serves the rest of the run; a failure after that
// throws Error(kTransport).
class HttpEmbedder : public Embedder {
 public:
  explicit HttpEmbedder(std::string endpoint, double timeout_seconds = 30.0);

  std::vector<Vector> Embed(const std::vector<std::string> &texts) override;
  std::string name() const override { return "sidecar:" + endpoint_; }

  long fallbacks() const { return fallbacks_.load(); }

 private:
  std::string endpoint_;
  double timeout_seconds_;
  HashingEmbedder fallback_;
  std::atomic<long> fallbacks_{0};
  size_t dimension_ = 0;
  std::atomic<bool> fallen_back_{false};
  std::mutex mu_;
};

// Cosine of the embeddings clamped to [0, 1]; identical strings score 1.
double SemanticSimilarity(const std::string &pred, const std::string &gold,
                          Embedder &embedder);

// Scores answer pairs with one embedder and memoizes embeddings by text.
class Scorer {
 public:
  explicit Scorer(std::shared_ptr<Embedder> embedder);

  ScoreTriple Score(const std::string &pred, const std::string &gold);
  MixedScore Mixed(const std::string &a, const std::string &b) { return Mss(Score(a, b)); }

  const Embedder &embedder() const { return *embedder_; }

 private:
  const Vector &EmbeddingOf(const std::string &text);

  std::shared_ptr<Embedder> embedder_;
  std::mutex mu_;
  std::map<std::string, Vector> cache_;
};

}  // namespace mortar
