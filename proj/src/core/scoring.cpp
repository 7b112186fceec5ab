#include "scoring.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "http.hpp"
#include "json.hpp"
#include "text.hpp"

namespace mortar {

using nlohmann::json;

int ExactMatch(const std::string &pred, const std::string &gold) {
  return text::NormalizeAnswer(pred) == text::NormalizeAnswer(gold) ? 1 : 0;
}

double TokenF1(const std::string &pred, const std::string &gold) {
  std::vector<std::string> p = text::AnswerTokens(pred);
  std::vector<std::string> g = text::AnswerTokens(gold);
  if (p.empty() && g.empty()) return 1.0;
  if (p.empty() || g.empty()) return 0.0;
  std::map<std::string, int> counts;
  for (const std::string &t : g) ++counts[t];
  int common = 0;
  for (const std::string &t : p) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  if (common == 0) return 0.0;
  double precision = static_cast<double>(common) / static_cast<double>(p.size());
  double recall = static_cast<double>(common) / static_cast<double>(g.size());
  return 2 * precision * recall / (precision + recall);
}

MixedScore Mss(const ScoreTriple &t) {
  MixedScore m;
  double total = t.ss + t.em + t.f1;
  if (total <= 0) {
    m.degenerate = true;
    return m;
  }
  m.w_ss = t.ss / total;
  m.w_em = t.em / total;
  m.w_f1 = t.f1 / total;
  m.value = m.w_ss * t.ss + m.w_em * t.em + m.w_f1 * t.f1;
  return m;
}

double Cosine(const Vector &a, const Vector &b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::kInternal, "embedding dimensions differ");
  }
  double dot = 0, na = 0, nb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 && nb == 0) return 1.0;
  if (na == 0 || nb == 0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

size_t HashingEmbedder::Bucket(const std::string &token) {
  return text::Fnv1a64(token) % kDimension;
}

std::vector<Vector> HashingEmbedder::Embed(const std::vector<std::string> &texts) {
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (const std::string &t : texts) {
    Vector v(kDimension, 0.0);
    for (const std::string &tok : text::AnswerTokens(t)) v[Bucket(tok)] += 1.0;
    out.push_back(std::move(v));
  }
  return out;
}

HttpEmbedder::HttpEmbedder(std::string endpoint, double timeout_seconds)
    : endpoint_(std::move(endpoint)), timeout_seconds_(timeout_seconds) {}

std::vector<Vector> HttpEmbedder::Embed(const std::vector<std::string> &texts) {
  if (fallen_back_.load()) {
    ++fallbacks_;
    return fallback_.Embed(texts);
  }
  std::string failure;
  try {
    json body = {{"texts", texts}};
    HttpResponse res = HttpPostJson(endpoint_, "/embed", body.dump(), {}, timeout_seconds_);
    if (res.status != 200) {
      throw Error(ErrorKind::kTransport, "embed HTTP " + std::to_string(res.status));
    }
    auto vectors = json::parse(res.body).at("vectors").get<std::vector<Vector>>();
    if (vectors.size() != texts.size()) {
      throw Error(ErrorKind::kTransport, "embed returned wrong vector count");
    }
    std::lock_guard lock(mu_);
    for (const Vector &v : vectors) {
      if (dimension_ == 0) dimension_ = v.size();
      if (v.size() != dimension_ || v.empty()) {
        throw Error(ErrorKind::kTransport, "embedding dimension changed within a run");
      }
    }
    return vectors;
  } catch (const Error &e) {
    if (e.kind() != ErrorKind::kTransport && e.kind() != ErrorKind::kConfig) throw;
    failure = e.what();
  } catch (const json::exception &e) {
    failure = e.what();
  }
  std::lock_guard lock(mu_);
  if (dimension_ != 0) {
    throw Error(ErrorKind::kTransport, "embedding service failed mid-run: " + failure);
  }
  fallen_back_ = true;
  ++fallbacks_;
  return fallback_.Embed(texts);
}

double SemanticSimilarity(const std::string &pred, const std::string &gold,
                          Embedder &embedder) {
  if (pred == gold) return 1.0;
  std::vector<Vector> v = embedder.Embed({pred, gold});
  return std::clamp(Cosine(v[0], v[1]), 0.0, 1.0);
}

Scorer::Scorer(std::shared_ptr<Embedder> embedder) : embedder_(std::move(embedder)) {}

const Vector &Scorer::EmbeddingOf(const std::string &t) {
  {
    std::lock_guard lock(mu_);
    auto it = cache_.find(t);
    if (it != cache_.end()) return it->second;
  }
  Vector v = embedder_->Embed({t}).at(0);
  std::lock_guard lock(mu_);
  return cache_.emplace(t, std::move(v)).first->second;
}

ScoreTriple Scorer::Score(const std::string &pred, const std::string &gold) {
  ScoreTriple t;
  t.em = ExactMatch(pred, gold);
  t.f1 = TokenF1(pred, gold);
  if (pred == gold) {
    t.ss = 1.0;
  } else {
    const Vector &a = EmbeddingOf(pred);
    const Vector &b = EmbeddingOf(gold);
    t.ss = std::clamp(Cosine(a, b), 0.0, 1.0);
  }
  return t;
}

}  // namespace mortar
