#include "text.hpp"

#include <openssl/evp.h>

#include <cctype>
#include <sstream>

#include "error.hpp"

namespace mortar {

const char *ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kTransport: return "transport";
    case ErrorKind::kMisaligned: return "misaligned";
    case ErrorKind::kInternal: return "internal";
  }
  return "unknown";
}

namespace text {
namespace {

bool IsSpace(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

bool IsAsciiPunct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

bool IsWordChar(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  return std::isalnum(u) || u >= 0x80;
}

}  // namespace

std::string Fold(std::string_view s) {
  std::string out(s);
  for (char &c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string Trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && IsSpace(s[b])) ++b;
  while (e > b && IsSpace(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string CollapseFold(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : Fold(s)) {
    if (IsSpace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::vector<std::string> AnswerTokens(std::string_view s) {
  std::string folded = Fold(s);
  for (char &c : folded) {
    if (IsAsciiPunct(c)) c = ' ';
  }
  std::vector<std::string> tokens;
  std::istringstream in(folded);
  std::string tok;
  while (in >> tok) {
    if (tok == "a" || tok == "an" || tok == "the") continue;
    tokens.push_back(tok);
  }
  return tokens;
}

std::string NormalizeAnswer(std::string_view s) {
  return Join(AnswerTokens(s), " ");
}

std::vector<std::string> Words(std::string_view s) {
  std::vector<std::string> words;
  std::string cur;
  for (size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    bool inner_apostrophe = c == '\'' && !cur.empty() && i + 1 < s.size() &&
                            IsWordChar(s[i + 1]);
    if (IsWordChar(c) || inner_apostrophe) {
      cur.push_back(c);
    } else if (!cur.empty()) {
      words.push_back(Fold(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(Fold(cur));
  return words;
}

bool ContainsPhrase(std::string_view haystack, std::string_view needle) {
  std::vector<std::string> hay = Words(haystack);
  std::vector<std::string> pat = Words(needle);
  if (pat.empty() || pat.size() > hay.size()) return false;
  for (size_t i = 0; i + pat.size() <= hay.size(); ++i) {
    bool match = true;
    for (size_t j = 0; j < pat.size() && match; ++j) match = hay[i + j] == pat[j];
    if (match) return true;
  }
  return false;
}

std::string Sha256Hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw Error(ErrorKind::kInternal, "sha256 digest failed");
  }
  static const char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

uint64_t Fnv1a64(std::string_view data) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string Join(const std::vector<std::string> &parts, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

}  // namespace text
}  // namespace mortar
