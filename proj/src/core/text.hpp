#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mortar::text {

// ASCII case fold; bytes >= 0x80 pass through untouched.
std::string Fold(std::string_view s);

// Trims ASCII whitespace from both ends.
std::string Trim(std::string_view s);

// Case-folds and collapses runs of whitespace to one space.
std::string CollapseFold(std::string_view s);

// Extractive-QA answer normalization: lower case, punctuation removed,
// articles a/an/the dropped, whitespace collapsed.
std::string NormalizeAnswer(std::string_view s);

// Whitespace tokens of NormalizeAnswer(s).
std::vector<std::string> AnswerTokens(std::string_view s);

// Lower-cased alphanumeric word tokens, apostrophes kept inside words.
std::vector<std::string> Words(std::string_view s);

// True when `needle` occurs in `haystack` on word boundaries, case-insensitive.
bool ContainsPhrase(std::string_view haystack, std::string_view needle);

std::string Sha256Hex(std::string_view data);

uint64_t Fnv1a64(std::string_view data);

std::string Join(const std::vector<std::string> &parts, std::string_view sep);

}  // namespace mortar::text
