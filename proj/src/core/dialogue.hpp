#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace mortar {

struct QARound {
  int index = 0;  // 1-based
  std::string question;
  std::string gold_answer;
};

struct Dialogue {
  std::string dialogue_id;
  std::vector<QARound> rounds;
  std::optional<std::string> story;

  // Round with the given 1-based index, or nullptr.
  const QARound *Round(int index) const;
};

struct Dataset {
  std::vector<Dialogue> dialogues;
  std::string source_label;

  const Dialogue *Find(std::string_view dialogue_id) const;
};

enum class DatasetFormat { kCoqa, kGeneric };

DatasetFormat ParseDatasetFormat(std::string_view name);

// Throws Error(kParse) with the byte offset for malformed JSON, and
// Error(kValidation) naming every record that cannot be paired or is empty.
Dataset ParseDataset(std::string_view raw, DatasetFormat format,
                     std::string source_label = "");

Dataset LoadDataset(const std::string &path, DatasetFormat format);

// Generic-format JSON for a dataset; ParseDataset(kGeneric) inverts it.
nlohmann::json SerializeGeneric(const Dataset &dataset);

enum class IssueKind { kEmptyQuestion, kNonContiguous, kDuplicateIndex, kNoRounds };

const char *IssueKindName(IssueKind kind);

struct ValidationIssue {
  IssueKind kind;
  int round = 0;  // 0 when the issue is dialogue-wide

  bool operator==(const ValidationIssue &) const = default;
};

struct ValidationReport {
  std::string dialogue_id;
  std::vector<ValidationIssue> issues;

  bool ok() const { return issues.empty(); }
};

ValidationReport ValidateDialogue(const Dialogue &dialogue);

}  // namespace mortar
