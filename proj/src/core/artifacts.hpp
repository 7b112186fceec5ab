#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "answerability.hpp"
#include "extraction.hpp"
#include "json.hpp"
#include "mr_oracle.hpp"

namespace mortar {

namespace fs = std::filesystem;

std::string ReadTextFile(const fs::path &path);
// Writes through a temporary file and a rename.
void WriteTextFile(const fs::path &path, const std::string &content);

struct AnnotatedDataset {
  PerturbationKind kind = PerturbationKind::kOriginal;
  nlohmann::json manifest = nlohmann::json::object();
  std::vector<AnnotatedDialogue> dialogues;
};

// File layout: {"manifest": {...}, "kind": "DS", "dialogues": [...]}.
void WriteAnnotatedDataset(const fs::path &path, const AnnotatedDataset &dataset);
AnnotatedDataset ReadAnnotatedDataset(const fs::path &path);
// "<KIND>.json" inside an output directory.
fs::path AnnotatedDatasetPath(const fs::path &dir, PerturbationKind kind);

// JSON lines: a {"manifest": ...} header, then one RoundOutcome per line.
struct Transcript {
  nlohmann::json manifest = nlohmann::json::object();
  std::vector<RoundOutcome> outcomes;
};

void WriteTranscript(const fs::path &path, const Transcript &transcript);
Transcript ReadTranscript(const fs::path &path);

void WriteBugs(const fs::path &path, const std::vector<BugRecord> &bugs);
std::vector<BugRecord> ReadBugs(const fs::path &path);

// Per-dialogue extraction results keyed by a content hash, so a warm rerun
// reaches neither the LLM nor its response cache.
class ExtractionCache {
 public:
  explicit ExtractionCache(fs::path directory);

  std::optional<DialogueExtraction> Get(const std::string &key) const;
  void Put(const std::string &key, const DialogueExtraction &extraction);

 private:
  fs::path PathOf(const std::string &key) const;

  fs::path directory_;
};

}  // namespace mortar
