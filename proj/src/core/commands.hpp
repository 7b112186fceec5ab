#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "answerability.hpp"
#include "chat.hpp"
#include "config.hpp"
#include "coref.hpp"
#include "json.hpp"
#include "scoring.hpp"
#include "sut.hpp"

namespace mortar {

enum class CommandStatus { kOk, kPartial, kFailed };

struct CommandResult {
  CommandStatus status = CommandStatus::kOk;
  std::string text;          // human-readable summary
  nlohmann::json details;    // the manifest written by the command
};

// Reads the dataset, extracts each valid dialogue (through the extraction and
// LLM caches under out_dir), and writes one annotated file per perturbation
// kind plus manifest.json.
CommandResult Generate(const Options &options);
// Drives the SUT through every annotated dataset in options.inputs and writes
// out_dir/transcript.jsonl.
CommandResult RunSut(const Options &options);
// Scores transcripts and writes bugs.jsonl, summary.json, summary.txt and
// summary.csv.
CommandResult DetectBugs(const Options &options);
// Builds tables (and overlaps) from generate and detect output directories.
CommandResult Report(const Options &options);

std::shared_ptr<ChatClient> MakeExtractorClient(const Options &options);
std::shared_ptr<Embedder> MakeEmbedder(const Options &options);
std::shared_ptr<CoreferenceClient> MakeCoref(const Options &options);
std::unique_ptr<Responder> MakeResponder(const Options &options, SutConfig *config);

struct AnnotationOptions {
  std::vector<PerturbationKind> kinds;
  double reduce_ratio = 0.3;
  double duplicate_ratio = 0.2;
  uint64_t seed = 0;
};

// Perturbs and annotates one seed dialogue under every requested kind.
std::map<PerturbationKind, AnnotatedDialogue> AnnotateDialogue(
    const Dialogue &dialogue, const DialogueExtraction &extraction,
    const AnnotationOptions &options, CoreferenceClient &resolver);

}  // namespace mortar
