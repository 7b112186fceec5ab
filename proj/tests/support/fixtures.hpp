#pragma once

#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "answerability.hpp"
#include "dialogue.hpp"
#include "extraction.hpp"
#include "info_graph.hpp"
#include "perturbation.hpp"

namespace mortar::testing {

std::string FixturePath(const std::string &name);

using Ref = std::pair<std::string, std::string>;  // (type, name)

struct RelRef {
  Ref source;
  Ref target;
  std::string description;
};

InfoGraph Graph(const std::vector<Ref> &entities, const std::vector<RelRef> &relations = {});

Dialogue MakeDialogue(const std::string &id,
                      const std::vector<std::pair<std::string, std::string>> &qa,
                      std::optional<std::string> story = std::nullopt);

// Round with hand-authored graphs.
struct ScriptedRound {
  std::string question;
  std::string answer;
  InfoGraph question_graph;
  InfoGraph full_graph;
  InfoGraph answer_graph;
};

struct ScriptedDialogue {
  Dialogue dialogue;
  DialogueExtraction extraction;
};

ScriptedDialogue Scripted(const std::string &id, const std::vector<ScriptedRound> &rounds,
                          std::optional<std::string> story = std::nullopt);

// The tea dialogue and its extraction through the mock extractor fixture.
Dialogue TeaDialogue();
DialogueExtraction TeaExtraction();

// Shelley dialogue: round 2 uses "she" for the answer of round 1; rounds 2
// and 3 share the gold answer "London".
ScriptedDialogue ShelleyDialogue();

// Four rounds where round 4 refers back three rounds.
ScriptedDialogue ChainDialogue();

// Small corpus used by the end-to-end defect injection checks.
std::vector<ScriptedDialogue> DefectCorpus();

AnnotatedDialogue AnnotateOrigins(const Dialogue &d, const DialogueExtraction &x,
                                  PerturbationKind kind, const std::vector<int> &origins);

// Random dialogue with distinct question texts "q<i> ...".
Dialogue RandomDialogue(std::mt19937_64 &rng, int rounds, const std::string &id);

// Plain string-set view of a graph used by the independent oracles below.
struct FlatGraph {
  std::set<std::string> entities;                         // "type|name"
  std::set<std::tuple<std::string, std::string, std::string>> relations;
};

FlatGraph Flatten(const InfoGraph &g);

// Brute-force ontology verdict: equal graphs -> self_resolvable; every
// missing entity and relation (relation: key present or both endpoints
// present) found in context -> context_resolved; otherwise unresolved.
VerdictStatus BruteForceOntology(const FlatGraph &question, const FlatGraph &full,
                                 const FlatGraph &context);

// Smallest number of immediately preceding contributions that covers the
// missing part of round `position` (1-based), by direct enumeration.
std::optional<int> BruteForceAntecedentDistance(const std::vector<FlatGraph> &contributions,
                                                int position, const FlatGraph &question,
                                                const FlatGraph &full);

struct OntologyCase {
  InfoGraph question;
  InfoGraph full;
  std::vector<InfoGraph> prior;  // per-round context contributions
};

OntologyCase RandomOntologyCase(std::mt19937_64 &rng);

}  // namespace mortar::testing
