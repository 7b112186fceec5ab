#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dialogue.hpp"
#include "json.hpp"

namespace mortar {

// kOriginal is the identity transform; it lets the unperturbed dialogue run
// through the same pipeline as the five dialogue-level perturbations.
enum class PerturbationKind { kOriginal, kDS, kDR, kDD, kDSR, kDSD };

const char *PerturbationKindName(PerturbationKind kind);
PerturbationKind ParsePerturbationKind(std::string_view name);  // case-insensitive

struct PerturbationConfig {
  PerturbationKind kind = PerturbationKind::kDS;
  double reduce_ratio = 0.3;
  double duplicate_ratio = 0.2;
  uint64_t seed = 0;
};

// Throws Error(kConfig) unless both ratios lie strictly inside (0, 1).
void ValidatePerturbationConfig(const PerturbationConfig &config);

struct RoundProvenance {
  int new_index = 0;     // 1-based position in the perturbed sequence
  int origin_index = 0;  // 1-based position in the original dialogue
  bool duplicated = false;

  bool operator==(const RoundProvenance &) const = default;
};

struct PerturbedRound {
  RoundProvenance provenance;
  std::string question;

  bool operator==(const PerturbedRound &) const = default;
};

struct PerturbedDialogue {
  std::string source;  // dialogue_id of the seed dialogue
  PerturbationKind kind = PerturbationKind::kOriginal;
  uint64_t seed = 0;
  std::vector<PerturbedRound> rounds;

  int length() const { return static_cast<int>(rounds.size()); }
  bool operator==(const PerturbedDialogue &) const = default;
};

// Name of the generator recorded next to seeds in output files.
inline constexpr const char *kGeneratorName = "mt19937_64/splitmix64";

// SplitMix64 finalizer; used to derive independent sub-seeds.
uint64_t MixSeed(uint64_t value);

// Seed for one dialogue under a run seed.
uint64_t DialogueSeed(uint64_t run_seed, std::string_view dialogue_id);

// Seed used by the second stage of DSR / DSD given the stage-one seed.
uint64_t SecondStageSeed(uint64_t seed);

PerturbedDialogue Identity(const Dialogue &dialogue);

PerturbedDialogue Shuffle(const Dialogue &dialogue, uint64_t seed);

// Each upstream round is dropped independently with probability `ratio`;
// if every round is dropped the draw is repeated.
PerturbedDialogue Reduce(const PerturbedDialogue &upstream, double ratio,
                         uint64_t seed);
PerturbedDialogue Reduce(const Dialogue &dialogue, double ratio, uint64_t seed);

// Each upstream round is selected independently with probability `ratio` and
// re-inserted once at a uniform position strictly after its occurrence.
PerturbedDialogue Duplicate(const PerturbedDialogue &upstream, double ratio,
                            uint64_t seed);
PerturbedDialogue Duplicate(const Dialogue &dialogue, double ratio,
                            uint64_t seed);

// Dispatch on config.kind; DSR = Reduce(Shuffle), DSD = Duplicate(Shuffle),
// with the second stage seeded by SecondStageSeed(config.seed).
PerturbedDialogue Apply(const PerturbationConfig &config,
                        const Dialogue &dialogue);

// Builds a perturbed dialogue from an explicit origin sequence. Later
// repeats of an origin are marked duplicated.
PerturbedDialogue FromOrigins(const Dialogue &dialogue, PerturbationKind kind,
                              const std::vector<int> &origins);

nlohmann::json ToJson(const PerturbedDialogue &pd);
PerturbedDialogue PerturbedFromJson(const nlohmann::json &j);

}  // namespace mortar
