#include "perturbation.hpp"

#include <algorithm>
#include <random>

#include "error.hpp"
#include "text.hpp"

namespace mortar {

using nlohmann::json;

const char *PerturbationKindName(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::kOriginal: return "ORIG";
    case PerturbationKind::kDS: return "DS";
    case PerturbationKind::kDR: return "DR";
    case PerturbationKind::kDD: return "DD";
    case PerturbationKind::kDSR: return "DSR";
    case PerturbationKind::kDSD: return "DSD";
  }
  return "?";
}

PerturbationKind ParsePerturbationKind(std::string_view name) {
  std::string n = text::Fold(name);
  if (n == "orig" || n == "original") return PerturbationKind::kOriginal;
  if (n == "ds") return PerturbationKind::kDS;
  if (n == "dr") return PerturbationKind::kDR;
  if (n == "dd") return PerturbationKind::kDD;
  if (n == "dsr") return PerturbationKind::kDSR;
  if (n == "dsd") return PerturbationKind::kDSD;
  throw Error(ErrorKind::kConfig,
              "unknown perturbation kind '" + std::string(name) + "'");
}

void ValidatePerturbationConfig(const PerturbationConfig &config) {
  auto in_open_unit = [](double r) { return r > 0.0 && r < 1.0; };
  if (!in_open_unit(config.reduce_ratio)) {
    throw Error(ErrorKind::kConfig, "reduce ratio must lie in (0,1)");
  }
  if (!in_open_unit(config.duplicate_ratio)) {
    throw Error(ErrorKind::kConfig, "duplicate ratio must lie in (0,1)");
  }
}

uint64_t MixSeed(uint64_t value) {
  uint64_t z = value + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t DialogueSeed(uint64_t run_seed, std::string_view dialogue_id) {
  return MixSeed(run_seed ^ MixSeed(text::Fnv1a64(dialogue_id)));
}

uint64_t SecondStageSeed(uint64_t seed) { return MixSeed(seed ^ 0x5eed2ULL); }

namespace {

class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(MixSeed(seed)) {}

  // Uniform in [0, 1) from the top 53 bits.
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool Bernoulli(double p) { return Uniform() < p; }

  // Uniform integer in [lo, hi].
  size_t Between(size_t lo, size_t hi) {
    return std::uniform_int_distribution<size_t>(lo, hi)(engine_);
  }

 private:
  std::mt19937_64 engine_;
};

void Renumber(PerturbedDialogue &pd) {
  for (size_t i = 0; i < pd.rounds.size(); ++i) {
    pd.rounds[i].provenance.new_index = static_cast<int>(i) + 1;
  }
}

}  // namespace

PerturbedDialogue Identity(const Dialogue &dialogue) {
  PerturbedDialogue pd;
  pd.source = dialogue.dialogue_id;
  pd.kind = PerturbationKind::kOriginal;
  for (const QARound &r : dialogue.rounds) {
    pd.rounds.push_back({{0, r.index, false}, r.question});
  }
  Renumber(pd);
  return pd;
}

PerturbedDialogue Shuffle(const Dialogue &dialogue, uint64_t seed) {
  PerturbedDialogue pd = Identity(dialogue);
  pd.kind = PerturbationKind::kDS;
  pd.seed = seed;
  Rng rng(seed);
  // Fisher-Yates.
  for (size_t i = pd.rounds.size(); i > 1; --i) {
    std::swap(pd.rounds[i - 1], pd.rounds[rng.Between(0, i - 1)]);
  }
  Renumber(pd);
  return pd;
}

PerturbedDialogue Reduce(const PerturbedDialogue &upstream, double ratio,
                         uint64_t seed) {
  PerturbedDialogue pd;
  pd.source = upstream.source;
  pd.kind = upstream.kind == PerturbationKind::kDS ? PerturbationKind::kDSR
                                                   : PerturbationKind::kDR;
  pd.seed = upstream.kind == PerturbationKind::kDS ? upstream.seed : seed;
  if (upstream.rounds.empty()) return pd;
  Rng rng(seed);
  while (pd.rounds.empty()) {
    for (const PerturbedRound &r : upstream.rounds) {
      if (!rng.Bernoulli(ratio)) pd.rounds.push_back(r);
    }
  }
  Renumber(pd);
  return pd;
}

PerturbedDialogue Reduce(const Dialogue &dialogue, double ratio,
                         uint64_t seed) {
  return Reduce(Identity(dialogue), ratio, seed);
}

PerturbedDialogue Duplicate(const PerturbedDialogue &upstream, double ratio,
                            uint64_t seed) {
  PerturbedDialogue pd;
  pd.source = upstream.source;
  pd.kind = upstream.kind == PerturbationKind::kDS ? PerturbationKind::kDSD
                                                   : PerturbationKind::kDD;
  pd.seed = upstream.kind == PerturbationKind::kDS ? upstream.seed : seed;
  pd.rounds = upstream.rounds;
  std::vector<bool> inserted(pd.rounds.size(), false);
  Rng rng(seed);
  // Walk the upstream rounds in order; `pos` tracks where each one currently
  // sits in the growing output.
  size_t pos = 0;
  for (size_t i = 0; i < upstream.rounds.size(); ++i) {
    while (inserted[pos]) ++pos;
    if (rng.Bernoulli(ratio)) {
      PerturbedRound copy = upstream.rounds[i];
      copy.provenance.duplicated = true;
      auto slot = static_cast<std::ptrdiff_t>(rng.Between(pos + 1, pd.rounds.size()));
      pd.rounds.insert(pd.rounds.begin() + slot, std::move(copy));
      inserted.insert(inserted.begin() + slot, true);
    }
    ++pos;
  }
  Renumber(pd);
  return pd;
}

PerturbedDialogue Duplicate(const Dialogue &dialogue, double ratio,
                            uint64_t seed) {
  return Duplicate(Identity(dialogue), ratio, seed);
}

PerturbedDialogue Apply(const PerturbationConfig &config,
                        const Dialogue &dialogue) {
  ValidatePerturbationConfig(config);
  switch (config.kind) {
    case PerturbationKind::kOriginal: {
      PerturbedDialogue pd = Identity(dialogue);
      pd.seed = config.seed;
      return pd;
    }
    case PerturbationKind::kDS:
      return Shuffle(dialogue, config.seed);
    case PerturbationKind::kDR:
      return Reduce(dialogue, config.reduce_ratio, config.seed);
    case PerturbationKind::kDD:
      return Duplicate(dialogue, config.duplicate_ratio, config.seed);
    case PerturbationKind::kDSR:
      return Reduce(Shuffle(dialogue, config.seed), config.reduce_ratio,
                    SecondStageSeed(config.seed));
    case PerturbationKind::kDSD:
      return Duplicate(Shuffle(dialogue, config.seed), config.duplicate_ratio,
                       SecondStageSeed(config.seed));
  }
  throw Error(ErrorKind::kConfig, "unknown perturbation kind");
}

PerturbedDialogue FromOrigins(const Dialogue &dialogue, PerturbationKind kind,
                              const std::vector<int> &origins) {
  PerturbedDialogue pd;
  pd.source = dialogue.dialogue_id;
  pd.kind = kind;
  std::vector<int> seen;
  for (int origin : origins) {
    const QARound *r = dialogue.Round(origin);
    if (r == nullptr) {
      throw Error(ErrorKind::kInternal, "origin " + std::to_string(origin) +
                                            " not in dialogue " +
                                            dialogue.dialogue_id);
    }
    bool dup = std::find(seen.begin(), seen.end(), origin) != seen.end();
    seen.push_back(origin);
    pd.rounds.push_back({{0, origin, dup}, r->question});
  }
  Renumber(pd);
  return pd;
}

json ToJson(const PerturbedDialogue &pd) {
  json rounds = json::array();
  for (const PerturbedRound &r : pd.rounds) {
    rounds.push_back({{"new_index", r.provenance.new_index},
                      {"origin_index", r.provenance.origin_index},
                      {"duplicated", r.provenance.duplicated},
                      {"question", r.question}});
  }
  return {{"source_dialogue_id", pd.source},
          {"kind", PerturbationKindName(pd.kind)},
          {"seed", pd.seed},
          {"rounds", rounds}};
}

PerturbedDialogue PerturbedFromJson(const json &j) {
  PerturbedDialogue pd;
  try {
    pd.source = j.at("source_dialogue_id").get<std::string>();
    pd.kind = ParsePerturbationKind(j.at("kind").get<std::string>());
    pd.seed = j.at("seed").get<uint64_t>();
    for (const json &r : j.at("rounds")) {
      pd.rounds.push_back({{r.at("new_index").get<int>(),
                            r.at("origin_index").get<int>(),
                            r.at("duplicated").get<bool>()},
                           r.at("question").get<std::string>()});
    }
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kParse,
                std::string("perturbed dialogue: ") + e.what());
  }
  return pd;
}

}  // namespace mortar
