#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dialogue.hpp"
#include "json.hpp"
#include "perturbation.hpp"
#include "sut.hpp"

namespace mortar {

// Fully resolved settings shared by all commands.
struct Options {
  std::string dataset;
  DatasetFormat format = DatasetFormat::kGeneric;
  std::vector<PerturbationKind> perturbations = {PerturbationKind::kDS, PerturbationKind::kDR,
                                                 PerturbationKind::kDD, PerturbationKind::kDSR,
                                                 PerturbationKind::kDSD};
  double reduce_ratio = 0.3;
  double duplicate_ratio = 0.2;
  uint64_t seed = 0;

  std::string extractor_endpoint;
  std::string extractor_model = "gpt-4o-mini";
  std::string llm_api_key;
  std::optional<std::string> mock_extractor;  // "builtin" or a fixture file
  std::string templates_dir;

  std::string embedder_endpoint;
  bool fallback_embedder = false;
  std::string coref_endpoint;

  std::string sut_endpoint;
  std::string sut_model;
  std::string sut_api_key;
  std::string sut;  // "mock:<profile>" or empty
  HistoryPolicy history_policy = HistoryPolicy::kSelfGenerated;

  double eps_a = 0.6;
  double eps_b = 0.6;
  bool within_kind = false;
  bool all_bugs = false;  // overlap over every bug instead of critical ones
  bool overlap = false;

  int parallelism = 4;
  std::string out_dir = "mortar-out";
  std::vector<std::string> inputs;
};

// Setting names accepted in config files, by Set and as MORTAR_<NAME> env
// variables.
const std::vector<std::string> &OptionNames();

// Three layers of raw settings. Later layers win: file < env < flags.
class OptionLayers {
 public:
  // Keys of a JSON object file; unknown keys throw Error(kConfig).
  void LoadFile(const std::string &path);
  void SetFileValue(const std::string &key, const nlohmann::json &value);
  // Flag value as typed on the command line.
  void Set(const std::string &key, const std::string &value);
  void AddInput(const std::string &path) { inputs_.push_back(path); }

  using EnvLookup = std::function<std::optional<std::string>(const std::string &)>;
  static EnvLookup ProcessEnv();

  // Throws Error(kConfig) on an unparseable value.
  Options Resolve(const EnvLookup &env = ProcessEnv()) const;

 private:
  nlohmann::json file_ = nlohmann::json::object();
  nlohmann::json flags_ = nlohmann::json::object();
  std::vector<std::string> inputs_;
};

std::vector<PerturbationKind> ParsePerturbationList(std::string_view list);

}  // namespace mortar
