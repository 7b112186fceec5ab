// mortar: generate perturbed dialogue tests, run them against a dialogue
// system, detect metamorphic-relation conflicts and report them.

#include <cstdio>
#include <iostream>
#include <list>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mortar/mortar.h"

namespace {

// Exit codes: 0 success, 1 usage or configuration, 2 partial, 3 failure.
int ExitCode(mortar_status s) {
  switch (s) {
    case MORTAR_OK: return 0;
    case MORTAR_USAGE: return 1;
    case MORTAR_PARTIAL: return 2;
    default: return 3;
  }
}

struct Flag {
  std::string key;
  std::string value;
  CLI::Option *option = nullptr;
};

class FlagSet {
 public:
  void Value(CLI::App *app, const std::string &name, const std::string &key,
             const std::string &help) {
    flags_.push_back({key, "", nullptr});
    Flag &f = flags_.back();
    f.option = app->add_option(name, f.value, help);
  }

  void Switch(CLI::App *app, const std::string &name, const std::string &key,
              const std::string &help) {
    flags_.push_back({key, "true", nullptr});
    Flag &f = flags_.back();
    f.option = app->add_flag(name, help);
  }

  CLI::Option *Last() { return flags_.back().option; }

  mortar_status Apply(mortar_options *opts) const {
    for (const Flag &f : flags_) {
      if (f.option->count() == 0) continue;
      mortar_status s = mortar_options_set(opts, f.key.c_str(), f.value.c_str());
      if (s != MORTAR_OK) return s;
    }
    return MORTAR_OK;
  }

 private:
  std::list<Flag> flags_;
};

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Metamorphic testing of multi-turn dialogue systems"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (flags > env > file)");

  std::map<CLI::App *, FlagSet> flags;
  std::map<CLI::App *, std::vector<std::string>> inputs;

  auto common = [&](CLI::App *cmd) {
    FlagSet &f = flags[cmd];
    f.Value(cmd, "--out-dir", "out_dir", "Output directory");
    f.Value(cmd, "--parallelism", "parallelism", "Dialogues processed concurrently");
  };

  CLI::App *gen = app.add_subcommand("generate", "Build annotated perturbed datasets");
  {
    FlagSet &f = flags[gen];
    f.Value(gen, "--dataset", "dataset", "Seed dialogue dataset (JSON)");
    f.Value(gen, "--format", "format", "coqa or generic");
    f.Value(gen, "--perturbations", "perturbations", "Comma list of DS,DR,DD,DSR,DSD,ORIG");
    f.Value(gen, "--reduce-ratio", "reduce_ratio", "Drop probability per round (0.3)");
    f.Value(gen, "--duplicate-ratio", "duplicate_ratio", "Duplicate probability per round (0.2)");
    f.Value(gen, "--seed", "seed", "Run seed");
    f.Value(gen, "--extractor-endpoint", "extractor_endpoint", "Chat-completions base URL");
    CLI::Option *endpoint = f.Last();
    f.Value(gen, "--extractor-model", "extractor_model", "Extraction model name");
    f.Value(gen, "--mock-extractor", "mock_extractor",
            "Offline extractor; optional fixture file");
    f.Last()->expected(0, 1)->excludes(endpoint);
    f.Value(gen, "--templates-dir", "templates_dir", "Prompt template overrides");
    f.Value(gen, "--coref-endpoint", "coref_endpoint", "Coreference service base URL");
    common(gen);
  }

  CLI::App *run = app.add_subcommand("run", "Drive a system under test through annotated datasets");
  {
    FlagSet &f = flags[run];
    run->add_option("inputs", inputs[run], "Annotated dataset files or generate directories")
        ->required();
    f.Value(run, "--sut-endpoint", "sut_endpoint", "Chat-completions base URL of the SUT");
    CLI::Option *endpoint = f.Last();
    f.Value(run, "--sut-model", "sut_model", "SUT model name");
    f.Value(run, "--sut", "sut", "mock:<oracle|amnesiac:K|stubborn|parrot|random_token>");
    f.Last()->excludes(endpoint);
    f.Value(run, "--history-policy", "history_policy", "self_generated or gold");
    common(run);
  }

  CLI::App *det = app.add_subcommand("detect", "Find MR conflicts in transcripts");
  {
    FlagSet &f = flags[det];
    det->add_option("inputs", inputs[det], "Transcript files or run directories")->required();
    f.Value(det, "--eps-a", "eps_a", "MR1 threshold (0.6)");
    f.Value(det, "--eps-b", "eps_b", "MR2/MR3 threshold (0.6)");
    f.Switch(det, "--within-kind", "within_kind", "Compare MR2/MR3 pairs within one kind only");
    f.Value(det, "--embedder-endpoint", "embedder_endpoint", "Embedding service base URL");
    CLI::Option *endpoint = f.Last();
    f.Switch(det, "--fallback-embedder", "fallback_embedder", "Use the hashing embedder");
    f.Last()->excludes(endpoint);
    common(det);
  }

  CLI::App *rep = app.add_subcommand("report", "Tables and bug overlaps from artifacts");
  {
    FlagSet &f = flags[rep];
    rep->add_option("inputs", inputs[rep], "generate and detect output directories")->required();
    f.Switch(rep, "--overlap", "overlap", "Venn counts of unique bugs across inputs");
    f.Switch(rep, "--all-bugs", "all_bugs", "Overlap over all bugs, not only critical ones");
    f.Value(rep, "--out-dir", "out_dir", "Output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 1;
  }

  CLI::App *cmd = app.get_subcommands().front();
  mortar_options *opts = mortar_options_create();
  if (!opts) return 3;
  mortar_status s = MORTAR_OK;
  if (!config_path.empty()) s = mortar_options_load_file(opts, config_path.c_str());
  if (s == MORTAR_OK) s = flags[cmd].Apply(opts);
  for (const std::string &in : inputs[cmd]) {
    if (s == MORTAR_OK) s = mortar_options_add_input(opts, in.c_str());
  }
  if (s == MORTAR_OK) s = mortar_options_validate(opts);
  if (s != MORTAR_OK) {
    std::cerr << "mortar: " << mortar_last_error() << "\n";
    mortar_options_destroy(opts);
    return s == MORTAR_IO ? 1 : ExitCode(s);
  }

  mortar_result *result = nullptr;
  if (cmd == gen) s = mortar_generate(opts, &result);
  else if (cmd == run) s = mortar_run(opts, &result);
  else if (cmd == det) s = mortar_detect(opts, &result);
  else s = mortar_report(opts, &result);

  if (result) std::cout << mortar_result_text(result);
  if (s != MORTAR_OK) std::cerr << "mortar: " << mortar_last_error() << "\n";
  mortar_result_destroy(result);
  mortar_options_destroy(opts);
  return ExitCode(s);
}
