#include "mortar/mortar.h"

#include <memory>
#include <string>

#include "commands.hpp"
#include "config.hpp"
#include "dialogue.hpp"
#include "error.hpp"
#include "scoring.hpp"

struct mortar_options {
  mortar::OptionLayers layers;
};

struct mortar_result {
  std::string text;
  std::string json;
};

struct mortar_dataset {
  mortar::Dataset dataset;
  std::string json;
};

namespace {

thread_local std::string g_last_error;

mortar_status StatusOf(mortar::ErrorKind kind) {
  switch (kind) {
    case mortar::ErrorKind::kConfig: return MORTAR_USAGE;
    case mortar::ErrorKind::kParse:
    case mortar::ErrorKind::kValidation: return MORTAR_PARSE;
    case mortar::ErrorKind::kIo: return MORTAR_IO;
    case mortar::ErrorKind::kTransport: return MORTAR_TRANSPORT;
    case mortar::ErrorKind::kMisaligned:
    case mortar::ErrorKind::kInternal: return MORTAR_INTERNAL;
  }
  return MORTAR_INTERNAL;
}

template <typename F>
mortar_status Guard(F &&f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const mortar::Error &e) {
    g_last_error = std::string(mortar::ErrorKindName(e.kind())) + ": " + e.what();
    return StatusOf(e.kind());
  } catch (const std::bad_alloc &) {
    g_last_error = "out of memory";
    return MORTAR_INTERNAL;
  } catch (const std::exception &e) {
    g_last_error = std::string("internal: ") + e.what();
    return MORTAR_INTERNAL;
  }
}

mortar_status Missing(const char *what) {
  g_last_error = std::string("null argument: ") + what;
  return MORTAR_USAGE;
}

mortar_status RunCommand(const mortar_options *opts, mortar_result **out,
                         mortar::CommandResult (*command)(const mortar::Options &)) {
  if (out) *out = nullptr;
  if (!opts) return Missing("options");
  return Guard([&] {
    mortar::CommandResult r = command(opts->layers.Resolve());
    if (out) *out = new mortar_result{r.text, r.details.dump(2)};
    switch (r.status) {
      case mortar::CommandStatus::kOk: return MORTAR_OK;
      case mortar::CommandStatus::kPartial:
        g_last_error = "some dialogues failed";
        return MORTAR_PARTIAL;
      case mortar::CommandStatus::kFailed:
        g_last_error = "no dialogue completed";
        return MORTAR_FAILED;
    }
    return MORTAR_INTERNAL;
  });
}

}  // namespace

extern "C" {

const char *mortar_last_error(void) { return g_last_error.c_str(); }

const char *mortar_version(void) { return "0.1.0"; }

mortar_options *mortar_options_create(void) {
  try {
    return new mortar_options;
  } catch (...) {
    g_last_error = "out of memory";
    return nullptr;
  }
}

void mortar_options_destroy(mortar_options *opts) { delete opts; }

mortar_status mortar_options_set(mortar_options *opts, const char *key, const char *value) {
  if (!opts) return Missing("options");
  if (!key || !value) return Missing("key/value");
  return Guard([&] {
    opts->layers.Set(key, value);
    return MORTAR_OK;
  });
}

mortar_status mortar_options_load_file(mortar_options *opts, const char *path) {
  if (!opts) return Missing("options");
  if (!path) return Missing("path");
  return Guard([&] {
    opts->layers.LoadFile(path);
    return MORTAR_OK;
  });
}

mortar_status mortar_options_add_input(mortar_options *opts, const char *path) {
  if (!opts) return Missing("options");
  if (!path) return Missing("path");
  return Guard([&] {
    opts->layers.AddInput(path);
    return MORTAR_OK;
  });
}

mortar_status mortar_options_validate(const mortar_options *opts) {
  if (!opts) return Missing("options");
  return Guard([&] {
    opts->layers.Resolve();
    return MORTAR_OK;
  });
}

mortar_status mortar_generate(const mortar_options *opts, mortar_result **out) {
  return RunCommand(opts, out, &mortar::Generate);
}

mortar_status mortar_run(const mortar_options *opts, mortar_result **out) {
  return RunCommand(opts, out, &mortar::RunSut);
}

mortar_status mortar_detect(const mortar_options *opts, mortar_result **out) {
  return RunCommand(opts, out, &mortar::DetectBugs);
}

mortar_status mortar_report(const mortar_options *opts, mortar_result **out) {
  return RunCommand(opts, out, &mortar::Report);
}

const char *mortar_result_text(const mortar_result *result) {
  return result ? result->text.c_str() : "";
}

const char *mortar_result_json(const mortar_result *result) {
  return result ? result->json.c_str() : "{}";
}

void mortar_result_destroy(mortar_result *result) { delete result; }

mortar_status mortar_dataset_load(const char *path, const char *format, mortar_dataset **out) {
  if (!out) return Missing("out");
  *out = nullptr;
  if (!path || !format) return Missing("path/format");
  return Guard([&] {
    auto ds = std::make_unique<mortar_dataset>();
    ds->dataset = mortar::LoadDataset(path, mortar::ParseDatasetFormat(format));
    *out = ds.release();
    return MORTAR_OK;
  });
}

void mortar_dataset_destroy(mortar_dataset *dataset) { delete dataset; }

size_t mortar_dataset_dialogue_count(const mortar_dataset *dataset) {
  return dataset ? dataset->dataset.dialogues.size() : 0;
}

size_t mortar_dataset_round_count(const mortar_dataset *dataset) {
  if (!dataset) return 0;
  size_t n = 0;
  for (const auto &d : dataset->dataset.dialogues) n += d.rounds.size();
  return n;
}

const char *mortar_dataset_json(mortar_dataset *dataset) {
  if (!dataset) return "{}";
  if (dataset->json.empty()) dataset->json = mortar::SerializeGeneric(dataset->dataset).dump();
  return dataset->json.c_str();
}

mortar_status mortar_score(const char *pred, const char *gold, double *ss, double *em,
                           double *f1, double *mss) {
  if (!pred || !gold) return Missing("pred/gold");
  return Guard([&] {
    mortar::Scorer scorer(std::make_shared<mortar::HashingEmbedder>());
    mortar::ScoreTriple t = scorer.Score(pred, gold);
    if (ss) *ss = t.ss;
    if (em) *em = t.em;
    if (f1) *f1 = t.f1;
    if (mss) *mss = mortar::Mss(t).value;
    return MORTAR_OK;
  });
}

double mortar_mss(double ss, double em, double f1) {
  return mortar::Mss({ss, em, f1}).value;
}

}  // extern "C"
