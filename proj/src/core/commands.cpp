#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "artifacts.hpp"
#include "error.hpp"
#include "extraction.hpp"
#include "mock_llm.hpp"
#include "mr_oracle.hpp"
#include "prompts.hpp"
#include "report.hpp"
#include "text.hpp"

namespace mortar {

using nlohmann::json;

namespace {

constexpr const char *kToolVersion = "0.1.0";
constexpr const char *kReportSchema = "1";

void ParallelFor(size_t n, int parallelism, const std::function<void(size_t)> &fn) {
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < n; i = next++) fn(i);
  };
  int threads = std::clamp(parallelism, 1, std::max(1, static_cast<int>(n)));
  if (threads == 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (std::thread &t : pool) t.join();
}

std::string FileDigest(const fs::path &path) { return text::Sha256Hex(ReadTextFile(path)); }

json KindsJson(const std::vector<PerturbationKind> &kinds) {
  json out = json::array();
  for (PerturbationKind k : kinds) out.push_back(PerturbationKindName(k));
  return out;
}

TemplateSet LoadTemplates(const Options &options) {
  return options.templates_dir.empty() ? TemplateSet::Defaults()
                                       : TemplateSet::LoadDirectory(options.templates_dir);
}

std::string ExtractionKey(const Dialogue &d, const std::string &template_version,
                          const ChatClient &client) {
  Dataset one;
  one.dialogues.push_back(d);
  std::string material = template_version + "\n" + client.model_name() + "\n" +
                         SerializeGeneric(one).dump();
  return text::Sha256Hex(material);
}

}  // namespace

std::shared_ptr<ChatClient> MakeExtractorClient(const Options &options) {
  if (options.mock_extractor) {
    if (*options.mock_extractor == "builtin") return std::make_shared<MockChatClient>();
    return std::shared_ptr<ChatClient>(MockChatClient::FromFile(*options.mock_extractor));
  }
  if (options.extractor_endpoint.empty()) {
    throw Error(ErrorKind::kConfig,
                "generate needs --extractor-endpoint or --mock-extractor");
  }
  HttpChatOptions o;
  o.endpoint = options.extractor_endpoint;
  o.model = options.extractor_model;
  o.api_key = options.llm_api_key;
  o.max_in_flight = options.parallelism;
  return std::make_shared<HttpChatClient>(o);
}

std::shared_ptr<Embedder> MakeEmbedder(const Options &options) {
  if (!options.embedder_endpoint.empty() && !options.fallback_embedder) {
    return std::make_shared<HttpEmbedder>(options.embedder_endpoint);
  }
  return std::make_shared<HashingEmbedder>();
}

std::shared_ptr<CoreferenceClient> MakeCoref(const Options &options) {
  if (!options.coref_endpoint.empty()) return std::make_shared<HttpCoref>(options.coref_endpoint);
  return std::make_shared<HeuristicCoref>();
}

std::unique_ptr<Responder> MakeResponder(const Options &options, SutConfig *config) {
  config->endpoint = options.sut_endpoint;
  config->model = options.sut_model;
  config->api_key = options.sut_api_key;
  config->history_policy = options.history_policy;
  if (!options.sut.empty()) {
    std::string spec = options.sut;
    if (spec.rfind("mock:", 0) != 0) {
      throw Error(ErrorKind::kConfig, "--sut expects mock:<profile>, got '" + spec + "'");
    }
    return std::make_unique<MockResponder>(ParseDefectProfile(spec.substr(5)));
  }
  if (options.sut_endpoint.empty()) {
    throw Error(ErrorKind::kConfig, "run needs --sut-endpoint or --sut mock:<profile>");
  }
  if (options.sut_model.empty()) throw Error(ErrorKind::kConfig, "run needs --sut-model");
  return std::make_unique<HttpResponder>(*config);
}

std::map<PerturbationKind, AnnotatedDialogue> AnnotateDialogue(
    const Dialogue &dialogue, const DialogueExtraction &extraction,
    const AnnotationOptions &options, CoreferenceClient &resolver) {
  std::map<PerturbationKind, AnnotatedDialogue> out;
  uint64_t seed = DialogueSeed(options.seed, dialogue.dialogue_id);
  for (PerturbationKind kind : options.kinds) {
    PerturbationConfig config{kind, options.reduce_ratio, options.duplicate_ratio, seed};
    PerturbedDialogue pd = Apply(config, dialogue);
    auto tags = TagDialogue(pd, dialogue, extraction, resolver);
    out[kind] = AssignExpected(pd, tags, dialogue);
  }
  return out;
}

CommandResult Generate(const Options &options) {
  if (options.dataset.empty()) throw Error(ErrorKind::kConfig, "generate needs --dataset");
  for (PerturbationKind k : options.perturbations) {
    ValidatePerturbationConfig({k, options.reduce_ratio, options.duplicate_ratio, options.seed});
  }
  Dataset dataset = LoadDataset(options.dataset, options.format);
  TemplateSet templates = LoadTemplates(options);
  const std::string template_version = templates.Version();

  fs::path out_dir(options.out_dir);
  auto base_client = MakeExtractorClient(options);
  auto llm_cache = std::make_shared<ResponseCache>(out_dir / "llm_cache");
  CachedChatClient client(base_client, llm_cache);
  ExtractionCache extraction_cache(out_dir / "extraction_cache");
  auto coref = MakeCoref(options);

  json excluded = json::array();
  json failed = json::array();
  std::vector<const Dialogue *> valid;
  for (const Dialogue &d : dataset.dialogues) {
    ValidationReport report = ValidateDialogue(d);
    if (report.issues.empty()) {
      valid.push_back(&d);
      continue;
    }
    std::vector<std::string> reasons;
    for (const ValidationIssue &i : report.issues) {
      reasons.push_back(std::string(IssueKindName(i.kind)) +
                        (i.round ? " at round " + std::to_string(i.round) : ""));
    }
    excluded.push_back({{"dialogue_id", d.dialogue_id}, {"reason", text::Join(reasons, "; ")}});
  }

  std::vector<std::optional<DialogueExtraction>> extractions(valid.size());
  std::vector<std::string> failures(valid.size());
  std::atomic<long> extraction_hits{0};
  ParallelFor(valid.size(), options.parallelism, [&](size_t i) {
    const Dialogue &d = *valid[i];
    std::string key = ExtractionKey(d, template_version, *base_client);
    if (auto cached = extraction_cache.Get(key)) {
      ++extraction_hits;
      extractions[i] = std::move(cached);
      return;
    }
    try {
      ExtractionPipeline pipeline(client, templates);
      DialogueExtraction x = pipeline.Run(d);
      extraction_cache.Put(key, x);
      extractions[i] = std::move(x);
    } catch (const std::exception &e) {
      failures[i] = e.what();
    }
  });

  AnnotationOptions annotation{options.perturbations, options.reduce_ratio,
                               options.duplicate_ratio, options.seed};
  std::vector<std::map<PerturbationKind, AnnotatedDialogue>> annotated(valid.size());
  ParallelFor(valid.size(), options.parallelism, [&](size_t i) {
    if (!extractions[i] || !extractions[i]->aligned()) return;
    try {
      annotated[i] = AnnotateDialogue(*valid[i], *extractions[i], annotation, *coref);
    } catch (const std::exception &e) {
      failures[i] = e.what();
    }
  });

  std::map<PerturbationKind, std::vector<AnnotatedDialogue>> by_kind;
  for (PerturbationKind k : options.perturbations) by_kind[k];
  long kept = 0;
  for (size_t i = 0; i < valid.size(); ++i) {
    const std::string &id = valid[i]->dialogue_id;
    if (!failures[i].empty()) {
      failed.push_back({{"dialogue_id", id}, {"error", failures[i]}});
      continue;
    }
    const DialogueExtraction &x = *extractions[i];
    if (!x.aligned()) {
      std::string reason = x.error.empty() ? "misaligned rounds" : x.error;
      json rounds = x.misaligned_rounds;
      excluded.push_back({{"dialogue_id", id}, {"reason", "extraction: " + reason},
                          {"rounds", rounds}});
      continue;
    }
    ++kept;
    for (auto &[kind, d] : annotated[i]) by_kind[kind].push_back(std::move(d));
  }

  json manifest = {
      {"command", "generate"},
      {"tool_version", kToolVersion},
      {"report_schema", kReportSchema},
      {"dataset", {{"path", options.dataset},
                   {"format", options.format == DatasetFormat::kCoqa ? "coqa" : "generic"},
                   {"sha256", FileDigest(options.dataset)},
                   {"dialogues", dataset.dialogues.size()}}},
      {"perturbations", KindsJson(options.perturbations)},
      {"reduce_ratio", options.reduce_ratio},
      {"duplicate_ratio", options.duplicate_ratio},
      {"seed", options.seed},
      {"generator", kGeneratorName},
      {"template_version", template_version},
      {"extractor", {{"client", base_client->Describe()}, {"model", base_client->model_name()}}},
      {"coref", coref->name()},
      {"parallelism", options.parallelism},
      {"excluded", excluded},
      {"failed", failed},
  };

  json files = json::array();
  DatasetSummary summary = SummarizeDatasets(by_kind);
  for (auto &[kind, dialogues] : by_kind) {
    AnnotatedDataset ds;
    ds.kind = kind;
    ds.manifest = {{"seed", options.seed},
                   {"generator", kGeneratorName},
                   {"template_version", template_version},
                   {"dataset_sha256", manifest["dataset"]["sha256"]}};
    ds.dialogues = std::move(dialogues);
    fs::path path = AnnotatedDatasetPath(out_dir, kind);
    WriteAnnotatedDataset(path, ds);
    files.push_back({{"kind", PerturbationKindName(kind)},
                     {"path", path.string()},
                     {"sha256", FileDigest(path)},
                     {"dialogues", ds.dialogues.size()}});
  }
  manifest["files"] = files;
  manifest["summary"] = DatasetSummaryJson(summary);
  manifest["llm"] = {{"upstream_calls", client.upstream_calls()},
                     {"response_cache_hits", client.cache_hits()},
                     {"extraction_cache_hits", extraction_hits.load()}};
  WriteTextFile(out_dir / "manifest.json", manifest.dump(2) + "\n");

  CommandResult r;
  r.details = manifest;
  std::ostringstream out;
  out << "annotated " << kept << " of " << dataset.dialogues.size() << " dialogues ("
      << excluded.size() << " excluded, " << failed.size() << " failed)\n"
      << "llm calls " << client.upstream_calls() << ", response cache hits "
      << client.cache_hits() << ", extraction cache hits " << extraction_hits.load() << "\n"
      << DatasetSummaryText(summary);
  for (const json &f : failed) {
    out << "failed " << f["dialogue_id"].get<std::string>() << ": "
        << f["error"].get<std::string>() << "\n";
  }
  r.text = out.str();
  if (!failed.empty()) r.status = kept > 0 ? CommandStatus::kPartial : CommandStatus::kFailed;
  if (kept == 0) r.status = CommandStatus::kFailed;
  return r;
}

namespace {

std::vector<fs::path> ExpandAnnotatedInputs(const std::vector<std::string> &inputs) {
  std::vector<fs::path> out;
  for (const std::string &in : inputs) {
    fs::path p(in);
    if (fs::is_directory(p)) {
      for (const char *kind : {"ORIG", "DS", "DR", "DD", "DSR", "DSD"}) {
        fs::path f = p / (std::string(kind) + ".json");
        if (fs::exists(f)) out.push_back(f);
      }
    } else {
      out.push_back(p);
    }
  }
  return out;
}

fs::path TranscriptIn(const fs::path &p) {
  return fs::is_directory(p) ? p / "transcript.jsonl" : p;
}

}  // namespace

CommandResult RunSut(const Options &options) {
  std::vector<fs::path> inputs = ExpandAnnotatedInputs(options.inputs);
  if (inputs.empty()) throw Error(ErrorKind::kConfig, "run needs annotated dataset inputs");
  SutConfig config;
  auto responder = MakeResponder(options, &config);

  std::vector<AnnotatedDialogue> dialogues;
  json input_manifest = json::array();
  for (const fs::path &p : inputs) {
    AnnotatedDataset ds = ReadAnnotatedDataset(p);
    input_manifest.push_back({{"path", p.string()},
                              {"kind", PerturbationKindName(ds.kind)},
                              {"sha256", FileDigest(p)},
                              {"manifest", ds.manifest}});
    for (AnnotatedDialogue &d : ds.dialogues) dialogues.push_back(std::move(d));
  }

  auto transcripts = RunDialogues(*responder, dialogues, config, options.parallelism);

  Transcript t;
  json partial = json::array();
  long ok_rounds = 0, failed_rounds = 0;
  for (DialogueTranscript &d : transcripts) {
    if (d.partial) {
      partial.push_back({{"dialogue_id", d.dialogue_id},
                         {"kind", PerturbationKindName(d.kind)},
                         {"error", d.error}});
    }
    for (RoundOutcome &o : d.outcomes) {
      if (o.status == OutcomeStatus::kOk) ++ok_rounds; else ++failed_rounds;
      t.outcomes.push_back(std::move(o));
    }
  }
  t.manifest = {{"command", "run"},
                {"tool_version", kToolVersion},
                {"inputs", input_manifest},
                {"sut", {{"client", responder->Describe()},
                         {"endpoint", config.endpoint},
                         {"model", responder->model_name()}}},
                {"history_policy", HistoryPolicyName(config.history_policy)},
                {"system_instructions_sha256", text::Sha256Hex(config.system_instructions)},
                {"temperature", config.temperature},
                {"parallelism", options.parallelism},
                {"dialogues", dialogues.size()},
                {"rounds_ok", ok_rounds},
                {"rounds_not_run", failed_rounds},
                {"partial_dialogues", partial}};
  fs::path path = fs::path(options.out_dir) / "transcript.jsonl";
  WriteTranscript(path, t);

  CommandResult r;
  r.details = t.manifest;
  std::ostringstream out;
  out << "ran " << dialogues.size() << " dialogues against " << responder->Describe() << ": "
      << ok_rounds << " rounds answered, " << failed_rounds << " not answered\n"
      << "transcript " << path.string() << "\n";
  for (const json &p : partial) {
    out << "partial " << p["kind"].get<std::string>() << "/" << p["dialogue_id"].get<std::string>()
        << ": " << p["error"].get<std::string>() << "\n";
  }
  r.text = out.str();
  if (!partial.empty()) {
    r.status = partial.size() == transcripts.size() ? CommandStatus::kFailed
                                                    : CommandStatus::kPartial;
  }
  if (dialogues.empty()) r.status = CommandStatus::kFailed;
  return r;
}

CommandResult DetectBugs(const Options &options) {
  if (options.inputs.empty()) throw Error(ErrorKind::kConfig, "detect needs transcript inputs");
  std::vector<RoundOutcome> outcomes;
  json inputs = json::array();
  std::set<std::string> suts;
  for (const std::string &in : options.inputs) {
    fs::path p = TranscriptIn(in);
    Transcript t = ReadTranscript(p);
    inputs.push_back({{"path", p.string()}, {"sha256", FileDigest(p)}});
    if (t.manifest.contains("sut")) suts.insert(t.manifest["sut"].value("client", "unknown"));
    outcomes.insert(outcomes.end(), std::make_move_iterator(t.outcomes.begin()),
                    std::make_move_iterator(t.outcomes.end()));
  }
  auto embedder = MakeEmbedder(options);
  Scorer scorer(embedder);
  DetectionOptions d;
  d.eps_a = options.eps_a;
  d.eps_b = options.eps_b;
  d.cross_kind = !options.within_kind;
  Detection detection = Detect(std::move(outcomes), d, scorer);

  std::string sut = suts.empty() ? "unknown" : text::Join({suts.begin(), suts.end()}, "+");
  RunSummary summary = MakeRunSummary(sut, detection);
  json manifest = {{"command", "detect"},
                   {"tool_version", kToolVersion},
                   {"report_schema", kReportSchema},
                   {"inputs", inputs},
                   {"eps_a", d.eps_a},
                   {"eps_b", d.eps_b},
                   {"cross_kind", d.cross_kind},
                   {"critical_below", d.critical_below},
                   {"embedder", embedder->name()}};
  if (auto *http = dynamic_cast<HttpEmbedder *>(embedder.get())) {
    manifest["embedder_fallbacks"] = http->fallbacks();
  }
  fs::path dir(options.out_dir);
  WriteBugs(dir / "bugs.jsonl", detection.bugs);
  WriteTextFile(dir / "summary.json",
                json{{"manifest", manifest}, {"summary", summary.ToJson()}}.dump(2) + "\n");
  std::string table = MrTableText({summary});
  WriteTextFile(dir / "summary.txt", table);
  WriteTextFile(dir / "summary.csv", MrTableCsv({summary}));

  CommandResult r;
  r.details = manifest;
  r.details["summary"] = summary.ToJson();
  r.text = table + "bugs " + (dir / "bugs.jsonl").string() + "\n";
  return r;
}

CommandResult Report(const Options &options) {
  if (options.inputs.empty()) throw Error(ErrorKind::kConfig, "report needs artifact directories");
  std::map<PerturbationKind, std::vector<AnnotatedDialogue>> datasets;
  std::vector<RunSummary> runs;
  std::vector<std::pair<std::string, SeedKeySet>> bug_sets;
  for (const std::string &in : options.inputs) {
    fs::path dir(in);
    if (!fs::is_directory(dir)) throw Error(ErrorKind::kIo, in + " is not a directory");
    for (const fs::path &f : ExpandAnnotatedInputs({in})) {
      AnnotatedDataset ds = ReadAnnotatedDataset(f);
      auto &into = datasets[ds.kind];
      for (AnnotatedDialogue &d : ds.dialogues) into.push_back(std::move(d));
    }
    if (fs::exists(dir / "summary.json")) {
      json j = json::parse(ReadTextFile(dir / "summary.json"), nullptr, false);
      if (j.is_discarded()) throw Error(ErrorKind::kParse, (dir / "summary.json").string());
      runs.push_back(RunSummary::FromJson(j.at("summary")));
    }
    if (fs::exists(dir / "bugs.jsonl")) {
      std::string name = dir.filename().empty() ? dir.parent_path().filename().string()
                                                : dir.filename().string();
      bug_sets.emplace_back(name, SeedKeysOf(ReadBugs(dir / "bugs.jsonl"), !options.all_bugs));
    }
  }

  json out = {{"report_schema", kReportSchema}};
  std::ostringstream text_out, csv_out;
  if (!datasets.empty()) {
    DatasetSummary s = SummarizeDatasets(datasets);
    out["datasets"] = DatasetSummaryJson(s);
    text_out << "Generated datasets\n" << DatasetSummaryText(s) << "\n";
    WriteTextFile(fs::path(options.out_dir) / "datasets.csv", DatasetSummaryCsv(s));
  }
  if (!runs.empty()) {
    out["runs"] = MrTableJson(runs);
    text_out << "Bug detection\n" << MrTableText(runs) << "\n";
    WriteTextFile(fs::path(options.out_dir) / "mr_table.csv", MrTableCsv(runs));
  }
  if (options.overlap) {
    OverlapSummary o = Overlap(bug_sets);
    out["overlap"] = o.ToJson();
    out["overlap"]["subset"] = options.all_bugs ? "all" : "critical";
    text_out << "Unique " << (options.all_bugs ? "" : "critical ") << "bug overlap\n"
             << OverlapText(o);
  }
  if (datasets.empty() && runs.empty() && !options.overlap) {
    throw Error(ErrorKind::kConfig, "no annotated datasets or summaries found in the inputs");
  }
  fs::path dir(options.out_dir);
  WriteTextFile(dir / "report.json", out.dump(2) + "\n");
  WriteTextFile(dir / "report.txt", text_out.str());
  CommandResult r;
  r.details = out;
  r.text = text_out.str();
  return r;
}

}  // namespace mortar
