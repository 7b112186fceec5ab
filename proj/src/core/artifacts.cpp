#include "artifacts.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "error.hpp"

namespace mortar {

using nlohmann::json;

std::string ReadTextFile(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteTextFile(const fs::path &path, const std::string &content) {
  static std::atomic<unsigned long> counter{0};
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(std::hash<std::thread::id>()(std::this_thread::get_id())) +
         "_" + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
    out << content;
    if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot rename into " + path.string() + ": " + ec.message());
}

namespace {

json ParseJsonFile(const fs::path &path) {
  std::string raw = ReadTextFile(path);
  try {
    return json::parse(raw);
  } catch (const json::parse_error &e) {
    throw Error(ErrorKind::kParse, path.string() + ": " + e.what());
  }
}

template <typename F>
void ForEachJsonLine(const fs::path &path, F &&f) {
  std::istringstream in(ReadTextFile(path));
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error &e) {
      throw Error(ErrorKind::kParse,
                  path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
    f(j, number);
  }
}

}  // namespace

void WriteAnnotatedDataset(const fs::path &path, const AnnotatedDataset &dataset) {
  json dialogues = json::array();
  for (const AnnotatedDialogue &d : dataset.dialogues) dialogues.push_back(d.ToJson());
  json out = {{"manifest", dataset.manifest},
              {"kind", PerturbationKindName(dataset.kind)},
              {"dialogues", dialogues}};
  WriteTextFile(path, out.dump(1) + "\n");
}

AnnotatedDataset ReadAnnotatedDataset(const fs::path &path) {
  json j = ParseJsonFile(path);
  AnnotatedDataset d;
  try {
    d.kind = ParsePerturbationKind(j.at("kind").get<std::string>());
    d.manifest = j.value("manifest", json::object());
    for (const json &x : j.at("dialogues")) d.dialogues.push_back(AnnotatedDialogue::FromJson(x));
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kParse, path.string() + ": " + e.what());
  }
  return d;
}

fs::path AnnotatedDatasetPath(const fs::path &dir, PerturbationKind kind) {
  return dir / (std::string(PerturbationKindName(kind)) + ".json");
}

void WriteTranscript(const fs::path &path, const Transcript &transcript) {
  std::string out = json{{"manifest", transcript.manifest}}.dump() + "\n";
  for (const RoundOutcome &o : transcript.outcomes) out += o.ToJson().dump() + "\n";
  WriteTextFile(path, out);
}

Transcript ReadTranscript(const fs::path &path) {
  Transcript t;
  bool header = false;
  ForEachJsonLine(path, [&](const json &j, int number) {
    if (!header && j.contains("manifest")) {
      t.manifest = j["manifest"];
      header = true;
      return;
    }
    try {
      t.outcomes.push_back(RoundOutcome::FromJson(j));
    } catch (const Error &e) {
      throw Error(ErrorKind::kParse, path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  });
  return t;
}

void WriteBugs(const fs::path &path, const std::vector<BugRecord> &bugs) {
  std::string out;
  for (const BugRecord &b : bugs) out += b.ToJson().dump() + "\n";
  WriteTextFile(path, out);
}

std::vector<BugRecord> ReadBugs(const fs::path &path) {
  std::vector<BugRecord> bugs;
  ForEachJsonLine(path, [&](const json &j, int) { bugs.push_back(BugRecord::FromJson(j)); });
  return bugs;
}

ExtractionCache::ExtractionCache(fs::path directory) : directory_(std::move(directory)) {
  std::error_code ec;
  fs::create_directories(directory_, ec);
}

fs::path ExtractionCache::PathOf(const std::string &key) const {
  return directory_ / (key + ".json");
}

std::optional<DialogueExtraction> ExtractionCache::Get(const std::string &key) const {
  fs::path p = PathOf(key);
  if (!fs::exists(p)) return std::nullopt;
  try {
    return DialogueExtraction::FromJson(json::parse(ReadTextFile(p)));
  } catch (const std::exception &) {
    return std::nullopt;  // unreadable entries are recomputed
  }
}

void ExtractionCache::Put(const std::string &key, const DialogueExtraction &extraction) {
  WriteTextFile(PathOf(key), extraction.ToJson().dump() + "\n");
}

}  // namespace mortar
