#include "dialogue.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "error.hpp"
#include "text.hpp"

namespace mortar {

using nlohmann::json;

const QARound *Dialogue::Round(int index) const {
  for (const QARound &r : rounds) {
    if (r.index == index) return &r;
  }
  return nullptr;
}

const Dialogue *Dataset::Find(std::string_view dialogue_id) const {
  for (const Dialogue &d : dialogues) {
    if (d.dialogue_id == dialogue_id) return &d;
  }
  return nullptr;
}

DatasetFormat ParseDatasetFormat(std::string_view name) {
  if (name == "coqa") return DatasetFormat::kCoqa;
  if (name == "generic") return DatasetFormat::kGeneric;
  throw Error(ErrorKind::kConfig, "unknown dataset format '" +
                                      std::string(name) +
                                      "' (expected coqa or generic)");
}

namespace {

std::string RequireString(const json &obj, const char *key,
                          const std::string &where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw Error(ErrorKind::kValidation,
                where + ": missing string field '" + key + "'");
  }
  return it->get<std::string>();
}

const json &RequireArray(const json &obj, const char *key,
                         const std::string &where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_array()) {
    throw Error(ErrorKind::kValidation,
                where + ": missing array field '" + key + "'");
  }
  return *it;
}

std::map<int, std::string> TurnsById(const json &turns,
                                     const std::string &where) {
  std::map<int, std::string> out;
  for (const json &t : turns) {
    auto id = t.find("turn_id");
    if (!t.is_object() || id == t.end() || !id->is_number_integer()) {
      throw Error(ErrorKind::kValidation, where + ": turn without turn_id");
    }
    out[id->get<int>()] = RequireString(t, "input_text", where);
  }
  return out;
}

Dialogue ParseCoqaRecord(const json &rec, size_t position) {
  std::string where = "record " + std::to_string(position);
  Dialogue d;
  d.dialogue_id = RequireString(rec, "id", where);
  where = "dialogue " + d.dialogue_id;
  d.story = RequireString(rec, "story", where);
  auto questions = TurnsById(RequireArray(rec, "questions", where), where);
  auto answers = TurnsById(RequireArray(rec, "answers", where), where);
  for (const auto &[turn, q] : questions) {
    auto a = answers.find(turn);
    if (a == answers.end()) {
      throw Error(ErrorKind::kValidation,
                  where + ": question turn " + std::to_string(turn) +
                      " has no answer");
    }
    d.rounds.push_back({turn, q, a->second});
  }
  if (answers.size() != questions.size()) {
    throw Error(ErrorKind::kValidation,
                where + ": answer turns without questions");
  }
  return d;
}

Dialogue ParseGenericRecord(const json &rec, size_t position) {
  std::string where = "record " + std::to_string(position);
  Dialogue d;
  d.dialogue_id = RequireString(rec, "dialogue_id", where);
  where = "dialogue " + d.dialogue_id;
  if (auto s = rec.find("story"); s != rec.end() && !s->is_null()) {
    if (!s->is_string()) {
      throw Error(ErrorKind::kValidation, where + ": story must be a string");
    }
    d.story = s->get<std::string>();
  }
  int index = 0;
  for (const json &r : RequireArray(rec, "rounds", where)) {
    ++index;
    d.rounds.push_back({index, RequireString(r, "q", where),
                        RequireString(r, "a", where)});
  }
  return d;
}

}  // namespace

Dataset ParseDataset(std::string_view raw, DatasetFormat format,
                     std::string source_label) {
  json doc;
  try {
    doc = json::parse(raw.begin(), raw.end());
  } catch (const json::parse_error &e) {
    throw Error(ErrorKind::kParse, "malformed JSON at byte " +
                                       std::to_string(e.byte) + ": " +
                                       e.what());
  }
  const char *top = format == DatasetFormat::kCoqa ? "data" : "dialogues";
  if (!doc.is_object() || !doc.contains(top) || !doc[top].is_array()) {
    throw Error(ErrorKind::kValidation,
                std::string("top-level array '") + top + "' missing");
  }

  Dataset dataset;
  dataset.source_label = std::move(source_label);
  std::vector<std::string> failures;
  std::set<std::string> seen;
  size_t position = 0;
  for (const json &rec : doc[top]) {
    try {
      Dialogue d = format == DatasetFormat::kCoqa
                       ? ParseCoqaRecord(rec, position)
                       : ParseGenericRecord(rec, position);
      if (!seen.insert(d.dialogue_id).second) {
        throw Error(ErrorKind::kValidation,
                    "dialogue " + d.dialogue_id + ": duplicate dialogue_id");
      }
      dataset.dialogues.push_back(std::move(d));
    } catch (const Error &e) {
      failures.push_back(e.what());
    }
    ++position;
  }
  if (!failures.empty()) {
    throw Error(ErrorKind::kValidation, text::Join(failures, "; "));
  }
  if (dataset.dialogues.empty()) {
    throw Error(ErrorKind::kValidation, "dataset contains no dialogues");
  }
  return dataset;
}

Dataset LoadDataset(const std::string &path, DatasetFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open dataset " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseDataset(buf.str(), format, path);
}

json SerializeGeneric(const Dataset &dataset) {
  json dialogues = json::array();
  for (const Dialogue &d : dataset.dialogues) {
    json rounds = json::array();
    for (const QARound &r : d.rounds) {
      rounds.push_back({{"q", r.question}, {"a", r.gold_answer}});
    }
    json rec = {{"dialogue_id", d.dialogue_id}, {"rounds", rounds}};
    if (d.story) rec["story"] = *d.story;
    dialogues.push_back(std::move(rec));
  }
  return {{"dialogues", dialogues}};
}

const char *IssueKindName(IssueKind kind) {
  switch (kind) {
    case IssueKind::kEmptyQuestion: return "empty_question";
    case IssueKind::kNonContiguous: return "non_contiguous";
    case IssueKind::kDuplicateIndex: return "duplicate_index";
    case IssueKind::kNoRounds: return "no_rounds";
  }
  return "unknown";
}

ValidationReport ValidateDialogue(const Dialogue &dialogue) {
  ValidationReport report{dialogue.dialogue_id, {}};
  if (dialogue.rounds.empty()) {
    report.issues.push_back({IssueKind::kNoRounds, 0});
    return report;
  }
  std::set<int> indices;
  for (const QARound &r : dialogue.rounds) {
    if (text::Trim(r.question).empty()) {
      report.issues.push_back({IssueKind::kEmptyQuestion, r.index});
    }
    if (!indices.insert(r.index).second) {
      report.issues.push_back({IssueKind::kDuplicateIndex, r.index});
    }
  }
  int expected = 1;
  for (int index : indices) {
    if (index != expected++) {
      report.issues.push_back({IssueKind::kNonContiguous, 0});
      break;
    }
  }
  return report;
}

}  // namespace mortar
