#include "report.hpp"

#include <cstdio>
#include <sstream>

#include "error.hpp"

namespace mortar {

using nlohmann::json;

namespace {

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string Percent(const std::optional<double> &v) {
  return v ? Fixed(*v * 100.0, 1) + "%" : "n/a";
}

std::string Num(const std::optional<double> &v) { return v ? Fixed(*v, 3) : "n/a"; }

std::string Pad(const std::string &s, size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

json OptJson(const std::optional<double> &v) { return v ? json(*v) : json(); }

std::optional<double> OptDouble(const json &j, const char *key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<double>();
}

std::string CsvField(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

DatasetColumn SummarizeDataset(const std::vector<AnnotatedDialogue> &dialogues) {
  DatasetColumn c;
  for (const AnnotatedDialogue &d : dialogues) {
    ++c.total_dialogues;
    bool any = false;
    for (const AnnotatedRound &r : d.rounds) {
      ++c.total_rounds;
      if (!r.expected.answerable) {
        ++c.unanswerable_rounds;
        any = true;
      }
    }
    if (any) ++c.dialogues_with_unanswerable;
  }
  if (c.total_dialogues > 0) {
    c.ratio = static_cast<double>(c.dialogues_with_unanswerable) /
              static_cast<double>(c.total_dialogues);
  }
  return c;
}

DatasetSummary SummarizeDatasets(
    const std::map<PerturbationKind, std::vector<AnnotatedDialogue>> &datasets) {
  DatasetSummary s;
  for (const auto &[kind, dialogues] : datasets) s[kind] = SummarizeDataset(dialogues);
  return s;
}

namespace {

struct Row {
  const char *label;
  std::string (*cell)(const DatasetColumn &);
};

const std::vector<Row> &DatasetRows() {
  static const std::vector<Row> kRows = {
      {"total_rounds", [](const DatasetColumn &c) { return std::to_string(c.total_rounds); }},
      {"unanswerable_rounds",
       [](const DatasetColumn &c) { return std::to_string(c.unanswerable_rounds); }},
      {"total_dialogues", [](const DatasetColumn &c) { return std::to_string(c.total_dialogues); }},
      {"dialogues_with_unanswerable",
       [](const DatasetColumn &c) { return std::to_string(c.dialogues_with_unanswerable); }},
      {"ratio", [](const DatasetColumn &c) { return Percent(c.ratio); }},
  };
  return kRows;
}

}  // namespace

std::string DatasetSummaryText(const DatasetSummary &summary) {
  std::ostringstream out;
  out << Pad("", 30);
  for (const auto &[kind, c] : summary) out << Pad(PerturbationKindName(kind), 10);
  out << "\n";
  for (const Row &row : DatasetRows()) {
    out << Pad(row.label, 30);
    for (const auto &[kind, c] : summary) out << Pad(row.cell(c), 10);
    out << "\n";
  }
  return out.str();
}

std::string DatasetSummaryCsv(const DatasetSummary &summary) {
  std::ostringstream out;
  out << "kind,total_rounds,unanswerable_rounds,total_dialogues,dialogues_with_unanswerable,ratio\n";
  for (const auto &[kind, c] : summary) {
    out << PerturbationKindName(kind) << "," << c.total_rounds << "," << c.unanswerable_rounds
        << "," << c.total_dialogues << "," << c.dialogues_with_unanswerable << ","
        << (c.ratio ? Fixed(*c.ratio, 6) : "") << "\n";
  }
  return out.str();
}

json DatasetSummaryJson(const DatasetSummary &summary) {
  json out = json::object();
  for (const auto &[kind, c] : summary) {
    out[PerturbationKindName(kind)] = {{"total_rounds", c.total_rounds},
                                       {"unanswerable_rounds", c.unanswerable_rounds},
                                       {"total_dialogues", c.total_dialogues},
                                       {"dialogues_with_unanswerable", c.dialogues_with_unanswerable},
                                       {"ratio", OptJson(c.ratio)}};
  }
  return out;
}

json RunSummary::ToJson() const {
  json by_kind = json::object();
  for (const auto &[kind, m] : mr1_by_kind) {
    by_kind[PerturbationKindName(kind)] = {{"mss", OptJson(m.mean_mss)},
                                           {"bugs_mss", OptJson(m.bug_mean_mss)},
                                           {"rate", OptJson(m.rate)},
                                           {"unique_bugs", m.unique_bugs},
                                           {"comparable", m.comparable},
                                           {"critical", m.critical}};
  }
  return {{"sut", sut}, {"bugs", bugs.ToJson()}, {"mr1_by_kind", by_kind}};
}

RunSummary RunSummary::FromJson(const json &j) {
  RunSummary r;
  try {
    r.sut = j.at("sut").get<std::string>();
    r.bugs = BugSummary::FromJson(j.at("bugs"));
    for (const auto &[name, m] : j.at("mr1_by_kind").items()) {
      MrSummary s;
      s.mean_mss = OptDouble(m, "mss");
      s.bug_mean_mss = OptDouble(m, "bugs_mss");
      s.rate = OptDouble(m, "rate");
      s.unique_bugs = m.value("unique_bugs", 0L);
      s.comparable = m.value("comparable", 0L);
      s.critical = m.value("critical", 0L);
      r.mr1_by_kind[ParsePerturbationKind(name)] = s;
    }
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kParse, std::string("run summary: ") + e.what());
  }
  return r;
}

RunSummary MakeRunSummary(const std::string &sut, const Detection &detection) {
  return {sut, detection.summary, detection.mr1_by_kind};
}

std::string MrTableText(const std::vector<RunSummary> &runs) {
  std::ostringstream out;
  for (const RunSummary &r : runs) {
    out << "SUT " << r.sut << "\n";
    out << "  " << Pad("kind", 8) << Pad("MSS", 8) << Pad("BugS", 8) << Pad("Rate", 8)
        << "bugs/rounds\n";
    for (const auto &[kind, m] : r.mr1_by_kind) {
      out << "  " << Pad(PerturbationKindName(kind), 8) << Pad(Num(m.mean_mss), 8)
          << Pad(Num(m.bug_mean_mss), 8) << Pad(Num(m.rate), 8) << m.unique_bugs << "/"
          << m.comparable << "\n";
    }
    out << "  " << Pad("MR", 8) << Pad("unique", 8) << Pad("units", 8) << Pad("Rate", 8)
        << "critical\n";
    for (const auto &[mr, m] : r.bugs.per_mr) {
      out << "  " << Pad(MrName(mr), 8) << Pad(std::to_string(m.unique_bugs), 8)
          << Pad(std::to_string(m.comparable), 8) << Pad(Num(m.rate), 8) << m.critical << "\n";
    }
    out << "  skipped rounds " << r.bugs.skipped_rounds << ", failed rounds "
        << r.bugs.failed_rounds << "\n";
  }
  return out.str();
}

std::string MrTableCsv(const std::vector<RunSummary> &runs) {
  std::ostringstream out;
  out << "sut,scope,mss,bugs_mss,rate,unique_bugs,units,critical\n";
  auto opt = [](const std::optional<double> &v) { return v ? Fixed(*v, 6) : std::string(); };
  for (const RunSummary &r : runs) {
    for (const auto &[kind, m] : r.mr1_by_kind) {
      out << CsvField(r.sut) << ",MR1/" << PerturbationKindName(kind) << "," << opt(m.mean_mss)
          << "," << opt(m.bug_mean_mss) << "," << opt(m.rate) << "," << m.unique_bugs << ","
          << m.comparable << "," << m.critical << "\n";
    }
    for (const auto &[mr, m] : r.bugs.per_mr) {
      out << CsvField(r.sut) << "," << MrName(mr) << "," << opt(m.mean_mss) << ","
          << opt(m.bug_mean_mss) << "," << opt(m.rate) << "," << m.unique_bugs << ","
          << m.comparable << "," << m.critical << "\n";
    }
  }
  return out.str();
}

json MrTableJson(const std::vector<RunSummary> &runs) {
  json out = json::array();
  for (const RunSummary &r : runs) out.push_back(r.ToJson());
  return out;
}

SeedKeySet SeedKeysOf(const std::vector<BugRecord> &bugs, bool critical_only) {
  SeedKeySet keys;
  for (const BugRecord &b : bugs) {
    if (critical_only && b.severity != Severity::kCritical) continue;
    keys.insert(b.seed_key);
  }
  return keys;
}

json OverlapSummary::ToJson() const {
  json p = json::array();
  for (const PairOverlap &x : pairs) {
    p.push_back({{"a", x.a}, {"b", x.b}, {"only_a", x.only_a}, {"only_b", x.only_b},
                 {"common", x.common}});
  }
  json r = json::array();
  for (const auto &[mask, count] : regions) {
    json members = json::array();
    for (size_t i = 0; i < names.size(); ++i) {
      if (mask & (1u << i)) members.push_back(names[i]);
    }
    r.push_back({{"sets", members}, {"count", count}});
  }
  return {{"names", names},     {"sizes", sizes},
          {"pairs", p},         {"regions", r},
          {"common_to_all", common_to_all}, {"union", union_size}};
}

OverlapSummary Overlap(const std::vector<std::pair<std::string, SeedKeySet>> &sets) {
  if (sets.size() < 2 || sets.size() > 16) {
    throw Error(ErrorKind::kConfig, "overlap needs between 2 and 16 bug sets");
  }
  OverlapSummary s;
  for (const auto &[name, keys] : sets) {
    s.names.push_back(name);
    s.sizes.push_back(static_cast<long>(keys.size()));
  }
  for (size_t i = 0; i < sets.size(); ++i) {
    for (size_t j = i + 1; j < sets.size(); ++j) {
      PairOverlap p{sets[i].first, sets[j].first};
      for (const SeedKey &k : sets[i].second) {
        if (sets[j].second.count(k)) ++p.common; else ++p.only_a;
      }
      p.only_b = static_cast<long>(sets[j].second.size()) - p.common;
      s.pairs.push_back(p);
    }
  }
  SeedKeySet all;
  for (const auto &[name, keys] : sets) all.insert(keys.begin(), keys.end());
  s.union_size = static_cast<long>(all.size());
  const unsigned full = (1u << sets.size()) - 1;
  for (const SeedKey &k : all) {
    unsigned mask = 0;
    for (size_t i = 0; i < sets.size(); ++i) {
      if (sets[i].second.count(k)) mask |= 1u << i;
    }
    ++s.regions[mask];
    if (mask == full) ++s.common_to_all;
  }
  return s;
}

std::string OverlapText(const OverlapSummary &summary) {
  std::ostringstream out;
  for (size_t i = 0; i < summary.names.size(); ++i) {
    out << summary.names[i] << ": " << summary.sizes[i] << " seed rounds\n";
  }
  for (const PairOverlap &p : summary.pairs) {
    out << p.a << " vs " << p.b << ": only " << p.a << " " << p.only_a << ", only " << p.b
        << " " << p.only_b << ", common " << p.common << "\n";
  }
  out << "common to all " << summary.common_to_all << ", union " << summary.union_size << "\n";
  return out.str();
}

}  // namespace mortar
