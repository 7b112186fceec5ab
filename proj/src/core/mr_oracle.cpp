#include "mr_oracle.hpp"

#include <algorithm>
#include <set>

#include "answerability.hpp"
#include "error.hpp"

namespace mortar {

using nlohmann::json;

const char *OutcomeStatusName(OutcomeStatus s) {
  switch (s) {
    case OutcomeStatus::kOk: return "ok";
    case OutcomeStatus::kFailed: return "failed";
    case OutcomeStatus::kAborted: return "aborted";
  }
  return "?";
}

namespace {

OutcomeStatus ParseOutcomeStatus(std::string_view s) {
  if (s == "ok") return OutcomeStatus::kOk;
  if (s == "failed") return OutcomeStatus::kFailed;
  if (s == "aborted") return OutcomeStatus::kAborted;
  throw Error(ErrorKind::kParse, "unknown outcome status '" + std::string(s) + "'");
}

template <typename T>
json Opt(const std::optional<T> &v) {
  return v ? json(*v) : json();
}

json ScoresJson(const RoundOutcome &o) {
  if (!o.scores || !o.mss) return json();
  return {{"ss", o.scores->ss},
          {"em", o.scores->em},
          {"f1", o.scores->f1},
          {"mss", o.mss->value},
          {"weights", {o.mss->w_ss, o.mss->w_em, o.mss->w_f1}}};
}

bool Comparable(const RoundOutcome &o) {
  return o.status == OutcomeStatus::kOk && o.generated.has_value() && o.answerable.has_value();
}

// Outcomes grouped by seed key (and kind when cross_kind is off), in a
// stable order.
std::map<std::pair<SeedKey, int>, std::vector<const RoundOutcome *>> GroupBySeed(
    const std::vector<RoundOutcome> &outcomes, bool cross_kind) {
  std::map<std::pair<SeedKey, int>, std::vector<const RoundOutcome *>> groups;
  for (const RoundOutcome &o : outcomes) {
    if (!Comparable(o)) continue;
    int kind = cross_kind ? -1 : static_cast<int>(o.kind);
    groups[{SeedKey{o.dialogue_id, o.origin_index}, kind}].push_back(&o);
  }
  for (auto &[key, members] : groups) {
    std::sort(members.begin(), members.end(), [](const RoundOutcome *a, const RoundOutcome *b) {
      return std::tie(a->kind, a->new_index) < std::tie(b->kind, b->new_index);
    });
  }
  return groups;
}

}  // namespace

std::string RoundOutcome::Id() const {
  return std::string(PerturbationKindName(kind)) + "/" + dialogue_id + "/" +
         std::to_string(new_index);
}

json RoundOutcome::ToJson() const {
  return {{"dialogue_id", dialogue_id},
          {"kind", PerturbationKindName(kind)},
          {"new_index", new_index},
          {"origin_index", origin_index},
          {"question", question},
          {"answerable", Opt(answerable)},
          {"expected_answer", Opt(expected)},
          {"generated", Opt(generated)},
          {"status", OutcomeStatusName(status)},
          {"scores", ScoresJson(*this)}};
}

RoundOutcome RoundOutcome::FromJson(const json &j) {
  RoundOutcome o;
  try {
    o.dialogue_id = j.at("dialogue_id").get<std::string>();
    o.kind = ParsePerturbationKind(j.at("kind").get<std::string>());
    o.new_index = j.at("new_index").get<int>();
    o.origin_index = j.at("origin_index").get<int>();
    o.question = j.value("question", "");
    if (j.contains("answerable") && !j["answerable"].is_null()) o.answerable = j["answerable"].get<bool>();
    if (j.contains("expected_answer") && !j["expected_answer"].is_null()) {
      o.expected = j["expected_answer"].get<std::string>();
    }
    if (j.contains("generated") && !j["generated"].is_null()) o.generated = j["generated"].get<std::string>();
    o.status = ParseOutcomeStatus(j.value("status", "ok"));
    if (j.contains("scores") && !j["scores"].is_null()) {
      const json &s = j["scores"];
      o.scores = ScoreTriple{s.at("ss").get<double>(), s.at("em").get<double>(),
                             s.at("f1").get<double>()};
      o.mss = Mss(*o.scores);
    }
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kParse, std::string("round outcome: ") + e.what());
  }
  return o;
}

const char *MrName(Mr mr) {
  switch (mr) {
    case Mr::kMr1: return "MR1";
    case Mr::kMr2: return "MR2";
    case Mr::kMr3: return "MR3";
  }
  return "?";
}

Mr ParseMr(std::string_view name) {
  if (name == "MR1") return Mr::kMr1;
  if (name == "MR2") return Mr::kMr2;
  if (name == "MR3") return Mr::kMr3;
  throw Error(ErrorKind::kParse, "unknown MR '" + std::string(name) + "'");
}

json BugRecord::ToJson() const {
  json ev = json::array();
  for (const RoundOutcome &o : evidence) ev.push_back(o.ToJson());
  return {{"mr", MrName(mr)},
          {"seed_key", {{"dialogue_id", seed_key.dialogue_id},
                        {"origin_index", seed_key.origin_index}}},
          {"mss", mss_at_conflict},
          {"severity", severity == Severity::kCritical ? "critical" : "normal"},
          {"evidence", ev}};
}

BugRecord BugRecord::FromJson(const json &j) {
  BugRecord b;
  try {
    b.mr = ParseMr(j.at("mr").get<std::string>());
    b.seed_key = {j.at("seed_key").at("dialogue_id").get<std::string>(),
                  j.at("seed_key").at("origin_index").get<int>()};
    b.mss_at_conflict = j.at("mss").get<double>();
    b.severity = j.at("severity").get<std::string>() == "critical" ? Severity::kCritical
                                                                    : Severity::kNormal;
    for (const json &o : j.value("evidence", json::array())) {
      b.evidence.push_back(RoundOutcome::FromJson(o));
    }
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kParse, std::string("bug record: ") + e.what());
  }
  return b;
}

void ScoreOutcomes(std::vector<RoundOutcome> &outcomes, Scorer &scorer) {
  for (RoundOutcome &o : outcomes) {
    if (!Comparable(o) || !o.expected) continue;
    const std::string &target = *o.answerable ? *o.expected : std::string(kUnknownAnswer);
    o.scores = scorer.Score(*o.generated, target);
    o.mss = Mss(*o.scores);
  }
}

std::vector<BugRecord> DetectMr1(const std::vector<RoundOutcome> &outcomes,
                                 const DetectionOptions &options, long *skipped,
                                 MrTotals *totals) {
  std::vector<BugRecord> bugs;
  for (const RoundOutcome &o : outcomes) {
    if (o.status != OutcomeStatus::kOk || !o.generated) continue;  // tallied as failed
    if (!Comparable(o) || !o.expected || !o.mss) {
      if (skipped) ++*skipped;
      continue;
    }
    if (totals) {
      ++totals->comparable;
      totals->mss_sum += o.mss->value;
      ++totals->mss_count;
    }
    if (o.mss->value < options.eps_a) {
      Severity sev = o.mss->value < options.critical_below ? Severity::kCritical
                                                           : Severity::kNormal;
      bugs.push_back({Mr::kMr1, {o.dialogue_id, o.origin_index}, {o}, o.mss->value, sev});
    }
  }
  return bugs;
}

std::vector<BugRecord> DetectMr2(const std::vector<RoundOutcome> &outcomes,
                                 const DetectionOptions &options, Scorer &scorer,
                                 MrTotals *totals) {
  std::vector<BugRecord> bugs;
  for (const auto &[key, members] : GroupBySeed(outcomes, options.cross_kind)) {
    for (size_t i = 0; i < members.size(); ++i) {
      for (size_t j = i + 1; j < members.size(); ++j) {
        const RoundOutcome &a = *members[i];
        const RoundOutcome &b = *members[j];
        if (*a.answerable != *b.answerable) continue;
        double mss = scorer.Mixed(*a.generated, *b.generated).value;
        if (totals) {
          ++totals->comparable;
          totals->mss_sum += mss;
          ++totals->mss_count;
        }
        if (mss < options.eps_b) {
          bugs.push_back({Mr::kMr2, key.first, {a, b}, mss, Severity::kNormal});
        }
      }
    }
  }
  return bugs;
}

std::vector<BugRecord> DetectMr3(const std::vector<RoundOutcome> &outcomes,
                                 const DetectionOptions &options, Scorer &scorer,
                                 MrTotals *totals) {
  std::vector<BugRecord> bugs;
  for (const auto &[key, members] : GroupBySeed(outcomes, options.cross_kind)) {
    for (const RoundOutcome *a : members) {
      if (!*a->answerable) continue;
      for (const RoundOutcome *b : members) {
        if (*b->answerable) continue;
        double mss = scorer.Mixed(*a->generated, *b->generated).value;
        if (totals) {
          ++totals->comparable;
          totals->mss_sum += mss;
          ++totals->mss_count;
        }
        if (mss > options.eps_b) {
          bugs.push_back({Mr::kMr3, key.first, {*a, *b}, mss, Severity::kNormal});
        }
      }
    }
  }
  return bugs;
}

BugSummary SummarizeBugs(const std::vector<BugRecord> &bugs,
                         const std::map<Mr, MrTotals> &totals) {
  BugSummary s;
  for (Mr mr : {Mr::kMr1, Mr::kMr2, Mr::kMr3}) {
    MrSummary m;
    std::set<SeedKey> unique, critical;
    double bug_mss = 0;
    for (const BugRecord &b : bugs) {
      if (b.mr != mr) continue;
      ++m.raw_bugs;
      unique.insert(b.seed_key);
      bug_mss += b.mss_at_conflict;
      if (b.severity == Severity::kCritical) critical.insert(b.seed_key);
    }
    m.unique_bugs = static_cast<long>(unique.size());
    m.critical = static_cast<long>(critical.size());
    if (m.raw_bugs > 0) m.bug_mean_mss = bug_mss / static_cast<double>(m.raw_bugs);
    if (auto it = totals.find(mr); it != totals.end()) {
      m.comparable = it->second.comparable;
      if (it->second.mss_count > 0) {
        m.mean_mss = it->second.mss_sum / static_cast<double>(it->second.mss_count);
      }
    }
    if (m.comparable > 0) {
      m.rate = static_cast<double>(m.unique_bugs) / static_cast<double>(m.comparable);
    }
    s.per_mr[mr] = m;
  }
  return s;
}

namespace {

json MrSummaryJson(const MrSummary &m) {
  return {{"raw_bugs", m.raw_bugs},
          {"unique_bugs", m.unique_bugs},
          {"comparable", m.comparable},
          {"rate", Opt(m.rate)},
          {"mss", Opt(m.mean_mss)},
          {"bugs_mss", Opt(m.bug_mean_mss)},
          {"critical", m.critical}};
}

std::optional<double> OptDouble(const json &j, const char *key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<double>();
}

}  // namespace

json BugSummary::ToJson() const {
  json per = json::object();
  for (const auto &[mr, m] : per_mr) per[MrName(mr)] = MrSummaryJson(m);
  return {{"per_mr", per}, {"skipped_rounds", skipped_rounds}, {"failed_rounds", failed_rounds}};
}

BugSummary BugSummary::FromJson(const json &j) {
  BugSummary s;
  for (const auto &[name, m] : j.at("per_mr").items()) {
    MrSummary x;
    x.raw_bugs = m.value("raw_bugs", 0L);
    x.unique_bugs = m.value("unique_bugs", 0L);
    x.comparable = m.value("comparable", 0L);
    x.rate = OptDouble(m, "rate");
    x.mean_mss = OptDouble(m, "mss");
    x.bug_mean_mss = OptDouble(m, "bugs_mss");
    x.critical = m.value("critical", 0L);
    s.per_mr[ParseMr(name)] = x;
  }
  s.skipped_rounds = j.value("skipped_rounds", 0L);
  s.failed_rounds = j.value("failed_rounds", 0L);
  return s;
}

Detection Detect(std::vector<RoundOutcome> outcomes, const DetectionOptions &options,
                 Scorer &scorer) {
  Detection d;
  ScoreOutcomes(outcomes, scorer);
  for (const RoundOutcome &o : outcomes) {
    if (o.status != OutcomeStatus::kOk) ++d.failed;
  }
  d.outcomes = std::move(outcomes);
  auto mr1 = DetectMr1(d.outcomes, options, &d.skipped, &d.totals[Mr::kMr1]);
  auto mr2 = DetectMr2(d.outcomes, options, scorer, &d.totals[Mr::kMr2]);
  auto mr3 = DetectMr3(d.outcomes, options, scorer, &d.totals[Mr::kMr3]);
  d.bugs = std::move(mr1);
  d.bugs.insert(d.bugs.end(), mr2.begin(), mr2.end());
  d.bugs.insert(d.bugs.end(), mr3.begin(), mr3.end());
  d.summary = SummarizeBugs(d.bugs, d.totals);
  d.summary.skipped_rounds = d.skipped;
  d.summary.failed_rounds = d.failed;

  std::set<PerturbationKind> kinds;
  for (const RoundOutcome &o : d.outcomes) kinds.insert(o.kind);
  for (PerturbationKind k : kinds) {
    std::vector<RoundOutcome> subset;
    for (const RoundOutcome &o : d.outcomes) {
      if (o.kind == k) subset.push_back(o);
    }
    MrTotals t;
    auto bugs = DetectMr1(subset, options, nullptr, &t);
    d.mr1_by_kind[k] = SummarizeBugs(bugs, {{Mr::kMr1, t}}).per_mr[Mr::kMr1];
  }
  return d;
}

}  // namespace mortar
