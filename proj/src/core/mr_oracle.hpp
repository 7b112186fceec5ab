#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "perturbation.hpp"
#include "scoring.hpp"

namespace mortar {

enum class OutcomeStatus { kOk, kFailed, kAborted };

const char *OutcomeStatusName(OutcomeStatus s);

// One SUT answer to one perturbed round.
struct RoundOutcome {
  std::string dialogue_id;
  PerturbationKind kind = PerturbationKind::kOriginal;
  int new_index = 0;
  int origin_index = 0;
  std::string question;
  std::optional<bool> answerable;            // answerability tag
  std::optional<std::string> expected;       // expected answer text
  std::optional<std::string> generated;      // null when the round failed
  OutcomeStatus status = OutcomeStatus::kOk;
  std::optional<ScoreTriple> scores;         // generated vs expected
  std::optional<MixedScore> mss;

  std::string Id() const;  // "KIND/dialogue_id/new_index"

  nlohmann::json ToJson() const;
  static RoundOutcome FromJson(const nlohmann::json &j);
};

enum class Mr { kMr1, kMr2, kMr3 };
const char *MrName(Mr mr);
Mr ParseMr(std::string_view name);

enum class Severity { kNormal, kCritical };

struct SeedKey {
  std::string dialogue_id;
  int origin_index = 0;

  auto operator<=>(const SeedKey &) const = default;
  std::string ToString() const { return dialogue_id + "#" + std::to_string(origin_index); }
};

struct BugRecord {
  Mr mr = Mr::kMr1;
  SeedKey seed_key;
  std::vector<RoundOutcome> evidence;  // one (MR1) or two (MR2, MR3)
  double mss_at_conflict = 0;
  Severity severity = Severity::kNormal;

  nlohmann::json ToJson() const;
  static BugRecord FromJson(const nlohmann::json &j);
};

struct DetectionOptions {
  double eps_a = 0.6;
  double eps_b = 0.6;
  bool cross_kind = true;         // MR2/MR3 groups span perturbation kinds
  double critical_below = 0.05;   // MR1 severity threshold
};

// Comparable units and score sums behind one MR's summary.
struct MrTotals {
  long comparable = 0;
  double mss_sum = 0;
  long mss_count = 0;
};

// Fills scores/mss of every outcome that has both a generated and an
// expected answer. Unanswerable rounds are scored against "Unknown".
void ScoreOutcomes(std::vector<RoundOutcome> &outcomes, Scorer &scorer);

// MR1 on scored outcomes: MSS below eps_a is a conflict. Outcomes without a
// generated or expected answer are counted in `skipped`.
std::vector<BugRecord> DetectMr1(const std::vector<RoundOutcome> &outcomes,
                                 const DetectionOptions &options, long *skipped,
                                 MrTotals *totals);

// MR2: every pair of generated answers for one seed round with equal
// answerability must reach MSS >= eps_b. Reads only tags and generated text.
std::vector<BugRecord> DetectMr2(const std::vector<RoundOutcome> &outcomes,
                                 const DetectionOptions &options, Scorer &scorer,
                                 MrTotals *totals);

// MR3: every (answerable, unanswerable) pair for one seed round must stay at
// or below eps_b.
std::vector<BugRecord> DetectMr3(const std::vector<RoundOutcome> &outcomes,
                                 const DetectionOptions &options, Scorer &scorer,
                                 MrTotals *totals);

struct MrSummary {
  long raw_bugs = 0;
  long unique_bugs = 0;  // distinct seed keys
  long comparable = 0;
  std::optional<double> rate;  // unique / comparable
  std::optional<double> mean_mss;
  std::optional<double> bug_mean_mss;
  long critical = 0;  // distinct seed keys with a critical bug
};

struct BugSummary {
  std::map<Mr, MrSummary> per_mr;
  long skipped_rounds = 0;
  long failed_rounds = 0;

  nlohmann::json ToJson() const;
  static BugSummary FromJson(const nlohmann::json &j);
};

BugSummary SummarizeBugs(const std::vector<BugRecord> &bugs,
                         const std::map<Mr, MrTotals> &totals);

struct Detection {
  std::vector<RoundOutcome> outcomes;  // scored
  std::vector<BugRecord> bugs;
  std::map<Mr, MrTotals> totals;
  long skipped = 0;
  long failed = 0;
  BugSummary summary;
  // MR1 summaries restricted to one perturbation kind.
  std::map<PerturbationKind, MrSummary> mr1_by_kind;
};

Detection Detect(std::vector<RoundOutcome> outcomes, const DetectionOptions &options,
                 Scorer &scorer);

}  // namespace mortar
