#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "answerability.hpp"
#include "json.hpp"
#include "mr_oracle.hpp"

namespace mortar {

// Row statistics of one annotated perturbed dataset.
struct DatasetColumn {
  long total_rounds = 0;
  long unanswerable_rounds = 0;
  long total_dialogues = 0;
  long dialogues_with_unanswerable = 0;
  std::optional<double> ratio;  // dialogues_with_unanswerable / total_dialogues
};

using DatasetSummary = std::map<PerturbationKind, DatasetColumn>;

DatasetColumn SummarizeDataset(const std::vector<AnnotatedDialogue> &dialogues);
DatasetSummary SummarizeDatasets(
    const std::map<PerturbationKind, std::vector<AnnotatedDialogue>> &datasets);

std::string DatasetSummaryText(const DatasetSummary &summary);
std::string DatasetSummaryCsv(const DatasetSummary &summary);
nlohmann::json DatasetSummaryJson(const DatasetSummary &summary);

// What detect writes to summary.json for one SUT.
struct RunSummary {
  std::string sut;
  BugSummary bugs;
  std::map<PerturbationKind, MrSummary> mr1_by_kind;

  nlohmann::json ToJson() const;
  static RunSummary FromJson(const nlohmann::json &j);
};

RunSummary MakeRunSummary(const std::string &sut, const Detection &detection);

std::string MrTableText(const std::vector<RunSummary> &runs);
std::string MrTableCsv(const std::vector<RunSummary> &runs);
nlohmann::json MrTableJson(const std::vector<RunSummary> &runs);

using SeedKeySet = std::set<SeedKey>;

SeedKeySet SeedKeysOf(const std::vector<BugRecord> &bugs, bool critical_only);

struct PairOverlap {
  std::string a;
  std::string b;
  long only_a = 0;
  long only_b = 0;
  long common = 0;
};

struct OverlapSummary {
  std::vector<std::string> names;
  std::vector<long> sizes;
  std::vector<PairOverlap> pairs;
  // Venn regions: bit i of the mask set means "in set i". Each key lands in
  // exactly one region.
  std::map<unsigned, long> regions;
  long common_to_all = 0;
  long union_size = 0;

  nlohmann::json ToJson() const;
};

// Throws Error(kConfig) with fewer than two sets or more than 16.
OverlapSummary Overlap(const std::vector<std::pair<std::string, SeedKeySet>> &sets);

std::string OverlapText(const OverlapSummary &summary);

}  // namespace mortar
